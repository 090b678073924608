#include "shearmix/cocycle_stats.hpp"

#include <cmath>
#include <stdexcept>

#include "shearmix/csv_io.hpp"
#include "shearmix/parallel.hpp"

namespace shearmix {

namespace {

const StepSampler& default_sampler(const StepSampler& s) {
    static const StepSampler pier = pierrehumbert_sampler();
    return s ? s : pier;
}

struct MeanVar {
    double mean = 0.0;
    double se = 0.0;
};

MeanVar mean_se(const std::vector<double>& xs) {
    const std::size_t n = xs.size();
    double m = 0.0;
    for (double x : xs) m += x;
    m /= double(n);
    double v = 0.0;
    for (double x : xs) v += (x - m) * (x - m);
    v = n > 1 ? v / double(n - 1) : 0.0;
    return {m, std::sqrt(v / double(n))};
}

} // namespace

StepSampler pierrehumbert_sampler() {
    return [](RngStream& rng) { return sample_step(rng); };
}

StepSampler identity_sampler() {
    return [](RngStream&) { return ShearMapStep{}; };
}

StepSampler fixed_sampler(const ShearMapStep& s) {
    return [s](RngStream&) { return s; };
}

LyapunovEstimate top_lyapunov(std::size_t n_steps, std::size_t n_samples,
                              std::uint64_t seed, const StepSampler& sampler,
                              int workers) {
    if (n_steps < 1) throw std::invalid_argument("top_lyapunov: n_steps must be >= 1");
    const StepSampler& sam = default_sampler(sampler);
    std::vector<double> per_sample(n_samples);
    parallel_for(n_samples, workers, [&](std::size_t s) {
        RngStream init = make_stream(seed, kStreamLyapunov, s);
        TorusPoint x{init.uniform(0.0, kTwoPi), init.uniform(0.0, kTwoPi)};
        double v = init.uniform(0.0, kTwoPi);
        double acc = 0.0;
        for (std::size_t i = 0; i < n_steps; ++i) {
            RngStream rng = make_stream(seed, kStreamSteps, s, i);
            const ShearMapStep step = sam(rng);
            const ProjectiveStep r = projective_step(step, x, v);
            acc += r.log_gain;
            x = r.x;
            v = r.angle;
        }
        per_sample[s] = acc / double(n_steps);
    });
    const MeanVar mv = mean_se(per_sample);
    return {mv.mean, mv.se, n_steps, n_samples};
}

std::vector<LyapunovEstimate> top_lyapunov_trace(std::size_t n_steps,
                                                 std::size_t n_samples,
                                                 std::uint64_t seed,
                                                 const StepSampler& sampler,
                                                 int workers) {
    const StepSampler& sam = default_sampler(sampler);
    // running averages per sample, reduced across samples at each step
    std::vector<std::vector<double>> run(n_samples);
    parallel_for(n_samples, workers, [&](std::size_t s) {
        RngStream init = make_stream(seed, kStreamLyapunov, s);
        TorusPoint x{init.uniform(0.0, kTwoPi), init.uniform(0.0, kTwoPi)};
        double v = init.uniform(0.0, kTwoPi);
        double acc = 0.0;
        run[s].resize(n_steps);
        for (std::size_t i = 0; i < n_steps; ++i) {
            RngStream rng = make_stream(seed, kStreamSteps, s, i);
            const ProjectiveStep r = projective_step(sam(rng), x, v);
            acc += r.log_gain;
            x = r.x;
            v = r.angle;
            run[s][i] = acc / double(i + 1);
        }
    });
    std::vector<LyapunovEstimate> out(n_steps);
    std::vector<double> col(n_samples);
    for (std::size_t i = 0; i < n_steps; ++i) {
        for (std::size_t s = 0; s < n_samples; ++s) col[s] = run[s][i];
        const MeanVar mv = mean_se(col);
        out[i] = {mv.mean, mv.se, i + 1, n_samples};
    }
    return out;
}

MomentLyapunovEstimate moment_lyapunov_direct(double p, std::size_t n_steps,
                                              std::size_t n_samples,
                                              std::uint64_t seed,
                                              const StepSampler& sampler,
                                              int workers) {
    if (p < 0.0 || p > 1.0)
        throw std::invalid_argument("moment_lyapunov_direct: p must be in [0,1]");
    const StepSampler& sam = default_sampler(sampler);
    std::vector<double> weights(n_samples);
    parallel_for(n_samples, workers, [&](std::size_t s) {
        RngStream init = make_stream(seed, kStreamLyapunov, s);
        TorusPoint x{init.uniform(0.0, kTwoPi), init.uniform(0.0, kTwoPi)};
        double v = init.uniform(0.0, kTwoPi);
        double acc = 0.0;
        for (std::size_t i = 0; i < n_steps; ++i) {
            RngStream rng = make_stream(seed, kStreamSteps, s, i);
            const ProjectiveStep r = projective_step(sam(rng), x, v);
            acc += r.log_gain;
            x = r.x;
            v = r.angle;
        }
        weights[s] = std::exp(-p * acc);
    });
    double wbar = 0.0, w2 = 0.0;
    for (double w : weights) {
        wbar += w;
        w2 += w * w;
    }
    wbar /= double(n_samples);
    w2 /= double(n_samples);
    MomentLyapunovEstimate est;
    est.n_steps = n_steps;
    est.n_samples = n_samples;
    est.lambda = -std::log(wbar) / double(n_steps);
    const double var_wbar =
        n_samples > 1 ? std::max(0.0, w2 - wbar * wbar) / double(n_samples - 1) : 0.0;
    est.stderr_ = std::sqrt(var_wbar) / (double(n_steps) * wbar);
    est.ess_fraction = w2 > 0.0 ? wbar * wbar / w2 : 1.0;
    est.unreliable = est.ess_fraction < 0.01;
    return est;
}

double PsiGrid::interp(double x, double y, double theta) const {
    const double gx = nx / kTwoPi, gt = ntheta / kTwoPi;
    double u = wrap_2pi(x) * gx, v = wrap_2pi(y) * gx, w = wrap_2pi(theta) * gt;
    int i0 = int(u), j0 = int(v), t0 = int(w);
    if (i0 >= nx) i0 = 0, u -= nx;
    if (j0 >= nx) j0 = 0, v -= nx;
    if (t0 >= ntheta) t0 = 0, w -= ntheta;
    const double fu = u - i0, fv = v - j0, ft = w - t0;
    const int i1 = i0 + 1 == nx ? 0 : i0 + 1;
    const int j1 = j0 + 1 == nx ? 0 : j0 + 1;
    const int t1 = t0 + 1 == ntheta ? 0 : t0 + 1;
    auto val = [&](int i, int j, int t) { return at(i, j, t); };
    const double c00 = val(i0, j0, t0) * (1 - ft) + val(i0, j0, t1) * ft;
    const double c01 = val(i0, j1, t0) * (1 - ft) + val(i0, j1, t1) * ft;
    const double c10 = val(i1, j0, t0) * (1 - ft) + val(i1, j0, t1) * ft;
    const double c11 = val(i1, j1, t0) * (1 - ft) + val(i1, j1, t1) * ft;
    return (1 - fu) * ((1 - fv) * c00 + fv * c01) + fu * ((1 - fv) * c10 + fv * c11);
}

double PsiGrid::min_value() const {
    double m = values.empty() ? 0.0 : values[0];
    for (double v : values) m = std::min(m, v);
    return m;
}

double PsiGrid::max_value() const {
    double m = values.empty() ? 0.0 : values[0];
    for (double v : values) m = std::max(m, v);
    return m;
}

PsiGrid PsiGrid::constant(int nx, int ntheta, double p) {
    PsiGrid g;
    g.nx = nx;
    g.ntheta = ntheta;
    g.p = p;
    g.values.assign(std::size_t(nx) * nx * ntheta, 1.0);
    return g;
}

void PsiGrid::write_csv(const std::string& path) const {
    CsvWriter w(path);
    w.line("# p=" + fmt_double(p) + " nx=" + std::to_string(nx) +
           " ntheta=" + std::to_string(ntheta) + " lambda_p=" + fmt_double(lambda_p));
    w.line("ix,iy,itheta,value");
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nx; ++j)
            for (int t = 0; t < ntheta; ++t)
                w.row({double(i), double(j), double(t), at(i, j, t)});
}

namespace {

// phi(x) and the inverse-transpose Jacobian at every spatial node, for one
// map sample; shared by every theta node of the iteration.
struct NodeImage {
    TorusPoint fx;
    Mat2 frame;
};

void iterate_once(const PsiGrid& old, PsiGrid& next,
                  const std::vector<std::vector<NodeImage>>& images, double p,
                  int workers) {
    const int nx = old.nx, nt = old.ntheta;
    const int m = int(images.size());
    parallel_for(std::size_t(nx), workers, [&](std::size_t ix) {
        for (int iy = 0; iy < nx; ++iy) {
            const std::size_t node = std::size_t(ix) * nx + iy;
            for (int it = 0; it < nt; ++it) {
                const double theta = kTwoPi * it / nt;
                const double cx = std::cos(theta), cy = std::sin(theta);
                double acc = 0.0;
                for (int j = 0; j < m; ++j) {
                    const NodeImage& im = images[j][node];
                    const auto [wx, wy] = im.frame.apply_vec(cx, cy);
                    const double g2 = wx * wx + wy * wy;
                    const double weight = p == 0.0 ? 1.0 : std::exp(-0.5 * p * std::log(g2));
                    const double val =
                        old.interp(im.fx.x, im.fx.y, std::atan2(wy, wx));
                    if (val <= 0.0)
                        throw std::logic_error(
                            "psi_power_iteration: non-positive interpolated value");
                    acc += weight * val;
                }
                next.values[node * nt + it] = acc / double(m);
            }
        }
    });
}

std::vector<std::vector<NodeImage>> draw_images(int nx, int m, std::uint64_t seed,
                                                std::uint64_t iter,
                                                const StepSampler& sam) {
    std::vector<std::vector<NodeImage>> images(m);
    const double h = kTwoPi / nx;
    for (int j = 0; j < m; ++j) {
        RngStream rng = make_stream(seed, kStreamPsi, iter, std::uint64_t(j));
        const ShearMapStep step = sam(rng);
        images[j].resize(std::size_t(nx) * nx);
        for (int ix = 0; ix < nx; ++ix)
            for (int iy = 0; iy < nx; ++iy) {
                const TorusPoint x{ix * h, iy * h};
                images[j][std::size_t(ix) * nx + iy] = {apply(step, x),
                                                        inv_transpose_jacobian(step, x)};
            }
    }
    return images;
}

} // namespace

PsiGrid psi_power_iteration(double p, int nx, int ntheta, int n_maps_per_iter,
                            int n_iters, std::uint64_t seed,
                            const StepSampler& sampler, int workers) {
    if (p < 0.0 || p > 1.0)
        throw std::invalid_argument("psi_power_iteration: p must be in [0,1]");
    if (nx < 8 || ntheta < 8)
        throw std::invalid_argument("psi_power_iteration: grid sizes must be >= 8");
    if (n_maps_per_iter < 1 || n_iters < 1)
        throw std::invalid_argument("psi_power_iteration: counts must be >= 1");
    const StepSampler& sam = default_sampler(sampler);
    PsiGrid psi = PsiGrid::constant(nx, ntheta, p);
    PsiGrid next = psi;
    double last_increment = 0.0;
    for (int t = 0; t < n_iters; ++t) {
        const auto images = draw_images(nx, n_maps_per_iter, seed, std::uint64_t(t), sam);
        iterate_once(psi, next, images, p, workers);
        double sup = 0.0;
        for (double v : next.values) sup = std::max(sup, v);
        psi.factors.push_back(sup);
        const double inv = 1.0 / sup;
        last_increment = 0.0;
        for (std::size_t i = 0; i < psi.values.size(); ++i) {
            const double nv = next.values[i] * inv;
            last_increment = std::max(last_increment, std::fabs(nv - psi.values[i]));
            psi.values[i] = nv;
        }
    }
    psi.final_increment = last_increment;
    // eigenvalue from the tail of the sup-factor sequence
    const std::size_t tail = psi.factors.size() - psi.factors.size() / 2;
    std::vector<double> logs;
    for (std::size_t i = tail; i < psi.factors.size(); ++i)
        logs.push_back(std::log(psi.factors[i]));
    if (!logs.empty()) {
        const MeanVar mv = mean_se(logs);
        psi.lambda_hat = -mv.mean;
        psi.lambda_se = mv.se;
        psi.lambda_p = std::exp(-psi.lambda_hat);
    }
    return psi;
}

std::vector<double> psi_apply_empirical(const PsiGrid& psi, int n_maps,
                                        std::uint64_t seed, std::uint64_t label,
                                        const StepSampler& sampler, int workers) {
    const StepSampler& sam = default_sampler(sampler);
    PsiGrid out = psi;
    const auto images = draw_images(psi.nx, n_maps, seed, label, sam);
    iterate_once(psi, out, images, psi.p, workers);
    return out.values;
}

LambdaCurve lambda_curve(const std::vector<double>& p_list, int nx, int ntheta,
                         int n_maps_per_iter, int n_iters, std::uint64_t seed,
                         const StepSampler& sampler, int workers) {
    if (p_list.empty()) throw std::invalid_argument("lambda_curve: empty p_list");
    for (std::size_t i = 0; i < p_list.size(); ++i) {
        if (p_list[i] < 0.0 || p_list[i] > 0.5)
            throw std::invalid_argument("lambda_curve: p values must lie in [0, 0.5]");
        if (i > 0 && p_list[i] <= p_list[i - 1])
            throw std::invalid_argument("lambda_curve: p_list must be strictly sorted");
    }
    LambdaCurve curve;
    for (double p : p_list) {
        // identical stream labels across p: common random numbers
        PsiGrid g =
            psi_power_iteration(p, nx, ntheta, n_maps_per_iter, n_iters, seed, sampler, workers);
        curve.points.push_back({p, g.lambda_hat, g.lambda_se});
        curve.grids.push_back(std::move(g));
    }
    if (curve.points.size() >= 2) {
        const auto& a = curve.points[0];
        const auto& b = curve.points[1];
        curve.secant_slope = (b.lambda_hat - a.lambda_hat) / (b.p - a.p);
        curve.secant_se =
            std::sqrt(a.stderr_ * a.stderr_ + b.stderr_ * b.stderr_) / (b.p - a.p);
    }
    return curve;
}

} // namespace shearmix
