#include "shearmix/symbol_calculus.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "shearmix/fft.hpp"
#include "shearmix/parallel.hpp"

namespace shearmix {

namespace {

// quintic smoothstep: 0 at t<=0, 1 at t>=1, C^2 at the joints
double smoothstep5(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

} // namespace

double DyadicPartition::ramp(int N, double z) {
    // rises on [N/2, N]
    return smoothstep5((2.0 * z - N) / double(N));
}

double DyadicPartition::chi(int N, double z) const {
    if (N == 1) return 1.0 - ramp(2, z);
    return ramp(N, z) - ramp(2 * N, z);
}

double DyadicPartition::sum_all(double z) const {
    double s = chi(1, z);
    for (int N : shells) s += chi(N, z);
    return s;
}

double DyadicPartition::sum_shells(double z) const {
    double s = 0.0;
    for (int N : shells) s += chi(N, z);
    return s;
}

DyadicPartition build_partition(int n_max) {
    if (n_max < 4 || !is_pow2(n_max))
        throw std::invalid_argument("build_partition: n_max must be a power of two >= 4");
    DyadicPartition p;
    p.n_max = n_max;
    for (int N = 2; N <= n_max; N *= 2) p.shells.push_back(N);
    return p;
}

std::vector<double> mollify(const PsiGrid& psi, double h, bool* unchanged) {
    if (h <= 0.0 || h > 1.0)
        throw std::invalid_argument("mollify: h must be in (0, 1]");
    const int nx = psi.nx, nt = psi.ntheta;
    const double hx = kTwoPi / nx, ht = kTwoPi / nt;
    const int rx = int(std::floor(h / hx));
    const int rt = int(std::floor(h / ht));
    if (unchanged) *unchanged = false;
    if (rx == 0 && rt == 0) {
        // bump resolves no neighbor: identity, flagged
        if (unchanged) *unchanged = true;
        return psi.values;
    }
    // discrete weights from a compactly supported polynomial bump (1-t^2)^3
    struct Tap {
        int dx, dy, dt;
        double w;
    };
    std::vector<Tap> taps;
    double wsum = 0.0;
    for (int dx = -rx; dx <= rx; ++dx)
        for (int dy = -rx; dy <= rx; ++dy)
            for (int dt = -rt; dt <= rt; ++dt) {
                const double r2 = (dx * hx) * (dx * hx) + (dy * hx) * (dy * hx) +
                                  (dt * ht) * (dt * ht);
                const double t2 = r2 / (h * h);
                if (t2 >= 1.0) continue;
                const double w = (1.0 - t2) * (1.0 - t2) * (1.0 - t2);
                taps.push_back({dx, dy, dt, w});
                wsum += w;
            }
    for (auto& t : taps) t.w /= wsum;
    std::vector<double> out(psi.values.size());
    for (int ix = 0; ix < nx; ++ix)
        for (int iy = 0; iy < nx; ++iy)
            for (int it = 0; it < nt; ++it) {
                double acc = 0.0;
                for (const auto& t : taps) {
                    const int jx = (ix + t.dx + nx) % nx;
                    const int jy = (iy + t.dy + nx) % nx;
                    const int jt = (it + t.dt + nt) % nt;
                    acc += t.w * psi.at(jx, jy, jt);
                }
                out[(std::size_t(ix) * nx + iy) * nt + it] = acc;
            }
    return out;
}

SymbolModel build_symbol(const PsiGrid& psi, double eps, int n_max) {
    if (eps <= 0.0 || eps >= 0.25)
        throw std::invalid_argument("build_symbol: eps must lie in (0, 1/4)");
    SymbolModel S;
    S.p_ = psi.p;
    S.eps_ = eps;
    S.psi_ = psi;
    S.partition_ = build_partition(n_max);
    for (int N : S.partition_.shells) {
        const double h = std::pow(double(N), -eps);
        bool noop = false;
        PsiGrid m = psi;
        m.values = mollify(psi, h, &noop);
        S.bank_.push_back(std::move(m));
        S.h_.push_back(h);
        S.noop_.push_back(noop);
    }
    return S;
}

double SymbolModel::eval(TorusPoint x, double k1, double k2) const {
    const double z = std::hypot(k1, k2);
    if (z == 0.0) return 0.0;
    double acc = 0.0;
    bool any = false;
    double theta = 0.0;
    for (std::size_t si = 0; si < bank_.size(); ++si) {
        const double c = partition_.chi(partition_.shells[si], z);
        if (c == 0.0) continue;
        if (!any) {
            theta = std::atan2(k2, k1);
            any = true;
        }
        acc += c * bank_[si].interp(x.x, x.y, theta);
    }
    if (!any) return 0.0;
    return acc * std::pow(z, -p_);
}

ScalarField quantize_apply(const MultiplierFn& a, const ScalarField& f) {
    const int N = f.size();
    std::vector<std::complex<double>> c = f.coeffs();
    for (int i = 0; i < N; ++i) {
        const int k1 = fft_freq(i, N);
        for (int j = 0; j < N; ++j) {
            const int k2 = fft_freq(j, N);
            c[std::size_t(i) * N + j] *= a(double(k1), double(k2));
        }
    }
    return ScalarField::from_coeffs(N, std::move(c));
}

namespace {

struct Mode {
    int k1, k2;
    std::complex<double> coeff;
};

std::vector<Mode> nonzero_modes(const ScalarField& f) {
    const int N = f.size();
    std::vector<Mode> modes;
    const auto& c = f.coeffs();
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            const auto v = c[std::size_t(i) * N + j];
            if (v != std::complex<double>(0.0, 0.0))
                modes.push_back({fft_freq(i, N), fft_freq(j, N), v});
        }
    return modes;
}

std::vector<std::complex<double>> unit_roots(int N) {
    std::vector<std::complex<double>> w(N);
    for (int m = 0; m < N; ++m) {
        const double ph = kTwoPi * m / N;
        w[m] = {std::cos(ph), std::sin(ph)};
    }
    return w;
}

} // namespace

ScalarField quantize_apply(const SymbolFn& a, const ScalarField& f, int workers) {
    const int N = f.size();
    const auto modes = nonzero_modes(f);
    const auto w = unit_roots(N);
    std::vector<double> vals(std::size_t(N) * N);
    const double h = kTwoPi / N;
    parallel_for(std::size_t(N), workers, [&](std::size_t i) {
        for (int j = 0; j < N; ++j) {
            const TorusPoint x{double(i) * h, j * h};
            std::complex<double> acc{0.0, 0.0};
            for (const auto& m : modes) {
                const long long ph = (long long)m.k1 * (long long)i + (long long)m.k2 * j;
                const int idx = int(((ph % N) + N) % N);
                acc += a(x, double(m.k1), double(m.k2)) * m.coeff * w[idx];
            }
            vals[i * N + j] = acc.real();
        }
    });
    return ScalarField::from_samples(N, std::move(vals));
}

namespace {

// Per-field precomputation for the dyadic fast path: every represented mode
// bucketed per shell by its lower theta node, carrying the shell weight
// chi_N(|k|) |k|^{-p} and the angular interpolation fraction.
struct ShellEntry {
    int idx;
    double w_shell;
    double frac;
};

struct FastPathPlan {
    // buckets[si][t] = entries with theta node t
    std::vector<std::vector<std::vector<ShellEntry>>> buckets;
};

FastPathPlan plan_fast_path(const SymbolModel& S, const ScalarField& f) {
    const int N = f.size();
    const int T = S.psi().ntheta;
    const double ht = kTwoPi / T;
    FastPathPlan plan;
    plan.buckets.assign(S.shell_count(),
                        std::vector<std::vector<ShellEntry>>(std::size_t(T)));
    const auto& part = S.partition();
    for (int i = 0; i < N; ++i) {
        const int k1 = fft_freq(i, N);
        for (int j = 0; j < N; ++j) {
            const int k2 = fft_freq(j, N);
            if (k1 == 0 && k2 == 0) continue;
            const double z = std::hypot(double(k1), double(k2));
            double theta = 0.0;
            int t0 = -1;
            double frac = 0.0;
            for (int si = 0; si < S.shell_count(); ++si) {
                const double c = part.chi(part.shells[si], z);
                if (c == 0.0) continue;
                if (t0 < 0) {
                    theta = wrap_2pi(std::atan2(double(k2), double(k1)));
                    double tf = theta / ht;
                    t0 = int(tf);
                    if (t0 >= T) t0 = 0, tf -= T;
                    frac = tf - t0;
                }
                plan.buckets[si][t0].push_back(
                    {i * N + j, c * std::pow(z, -S.p()), frac});
            }
        }
    }
    return plan;
}

// bilinear upsample of one theta slice of the mollified bank onto the field grid
void upsample_slice(const PsiGrid& bank, int t, int N, std::vector<double>& out) {
    const int nx = bank.nx;
    out.resize(std::size_t(N) * N);
    const double scale = double(nx) / N;
    std::vector<int> i0(N), i1(N);
    std::vector<double> fr(N);
    for (int i = 0; i < N; ++i) {
        const double u = i * scale;
        int a = int(u);
        if (a >= nx) a = nx - 1;
        i0[i] = a;
        i1[i] = (a + 1) % nx;
        fr[i] = u - a;
    }
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            const double v00 = bank.at(i0[i], i0[j], t);
            const double v01 = bank.at(i0[i], i1[j], t);
            const double v10 = bank.at(i1[i], i0[j], t);
            const double v11 = bank.at(i1[i], i1[j], t);
            out[std::size_t(i) * N + j] = (1 - fr[i]) * ((1 - fr[j]) * v00 + fr[j] * v01) +
                                          fr[i] * ((1 - fr[j]) * v10 + fr[j] * v11);
        }
}

// Op(a_{p,eps}) f assembled as sum over (shell, theta node) of
// B_{si,t}(x) . IFFT[ m_{si,t}(k) fhat(k) ](x). Parallelism is over the IFFT
// batch and over grid rows; the accumulation order over (si,t) is fixed, so
// results are bitwise identical for every worker count.
std::vector<std::complex<double>> apply_dyadic(const SymbolModel& S,
                                               const ScalarField& f, int workers) {
    const int N = f.size();
    const int T = S.psi().ntheta;
    const auto plan = plan_fast_path(S, f);
    const auto& c = f.coeffs();

    struct Pair {
        int si, t;
    };
    std::vector<Pair> pairs;
    for (int si = 0; si < S.shell_count(); ++si)
        for (int t = 0; t < T; ++t) {
            const auto& own = plan.buckets[si][t];
            const auto& prev = plan.buckets[si][(t - 1 + T) % T];
            if (!own.empty() || !prev.empty()) pairs.push_back({si, t});
        }

    std::vector<std::complex<double>> out(std::size_t(N) * N, {0.0, 0.0});
    constexpr std::size_t kChunk = 16;
    std::vector<std::vector<std::complex<double>>> ubuf(kChunk);
    std::vector<std::vector<double>> bbuf(kChunk);

    for (std::size_t base = 0; base < pairs.size(); base += kChunk) {
        const std::size_t m = std::min(kChunk, pairs.size() - base);
        parallel_for(m, workers, [&](std::size_t q) {
            const auto [si, t] = pairs[base + q];
            auto& buf = ubuf[q];
            buf.assign(std::size_t(N) * N, {0.0, 0.0});
            for (const auto& e : plan.buckets[si][t])
                buf[e.idx] = e.w_shell * (1.0 - e.frac) * c[e.idx];
            for (const auto& e : plan.buckets[si][(t - 1 + T) % T])
                buf[e.idx] += e.w_shell * e.frac * c[e.idx];
            std::vector<std::complex<double>> u(buf.size());
            fft2_backward(N, buf.data(), u.data());
            buf = std::move(u);
            upsample_slice(S.bank(si), t, N, bbuf[q]);
        });
        // fixed-order accumulation, rows in parallel
        parallel_for(std::size_t(N), workers, [&](std::size_t i) {
            for (std::size_t q = 0; q < m; ++q) {
                const auto& u = ubuf[q];
                const auto& B = bbuf[q];
                for (int j = 0; j < N; ++j)
                    out[i * N + j] += B[i * N + j] * u[i * N + j];
            }
        });
    }
    return out;
}

} // namespace

ScalarField quantize_apply(const SymbolModel& S, const ScalarField& f, int workers) {
    const int N = f.size();
    const auto out = apply_dyadic(S, f, workers);
    std::vector<double> vals(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) vals[i] = out[i].real();
    return ScalarField::from_samples(N, std::move(vals));
}

double quadratic_form(const SymbolModel& S, const ScalarField& f, int workers) {
    const int N = f.size();
    const auto out = apply_dyadic(S, f, workers);
    const auto& v = f.values();
    // row partials reduced in fixed order
    std::vector<std::complex<double>> rows(N, {0.0, 0.0});
    parallel_for(std::size_t(N), workers, [&](std::size_t i) {
        std::complex<double> acc{0.0, 0.0};
        for (int j = 0; j < N; ++j) acc += out[i * N + j] * v[i * N + j];
        rows[i] = acc;
    });
    std::complex<double> q{0.0, 0.0};
    for (const auto& r : rows) q += r;
    q /= double(N) * N;
    if (std::fabs(q.imag()) > 1e-10 * std::max(1.0, std::fabs(q.real())))
        throw std::runtime_error("quadratic_form: assembled form is not real");
    return q.real();
}

double quadratic_form(const MultiplierFn& a, const ScalarField& f) {
    const int N = f.size();
    const auto& c = f.coeffs();
    double acc = 0.0;
    for (int i = 0; i < N; ++i) {
        const int k1 = fft_freq(i, N);
        for (int j = 0; j < N; ++j) {
            const int k2 = fft_freq(j, N);
            const double m = std::norm(c[std::size_t(i) * N + j]);
            if (m != 0.0) acc += a(double(k1), double(k2)) * m;
        }
    }
    return acc;
}

double seminorm_estimate(const SymbolFn& a, int k_order, double m, double rho,
                         int n_x_samples, int n_xi_samples, double xi_max,
                         double x_step, std::uint64_t seed, int workers) {
    if (k_order < 0 || k_order > 2)
        throw std::invalid_argument("seminorm_estimate: k_order must be in [0,2]");
    const double hxi = 0.5;
    // sample points
    std::vector<TorusPoint> xs(n_x_samples);
    std::vector<std::pair<double, double>> xis(n_xi_samples);
    {
        RngStream rng = make_stream(seed, kStreamSeminorm, 0);
        for (auto& x : xs) x = {rng.uniform(0.0, kTwoPi), rng.uniform(0.0, kTwoPi)};
        for (auto& xi : xis) {
            const double r = std::exp(rng.uniform(std::log(1.5), std::log(xi_max)));
            const double th = rng.uniform(0.0, kTwoPi);
            xi = {r * std::cos(th), r * std::sin(th)};
        }
    }
    // central-difference stencils per 1D order
    static const int off1[3] = {-1, 0, 1};
    auto coef = [](int order, int o) -> double {
        switch (order) {
            case 0: return o == 0 ? 1.0 : 0.0;
            case 1: return o == 0 ? 0.0 : (o > 0 ? 0.5 : -0.5);
            default: return o == 0 ? -2.0 : 1.0;  // order 2
        }
    };
    std::vector<double> sup_per_x(n_x_samples, 0.0);
    parallel_for(std::size_t(n_x_samples), workers, [&](std::size_t sx) {
        const TorusPoint x = xs[sx];
        double sup = 0.0;
        for (const auto& [xi1, xi2] : xis) {
            const double w2 = 1.0 + xi1 * xi1 + xi2 * xi2;
            for (int a1 = 0; a1 <= k_order; ++a1)
                for (int a2 = 0; a1 + a2 <= k_order; ++a2)
                    for (int b1 = 0; b1 <= k_order; ++b1)
                        for (int b2 = 0; b1 + b2 <= k_order; ++b2) {
                            const int ao = a1 + a2, bo = b1 + b2;
                            double acc = 0.0;
                            for (int i1 : off1)
                                for (int i2 : off1)
                                    for (int j1 : off1)
                                        for (int j2 : off1) {
                                            const double cc = coef(a1, i1) * coef(a2, i2) *
                                                              coef(b1, j1) * coef(b2, j2);
                                            if (cc == 0.0) continue;
                                            acc += cc * a({x.x + i1 * x_step,
                                                           x.y + i2 * x_step},
                                                          xi1 + j1 * hxi, xi2 + j2 * hxi);
                                        }
                            const double denom = std::pow(x_step, double(ao)) *
                                                 std::pow(hxi, double(bo));
                            const double d = std::fabs(acc) / denom;
                            const double weight =
                                std::pow(w2, 0.5 * (-m + rho * bo - (1.0 - rho) * ao));
                            sup = std::max(sup, d * weight);
                        }
        }
        sup_per_x[sx] = sup;
    });
    double sup = 0.0;
    for (double v : sup_per_x) sup = std::max(sup, v);
    return sup;
}

double seminorm_estimate(const SymbolModel& S, int k_order, double m, double rho,
                         int n_x_samples, int n_xi_samples, std::uint64_t seed,
                         int workers) {
    const double x_step = kTwoPi / S.psi().nx;
    const double xi_max = double(S.partition().n_max);
    SymbolFn fn = [&S](TorusPoint x, double k1, double k2) {
        return S.eval(x, k1, k2);
    };
    return seminorm_estimate(fn, k_order, m, rho, n_x_samples, n_xi_samples, xi_max,
                             x_step, seed, workers);
}

TorusDiffeo TorusDiffeo::from_step(const ShearMapStep& s) {
    TorusDiffeo d;
    d.fwd = [s](TorusPoint p) { return apply(s, p); };
    d.inv = [s](TorusPoint p) { return apply_inverse(s, p); };
    d.jac = [s](TorusPoint p) { return jacobian(s, p); };
    return d;
}

TorusDiffeo TorusDiffeo::translation(double c1, double c2) {
    TorusDiffeo d;
    d.fwd = [c1, c2](TorusPoint p) {
        return TorusPoint{wrap_2pi(p.x + c1), wrap_2pi(p.y + c2)};
    };
    d.inv = [c1, c2](TorusPoint p) {
        return TorusPoint{wrap_2pi(p.x - c1), wrap_2pi(p.y - c2)};
    };
    d.jac = [](TorusPoint) { return Mat2::identity(); };
    return d;
}

namespace {

// evaluate the spectral representation of f at arbitrary points: per point
// the phase vectors e^{i k1 z1}, e^{i k2 z2} are built by recurrence and the
// bilinear form with the coefficient matrix is accumulated row-wise.
void eval_field_at(const ScalarField& f, const std::vector<TorusPoint>& pts,
                   std::vector<double>& out, int workers) {
    const int N = f.size();
    const auto& c = f.coeffs();
    const int h = N / 2 - 1;
    out.resize(pts.size());
    parallel_for(pts.size(), workers, [&](std::size_t n) {
        const TorusPoint z = pts[n];
        // phases for k in [-h, h]
        std::vector<std::complex<double>> u(2 * h + 1), v(2 * h + 1);
        const std::complex<double> e1{std::cos(z.x), std::sin(z.x)};
        const std::complex<double> e2{std::cos(z.y), std::sin(z.y)};
        u[h] = 1.0;
        v[h] = 1.0;
        for (int k = 1; k <= h; ++k) {
            u[h + k] = u[h + k - 1] * e1;
            u[h - k] = std::conj(u[h + k]);
            v[h + k] = v[h + k - 1] * e2;
            v[h - k] = std::conj(v[h + k]);
        }
        std::complex<double> acc{0.0, 0.0};
        for (int k1 = -h; k1 <= h; ++k1) {
            const std::size_t row = std::size_t(fft_index(k1, N)) * N;
            std::complex<double> racc{0.0, 0.0};
            for (int k2 = -h; k2 <= h; ++k2) {
                const auto cv = c[row + fft_index(k2, N)];
                if (cv != std::complex<double>(0.0, 0.0)) racc += cv * v[h + k2];
            }
            acc += u[h + k1] * racc;
        }
        out[n] = acc.real();
    });
}

} // namespace

namespace {

// shared skeleton: main term by per-mode synthesis of the lifted symbol; the
// conjugated operator [Op(a)(f o phi^{-1})] o phi evaluates the quantization
// sum of Op(a)g at the pushed-forward points, with g sampled by exact
// pullback synthesis on the grid.
EgorovDecomposition egorov_impl(
    const std::function<double(TorusPoint fx, const Mat2& invT, double k1, double k2)>&
        lifted,
    const std::function<void(const ScalarField& g, const std::vector<TorusPoint>& pts,
                             std::vector<double>& out)>& conjugated,
    const TorusDiffeo& phi, const ScalarField& f, int workers) {
    const int N = f.size();
    const double hg = kTwoPi / N;
    const auto modes = nonzero_modes(f);
    const auto w = unit_roots(N);

    std::vector<double> main_vals(std::size_t(N) * N);
    parallel_for(std::size_t(N), workers, [&](std::size_t i) {
        for (int j = 0; j < N; ++j) {
            const TorusPoint x{double(i) * hg, j * hg};
            const TorusPoint fx = phi.fwd(x);
            const Mat2 J = phi.jac(x);
            const double det = J.det();
            // (D phi)^{-T} = [[d,-c],[-b,a]] / det
            const Mat2 Mi{J.d / det, -J.c / det, -J.b / det, J.a / det};
            std::complex<double> acc{0.0, 0.0};
            for (const auto& m : modes) {
                const long long ph = (long long)m.k1 * (long long)i + (long long)m.k2 * j;
                const int idx = int(((ph % N) + N) % N);
                acc += lifted(fx, Mi, double(m.k1), double(m.k2)) * m.coeff * w[idx];
            }
            main_vals[i * N + j] = acc.real();
        }
    });
    ScalarField main = ScalarField::from_samples(N, std::move(main_vals));

    std::vector<TorusPoint> pre(std::size_t(N) * N), post(std::size_t(N) * N);
    parallel_for(std::size_t(N), workers, [&](std::size_t i) {
        for (int j = 0; j < N; ++j) {
            const TorusPoint x{double(i) * hg, j * hg};
            pre[i * N + j] = phi.inv(x);
            post[i * N + j] = phi.fwd(x);
        }
    });
    std::vector<double> gv;
    eval_field_at(f, pre, gv, workers);
    const ScalarField g = ScalarField::from_samples(N, std::move(gv));
    std::vector<double> conj_vals;
    conjugated(g, post, conj_vals);

    EgorovDecomposition d;
    d.remainder = ScalarField::from_samples(N, std::move(conj_vals)) + main * (-1.0);
    d.main = std::move(main);
    return d;
}

} // namespace

EgorovDecomposition egorov_decompose(const SymbolFn& a, const TorusDiffeo& phi,
                                     const ScalarField& f, int workers) {
    return egorov_impl(
        [&a](TorusPoint fx, const Mat2& Mi, double k1, double k2) {
            const auto [t1, t2] = Mi.apply_vec(k1, k2);
            return a(fx, t1, t2);
        },
        [&a, workers](const ScalarField& g, const std::vector<TorusPoint>& pts,
                      std::vector<double>& out) {
            // (Op(a)g)(y) = sum_k a(y,k) ghat(k) e^{ik.y} at arbitrary y
            const auto gmodes = nonzero_modes(g);
            out.resize(pts.size());
            parallel_for(pts.size(), workers, [&](std::size_t n) {
                const TorusPoint y = pts[n];
                std::complex<double> acc{0.0, 0.0};
                for (const auto& m : gmodes) {
                    const double ph = m.k1 * y.x + m.k2 * y.y;
                    acc += a(y, double(m.k1), double(m.k2)) * m.coeff *
                           std::complex<double>(std::cos(ph), std::sin(ph));
                }
                out[n] = acc.real();
            });
        },
        phi, f, workers);
}

EgorovDecomposition egorov_decompose(const MultiplierFn& a, const TorusDiffeo& phi,
                                     const ScalarField& f, int workers) {
    return egorov_impl(
        [&a](TorusPoint, const Mat2& Mi, double k1, double k2) {
            const auto [t1, t2] = Mi.apply_vec(k1, k2);
            return a(t1, t2);
        },
        [&a, workers](const ScalarField& g, const std::vector<TorusPoint>& pts,
                      std::vector<double>& out) {
            // multiplier symbols fold into the coefficients; evaluate the
            // full-band sum at the pushed-forward points
            const ScalarField h = quantize_apply(a, g);
            eval_field_at(h, pts, out, workers);
        },
        phi, f, workers);
}

} // namespace shearmix
