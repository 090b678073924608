// Acceptance suite: one criterion per function, one PASS/FAIL line each.
// Run all: `acceptance`; run one: `acceptance <1..9>`.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "shearmix/cli.hpp"
#include "shearmix/experiments.hpp"
#include "shearmix/parallel.hpp"

using namespace shearmix;

namespace {

constexpr double kPi = kTwoPi / 2.0;
constexpr std::uint64_t kSeed = 1;

struct Checker {
    bool ok = true;
    std::vector<std::string> notes;

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            notes.push_back("FAILED: " + what);
        }
    }
    void note(const std::string& what) { notes.push_back(what); }
};

EnsembleConfig default_cfg() {
    EnsembleConfig cfg;  // N=256, p=0.1, eps=0.2, delta=0.05, 200 samples, 25 steps
    cfg.seed = kSeed;
    cfg.workers = default_workers();
    return cfg;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// --- criterion 1: exactness ------------------------------------------------
void criterion_1(Checker& c) {
    RngStream rng = make_stream(kSeed, 1001);
    double max_det = 0.0, max_rt = 0.0;
    for (int i = 0; i < 10000; ++i) {
        RngStream srng = make_stream(kSeed, 1002, std::uint64_t(i));
        const ShearMapStep s = sample_step(srng);
        const TorusPoint p{rng.uniform(0.0, kTwoPi), rng.uniform(0.0, kTwoPi)};
        max_det = std::max(max_det, std::fabs(jacobian(s, p).det() - 1.0));
        const TorusPoint q = apply_inverse(s, apply(s, p));
        auto circ = [](double a, double b) {
            const double d = wrap_2pi(a - b);
            return std::min(d, kTwoPi - d);
        };
        max_rt = std::max(max_rt, std::max(circ(q.x, p.x), circ(q.y, p.y)));
    }
    c.expect(max_det <= 1e-12, "det D phi = 1 to 1e-12 (max dev " + fmt(max_det) + ")");
    c.expect(max_rt <= 1e-12, "inverse round-trip to 1e-12 (max dev " + fmt(max_rt) + ")");

    // cocycle identity to 1e-9 for n, m <= 5
    double max_cc = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        const MapSequence seq = sample_sequence(kSeed, std::uint64_t(rep) + 7000, 10);
        const TorusPoint p{rng.uniform(0.0, kTwoPi), rng.uniform(0.0, kTwoPi)};
        for (std::size_t n = 0; n <= 5; ++n)
            for (std::size_t m = 0; m <= 5; ++m) {
                const auto [pn, An] = cocycle(seq.prefix(n), p);
                MapSequence mid;
                mid.steps.assign(seq.steps.begin() + n, seq.steps.begin() + n + m);
                const auto [pm, Am] = cocycle(mid, pn);
                const auto [pw, Aw] = cocycle(seq.prefix(n + m), p);
                const Mat2 prod = Am * An;
                const double scale = std::max(1.0, Aw.max_abs());
                max_cc = std::max(max_cc,
                                  std::max(std::max(std::fabs(prod.a - Aw.a),
                                                    std::fabs(prod.b - Aw.b)),
                                           std::max(std::fabs(prod.c - Aw.c),
                                                    std::fabs(prod.d - Aw.d))) /
                                      scale);
            }
    }
    c.expect(max_cc <= 1e-9, "cocycle identity to 1e-9 (max rel dev " + fmt(max_cc) + ")");

    // Parseval to 1e-10 for random band-limited fields
    double max_par = 0.0;
    for (int rep = 0; rep < 10; ++rep) {
        RngStream frng = make_stream(kSeed, 1003, std::uint64_t(rep));
        SparseInitialData d;
        for (int m = 0; m < 16; ++m) {
            int k1 = 0, k2 = 0;
            while (k1 == 0 && k2 == 0) {
                k1 = int(std::floor(frng.uniform(-14.0, 15.0)));
                k2 = int(std::floor(frng.uniform(-14.0, 15.0)));
            }
            d.modes.push_back({k1, k2, {frng.uniform(-1.0, 1.0), frng.uniform(-1.0, 1.0)}});
        }
        const ScalarField f = field_from_sparse(d, 64);
        max_par = std::max(max_par, std::fabs(f.grid_l2() - f.sobolev_norm(0.0)) /
                                        f.sobolev_norm(0.0));
    }
    c.expect(max_par <= 1e-10, "Parseval to 1e-10 (max rel dev " + fmt(max_par) + ")");
}

// --- criterion 2: analytic oracles ------------------------------------------
void criterion_2(Checker& c) {
    // sobolev_norm(sin x, -1) = 0.5
    const int N = 64;
    std::vector<double> vals(std::size_t(N) * N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) vals[std::size_t(i) * N + j] = std::sin(kTwoPi * i / N);
    const ScalarField sinx = ScalarField::from_samples(N, std::move(vals));
    c.expect(std::fabs(sinx.sobolev_norm(-1.0) - 0.5) <= 1e-10,
             "sobolev_norm(sin x, -1) = 0.5 to 1e-10");

    // G_{2.5}(0) at K=1
    const KernelTable g(2.5, 1, 256);
    c.expect(std::fabs(g.at_zero() - 1.9637) <= 1e-3,
             "G_2.5(0) at K=1 = 1.9637 +- 1e-3 (got " + fmt(g.at_zero()) + ")");

    // quantize_apply multiplier oracle: (1+|k|^2)^{s/2} on e^{ik.x}
    SparseInitialData md;
    md.modes.push_back({3, 2, {0.5, 0.0}});
    const ScalarField mode = field_from_sparse(md, N);
    const double s = -1.7;
    const ScalarField mf = quantize_apply(
        MultiplierFn([s](double k1, double k2) {
            return std::pow(1.0 + k1 * k1 + k2 * k2, s / 2.0);
        }),
        mode);
    const double factor = std::pow(14.0, s / 2.0);
    double dev = 0.0;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            dev = std::max(dev, std::fabs(mf.value(i, j) - factor * mode.value(i, j)));
    c.expect(dev <= 1e-10, "Fourier multiplier oracle to 1e-10 (dev " + fmt(dev) + ")");

    // multiplication-operator oracle: a(x, xi) = g(x)
    SparseInitialData rd;
    rd.modes.push_back({2, -1, {0.4, 0.1}});
    rd.modes.push_back({-5, 4, {0.2, -0.3}});
    const ScalarField f = field_from_sparse(rd, 32);
    SymbolFn xonly = [](TorusPoint x, double, double) {
        return 1.0 + 0.3 * std::cos(x.x + 2.0 * x.y);
    };
    const ScalarField gf = quantize_apply(xonly, f, default_workers());
    double dev2 = 0.0;
    for (int i = 0; i < 32; ++i)
        for (int j = 0; j < 32; ++j) {
            const double gx =
                1.0 + 0.3 * std::cos(kTwoPi * i / 32.0 + 2.0 * kTwoPi * j / 32.0);
            dev2 = std::max(dev2, std::fabs(gf.value(i, j) - gx * f.value(i, j)));
        }
    c.expect(dev2 <= 1e-10, "multiplication-operator oracle to 1e-10 (dev " + fmt(dev2) + ")");

    // fit_exponential_rate on e^{-0.5 n}
    std::vector<double> ns, vs, es;
    for (int n = 0; n <= 20; ++n) {
        ns.push_back(n);
        vs.push_back(std::exp(-0.5 * n));
        es.push_back(0.0);
    }
    const RateFit fit = fit_exponential_rate(ns, vs, es);
    c.expect(std::fabs(fit.rate - 0.5) <= 1e-10 && std::fabs(fit.r2 - 1.0) <= 1e-10,
             "fit_exponential_rate recovers 0.5 with R^2 = 1 to 1e-10");
}

// --- criterion 3: degenerate dynamics ----------------------------------------
void criterion_3(Checker& c) {
    const StepSampler ident = identity_sampler();

    const LyapunovEstimate lam = top_lyapunov(100, 12, kSeed, ident, default_workers());
    c.expect(lam.value == 0.0, "identity ensemble: lambda = 0 exactly");

    const MomentLyapunovEstimate mom =
        moment_lyapunov_direct(0.3, 50, 12, kSeed, ident, default_workers());
    c.expect(std::fabs(mom.lambda) <= 1e-12, "identity ensemble: Lambda(p) = 0");

    const PsiGrid psi =
        psi_power_iteration(0.2, 8, 16, 4, 8, kSeed, ident, default_workers());
    double psidev = 0.0;
    for (double v : psi.values) psidev = std::max(psidev, std::fabs(v - 1.0));
    c.expect(psidev <= 1e-9, "identity ensemble: psi = 1 (dev " + fmt(psidev) + ")");
    c.expect(std::fabs(psi.lambda_hat) <= 1e-9, "identity ensemble: lambda_p = 0");

    EnsembleConfig cfg = default_cfg();
    cfg.sampler = ident;
    cfg.n_samples = 8;
    cfg.n_steps = 8;
    cfg.grid = 64;
    cfg.n_burn = 1;
    const MixingTrace tr = run_annealed_mixing(cfg);
    double flat = 0.0;
    for (const auto& pt : tr.delta_sq)
        flat = std::max(flat, std::fabs(pt.mean - tr.delta_sq[0].mean) /
                                  tr.delta_sq[0].mean);
    c.expect(flat <= 1e-9, "identity ensemble: flat mixing trace (dev " + fmt(flat) + ")");
    c.expect(std::fabs(tr.fit.rate) <= 1e-9, "identity ensemble: zero fitted rate");

    const QuenchedReport q = quenched_from_trace(tr, tr.mu_hat, cfg.n_steps);
    double kdev = 0.0;
    for (double k : q.K) kdev = std::max(kdev, std::fabs(k - 1.0));
    c.expect(kdev <= 1e-9, "identity ensemble: K = 1 (dev " + fmt(kdev) + ")");

    const EgorovScalingReport eg = run_egorov_scaling(cfg, {4, 8, 16}, 1);
    double egdev = 0.0;
    for (const auto& row : eg.rows) egdev = std::max(egdev, row.ratio);
    c.expect(egdev <= 1e-9, "identity ensemble: zero Egorov remainder (ratio " +
                                fmt(egdev) + ")");
}

// --- criterion 4: Lyapunov suite ---------------------------------------------
void criterion_4(Checker& c) {
    const int workers = default_workers();
    const LyapunovEstimate lam = top_lyapunov(1000, 1000, kSeed, {}, workers);
    c.note("lambda1 = " + fmt(lam.value) + " +- " + fmt(lam.stderr_));
    c.expect(lam.value - 2.576 * lam.stderr_ > 0.0,
             "lambda1 > 0 with 99% CI excluding 0");

    const LambdaCurve curve =
        lambda_curve({0.0, 0.05, 0.1, 0.2}, 32, 64, 128, 60, kSeed, {}, workers);
    const auto& p0 = curve.points[0];
    c.expect(std::fabs(p0.lambda_hat) <= 3.0 * p0.stderr_ + 1e-12,
             "Lambda(0) within 3 SE of 0 (got " + fmt(p0.lambda_hat) + ")");
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const auto& pt = curve.points[i];
        c.note("Lambda(" + fmt(pt.p) + ") = " + fmt(pt.lambda_hat) + " +- " +
               fmt(pt.stderr_));
        c.expect(pt.lambda_hat - 2.576 * pt.stderr_ > 0.0,
                 "Lambda(" + fmt(pt.p) + ") > 0 at 99% CI");
    }

    const double combined_secant = 3.0 * (curve.secant_se + lam.stderr_);
    c.note("secant slope " + fmt(curve.secant_slope) + " vs lambda1 " + fmt(lam.value) +
           " (3 combined SE " + fmt(combined_secant) + ")");
    c.expect(std::fabs(curve.secant_slope - lam.value) <= combined_secant,
             "secant slope of Lambda at 0 within 3 combined SE of lambda1");

    const MomentLyapunovEstimate direct =
        moment_lyapunov_direct(0.1, 200, 10000, kSeed, {}, workers);
    const double lam01 = curve.points[2].lambda_hat;
    const double se01 = curve.points[2].stderr_;
    c.note("direct Lambda(0.1) = " + fmt(direct.lambda) + " +- " + fmt(direct.stderr_) +
           ", power iteration " + fmt(lam01) + " +- " + fmt(se01));
    c.expect(std::fabs(direct.lambda - lam01) <= 3.0 * (direct.stderr_ + se01),
             "direct vs power-iteration Lambda(0.1) within 3 combined SE");
}

// --- criterion 5: psi and symbol ----------------------------------------------
void criterion_5(Checker& c) {
    const int workers = default_workers();
    const PsiGrid psi = psi_power_iteration(0.1, 32, 64, 128, 60, kSeed, {}, workers);
    c.note("final increment " + fmt(psi.final_increment) + ", min psi " +
           fmt(psi.min_value()));
    c.expect(psi.final_increment < 0.05, "power iteration Cauchy: final increment < 0.05");
    c.expect(psi.min_value() > 0.0, "min psi > 0");

    const DyadicPartition part = build_partition(256);
    double dev = 0.0;
    RngStream rng = make_stream(kSeed, 5001);
    for (int i = 0; i < 1000; ++i)
        dev = std::max(dev, std::fabs(part.sum_all(rng.uniform(0.0, 128.0)) - 1.0));
    c.expect(dev <= 1e-12, "partition identity to 1e-12 (dev " + fmt(dev) + ")");

    const SymbolModel S = build_symbol(psi, 0.2, 256);
    bool sandwich = true;
    for (int si = 0; si < S.shell_count(); ++si) {
        if (S.bank(si).min_value() < psi.min_value() - 1e-14) sandwich = false;
        if (S.bank(si).max_value() > psi.max_value() + 1e-14) sandwich = false;
    }
    c.expect(sandwich, "mollifier min/max sandwich holds on every shell");

    const double s1 = seminorm_estimate(S, 1, -0.1, 0.8, 64, 128, kSeed, workers);
    const double s2 = seminorm_estimate(S, 1, -0.1, 0.8, 128, 256, kSeed, workers);
    c.note("seminorm " + fmt(s1) + " -> " + fmt(s2) + " under sample doubling");
    c.expect(s2 > 0.0 && std::fabs(s2 - s1) / s2 <= 0.10,
             "seminorm estimate stable within 10% under sample doubling");
}

// --- criterion 6: inequalities --------------------------------------------------
void criterion_6(Checker& c) {
    EnsembleConfig cfg = default_cfg();
    const PsiGrid psi = psi_power_iteration(cfg.p, cfg.psi_nx, cfg.psi_ntheta,
                                            cfg.psi_maps, cfg.psi_iters, cfg.seed, {},
                                            cfg.workers);
    const SymbolModel S = build_symbol(psi, cfg.eps, cfg.grid);

    const GardingReport gd = run_garding(cfg, S);
    c.note("Garding c = " + fmt(gd.c) + ", C = " + fmt(gd.C) + ", passes " +
           std::to_string(gd.passes) + "/" + std::to_string(gd.n_validation));
    c.expect(gd.passes >= 99, "Garding sandwich holds for >= 99 of 100 fresh fields");

    const LasotaYorkeReport ly = run_lasota_yorke(cfg, S, psi.lambda_hat);
    c.note("Lasota-Yorke C = " + fmt(ly.C) + ", passes " + std::to_string(ly.passes) +
           "/" + std::to_string(int(ly.validation.size())));
    c.expect(ly.passes == int(ly.validation.size()),
             "Lasota-Yorke one-step inequality holds at 3-SE for all 20 fresh f0");

    const EgorovScalingReport eg = run_egorov_scaling(cfg, {4, 8, 16, 32}, 2);
    std::string profile;
    for (const auto& row : eg.rows) profile += " K" + std::to_string(row.band) + "=" + fmt(row.ratio);
    c.note("Egorov remainder/main:" + profile);
    c.expect(eg.strictly_decreasing,
             "Egorov remainder/main ratio strictly decreasing across K = 4,8,16,32");
}

// --- criterion 7: mixing suite ----------------------------------------------------
void criterion_7(Checker& c) {
    std::vector<double> rates;
    double first_rate_se = 0.0, first_rate = 0.0;
    for (int which = 0; which < 3; ++which) {
        EnsembleConfig cfg = default_cfg();
        const int ks[3] = {1, 6, 12};
        cfg.initial_data = cosine_mode(ks[which], 0);
        const MixingTrace tr = run_annealed_mixing(cfg);
        rates.push_back(tr.fit.rate);
        c.note("f0 |k|=" + std::to_string(ks[which]) + ": rate " + fmt(tr.fit.rate) +
               " +- " + fmt(tr.fit.rate_se) + ", R2 " + fmt(tr.fit.r2) + ", window [" +
               std::to_string(tr.fit.win_lo) + "," + std::to_string(tr.fit.win_hi) + "]");
        if (which == 0) {
            first_rate = tr.fit.rate;
            first_rate_se = tr.fit.rate_se;
            c.expect(tr.fit.rate - 2.576 * tr.fit.rate_se > 0.0,
                     "annealed rate > 0 with 99% CI excluding 0");
            c.expect(tr.fit.r2 > 0.9, "annealed fit R^2 > 0.9 (got " + fmt(tr.fit.r2) + ")");
            // every reported point passed its resolution gate by construction;
            // spot-check sample 0 against the resolution_check operation
            MapSequence seq = sample_sequence(cfg.seed, 0, cfg.n_steps);
            bool res_ok = true;
            for (std::size_t n = 0; n < tr.sample_sq[0].size(); ++n) {
                const double d = resolution_check(cfg.data(), seq.prefix(n), -cfg.delta,
                                                  cfg.grid, cfg.workers);
                if (!(d < 0.05)) res_ok = false;
            }
            c.expect(res_ok, "resolution_check < 0.05 on all reported points (sample 0)");
        }
    }
    const double rmax = std::max(std::max(rates[0], rates[1]), rates[2]);
    const double rmin = std::min(std::min(rates[0], rates[1]), rates[2]);
    const double rmean = (rates[0] + rates[1] + rates[2]) / 3.0;
    c.note("rate spread (max-min)/mean = " + fmt((rmax - rmin) / rmean));
    c.expect((rmax - rmin) / rmean <= 0.30,
             "fitted rates across 3 distinct f0 within 30% relative spread");

    EnsembleConfig cfg = default_cfg();
    const TwoPointReport tp =
        run_two_point(cfg, {kPi / 64.0, kPi / 16.0, kPi / 4.0, kPi});
    for (const auto& sep : tp.separations) {
        c.note("two-point d0=" + fmt(sep.d0) + ": alpha0 " + fmt(sep.alpha0) +
               " prefactor " + fmt(sep.prefactor));
        c.expect(sep.alpha0 > 0.0, "two-point alpha0 > 0 at d0=" + fmt(sep.d0));
    }

    const LowFreqReport lf = run_low_freq_decay(cfg);
    c.note("low-freq rate " + fmt(lf.trace.fit.rate) + " vs annealed " + fmt(first_rate));
    c.expect(lf.trace.fit.rate >= first_rate - 2.0 * first_rate_se,
             "low-frequency rate >= annealed rate - 2 fit SE");
    bool checks_ok = !lf.checks.empty();
    for (const auto& ck : lf.checks) {
        c.note("crosscheck n=" + std::to_string(ck.n) + ": spectral " +
               fmt(ck.spectral_mean) + " mc " + fmt(ck.mc_mean) + " (3 SE " +
               fmt(3.0 * ck.combined_se) + ")");
        if (!ck.pass) checks_ok = false;
    }
    c.expect(checks_ok, "spectral vs kernel-MC agreement within 3 combined SE at n in {0,5}");
}

// --- criterion 8: quenched suite -----------------------------------------------
void criterion_8(Checker& c) {
    EnsembleConfig cfg = default_cfg();
    const MixingTrace tr = run_annealed_mixing(cfg);
    const QuenchedReport q = quenched_from_trace(tr, tr.mu_hat, cfg.n_steps);
    double kmin = 1e300;
    for (double k : q.K) kmin = std::min(kmin, k);
    c.expect(kmin >= 1.0 - 1e-12, "K >= 1 - 1e-12 for every sample");
    c.note("E K^q (half, full): q=0.5: " + fmt(q.ekq_half[0]) + ", " + fmt(q.ekq_full[0]) +
           "; q=1: " + fmt(q.ekq_half[1]) + ", " + fmt(q.ekq_full[1]) + "; q=1.5: " +
           fmt(q.ekq_half[2]) + ", " + fmt(q.ekq_full[2]));
    c.expect(q.stabilization >= 0.8 && q.stabilization <= 1.2,
             "E K^1 stabilizes within 20% between half and full horizons (ratio " +
                 fmt(q.stabilization) + ")");
    c.expect(q.ekq_full[0] > 0.0 && q.ekq_full[1] > 0.0 && q.ekq_full[2] > 0.0,
             "E K^q reported for q in {0.5, 1, 1.5}");
}

// --- criterion 9: reproducibility ------------------------------------------------
void criterion_9(Checker& c) {
    auto tiny = [](int workers) {
        EnsembleConfig cfg;
        cfg.n_samples = 8;
        cfg.n_steps = 6;
        cfg.grid = 64;
        cfg.seed = kSeed;
        cfg.workers = workers;
        cfg.psi_nx = 16;
        cfg.psi_ntheta = 16;
        cfg.psi_maps = 8;
        cfg.psi_iters = 10;
        cfg.mc_pairs = 2000;
        cfg.mc_check_samples = 4;
        cfg.two_point_samples = 500;
        cfg.ly_samples = 6;
        cfg.garding_calibration = 4;
        cfg.garding_validation = 8;
        cfg.n_burn = 1;
        return cfg;
    };
    std::filesystem::remove_all("acc9_w1");
    std::filesystem::remove_all("acc9_w8");
    write_full_outputs(run_full_pipeline(tiny(1)), tiny(1), "acc9_w1");
    write_full_outputs(run_full_pipeline(tiny(8)), tiny(8), "acc9_w8");
    bool all_equal = true;
    int compared = 0;
    for (const auto& entry : std::filesystem::directory_iterator("acc9_w1")) {
        const std::string name = entry.path().filename().string();
        if (name.size() < 4 || name.substr(name.size() - 4) != ".csv") continue;
        std::ifstream a(entry.path(), std::ios::binary);
        std::ifstream b("acc9_w8/" + name, std::ios::binary);
        const std::string sa((std::istreambuf_iterator<char>(a)), {});
        const std::string sb((std::istreambuf_iterator<char>(b)), {});
        ++compared;
        if (sa != sb || sa.empty()) {
            all_equal = false;
            c.note("mismatch: " + name);
        }
    }
    c.note("compared " + std::to_string(compared) + " CSV files");
    c.expect(compared >= 5, "full pipeline emitted its CSV set");
    c.expect(all_equal, "byte-identical CSVs at worker counts 1 and 8");
    std::filesystem::remove_all("acc9_w1");
    std::filesystem::remove_all("acc9_w8");
}

const char* kNames[9] = {
    "exactness",      "analytic oracles", "degenerate dynamics",
    "Lyapunov suite", "psi and symbol",   "inequality suite",
    "mixing suite",   "quenched suite",   "reproducibility",
};

} // namespace

int main(int argc, char** argv) {
    std::vector<int> which;
    if (argc > 1) {
        for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
    } else {
        for (int i = 1; i <= 9; ++i) which.push_back(i);
    }
    const std::function<void(Checker&)> funcs[9] = {
        criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
        criterion_6, criterion_7, criterion_8, criterion_9};
    bool all_ok = true;
    for (int k : which) {
        if (k < 1 || k > 9) {
            std::fprintf(stderr, "unknown criterion %d\n", k);
            return 2;
        }
        Checker c;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            funcs[k - 1](c);
        } catch (const std::exception& e) {
            c.ok = false;
            c.notes.push_back(std::string("exception: ") + e.what());
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        for (const auto& n : c.notes) std::printf("    . %s\n", n.c_str());
        std::printf("CRITERION %d [%s] %s (%.1fs)\n", k, kNames[k - 1],
                    c.ok ? "PASS" : "FAIL", secs);
        std::fflush(stdout);
        all_ok = all_ok && c.ok;
    }
    return all_ok ? 0 : 1;
}
