#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shearmix/cocycle_stats.hpp"
#include "shearmix/spectral_fields.hpp"
#include "shearmix/symbol_calculus.hpp"

namespace shearmix {

struct EnsembleConfig {
    std::size_t n_samples = 200;
    std::size_t n_steps = 25;
    int grid = 256;
    double p = 0.1;
    double eps = 0.2;            // 1/5
    double delta = 0.05;         // p/2 unless overridden
    double s_low = 2.5;          // (d+3)/2 in d=2
    std::uint64_t seed = 1;
    int workers = 1;
    SparseInitialData initial_data;  // defaults to cos(x) when empty

    // psi_p / symbol settings
    int psi_nx = 32;
    int psi_ntheta = 64;
    int psi_maps = 128;
    int psi_iters = 60;

    int kernel_K = 64;               // kernel truncation for H^{-s_low}
    std::size_t mc_pairs = 200000;   // kernel Monte-Carlo pairs per realization
    std::size_t mc_check_samples = 24;  // realizations cross-checked at n in {0,5}
    std::size_t two_point_samples = 20000;
    std::size_t ly_samples = 40;     // single-step ensemble per f0
    int garding_calibration = 10;
    int garding_validation = 100;
    int n_burn = 5;                  // fit window starts here
    double resolution_tol = 0.05;

    StepSampler sampler;             // Pierrehumbert when empty

    EnsembleConfig();
    const SparseInitialData& data() const { return initial_data; }
    void set_p(double new_p, bool keep_delta = false);
};

struct RateFit {
    double rate = 0.0;       // decay rate of the fitted series
    double intercept = 0.0;  // log-scale intercept
    double r2 = 0.0;
    double rate_se = 0.0;
    int win_lo = 0;
    int win_hi = 0;          // inclusive
    std::string warning;
};

// Weighted least squares of log(value) = intercept - rate * n; weights from
// the log-scale standard errors, R^2 on the log scale. Non-positive values
// truncate the window with a warning.
RateFit fit_exponential_rate(const std::vector<double>& ns,
                             const std::vector<double>& values,
                             const std::vector<double>& stderrs);

struct TracePoint {
    double mean = 0.0;
    double se = 0.0;
    std::size_t count = 0;
};

struct MixingTrace {
    std::vector<double> ns;                 // 0..last reported step
    std::vector<TracePoint> delta_sq;       // ||f_n||^2_{H^{-delta}}
    std::vector<TracePoint> low_sq;         // ||f_n||^2_{H^{-s_low}}
    std::vector<TracePoint> quad_form;      // optional <Op(a) f_n, f_n>
    RateFit fit;                            // fit of the primary series
    double mu_hat = 0.0;                    // fit.rate / 2 (E||f_n||^2 ~ e^{-2 mu n})
    std::string primary;                    // "delta" or "low"
    std::vector<std::size_t> cutoffs;       // per sample: first gated step index
    std::vector<std::vector<double>> sample_sq;  // per-sample primary series (squares)
};

// Annealed mixing ensemble: per sample a fresh MapSequence, per step the
// squared H^{-delta} norm via exact pullback, gated by resolution_check
// against the doubled grid; weighted-fit of the ensemble mean over
// [n_burn, last well-populated step]. When a symbol is supplied the
// quadratic-form trace is recorded on a capped sub-ensemble.
MixingTrace run_annealed_mixing(const EnsembleConfig& cfg,
                                const SymbolModel* S = nullptr);

struct CrossCheckPoint {
    std::size_t n = 0;
    double spectral_mean = 0.0;
    double mc_mean = 0.0;
    double combined_se = 0.0;
    bool pass = false;  // |spectral - mc| <= 3 combined SE
};

struct LowFreqReport {
    MixingTrace trace;  // primary = H^{-s_low}
    std::vector<CrossCheckPoint> checks;
};

// Same ensemble protocol for the H^{-s_low} norm, with kernel-MC cross-checks
// at n in {0, 5}.
LowFreqReport run_low_freq_decay(const EnsembleConfig& cfg);

struct TwoPointSeparation {
    double d0 = 0.0;
    std::vector<TracePoint> trace;  // mean K_x(phi^n x, phi^n y) per n
    RateFit fit;                    // fit of |mean|
    double alpha0 = 0.0;
    double prefactor = 0.0;         // exp(intercept)
};

struct TwoPointReport {
    std::vector<TwoPointSeparation> separations;
};

// Two-point kernel statistics: pairs (x, x + d0 e) with uniform x and
// direction, tracked through a fresh sequence each; fits the decay of
// |E K_x(phi^n x, phi^n y)| per separation.
TwoPointReport run_two_point(const EnsembleConfig& cfg,
                             const std::vector<double>& separations);

struct LasotaYorkeRow {
    std::string label;
    double lhs_mean = 0.0;   // E <Op(a) f_1, f_1>
    double lhs_se = 0.0;
    double rhs_form = 0.0;   // <Op(a) f_0, f_0>
    double low_norm_sq = 0.0;  // ||f_0||^2_{H^{-(p+eps)/2}}
    double residual = 0.0;   // lhs - e^{-Lambda} rhs
    bool pass = false;
};

struct LasotaYorkeReport {
    double lambda_hat = 0.0;
    double C = 0.0;  // fitted on the calibration batch
    std::vector<LasotaYorkeRow> calibration;
    std::vector<LasotaYorkeRow> validation;
    int passes = 0;
};

// One-step inequality E<Op(a)f1,f1> <= e^{-Lambda(p)} <Op(a)f0,f0> +
// C ||f0||^2_{H^{-(p+eps)/2}}: C fitted on 10 calibration f0, validated at
// 3-SE confidence on 20 fresh ones.
LasotaYorkeReport run_lasota_yorke(const EnsembleConfig& cfg, const SymbolModel& S,
                                   double lambda_hat);

struct GardingReport {
    double c = 0.0;
    double C = 0.0;
    int passes = 0;
    int n_validation = 0;
    std::vector<double> forms;  // validation Q(f) values
};

// Calibrate c, C on one batch of random fields, then validate
// c||f||^2_{H^{-p/2}} - C||f||^2_{H^{-s_low}} <= <Op(a)f,f> <= C||f||^2_{H^{-p/2}}
// on fresh fields.
GardingReport run_garding(const EnsembleConfig& cfg, const SymbolModel& S);

struct EgorovScalingRow {
    int band = 0;
    double ratio = 0.0;  // ||remainder||_L2 / ||main||_L2, averaged over steps
};

struct EgorovScalingReport {
    std::vector<EgorovScalingRow> rows;
    bool strictly_decreasing = false;
};

// Remainder/main ratio of the Egorov decomposition for the multiplier
// (1+|xi|^2)^{-p/2} on random band-limited fields across band limits.
EgorovScalingReport run_egorov_scaling(const EnsembleConfig& cfg,
                                       const std::vector<int>& bands,
                                       int n_steps_avg = 2);

struct QuenchedReport {
    std::vector<double> K;       // per sample
    std::size_t horizon_half = 0;
    std::size_t horizon_full = 0;
    // empirical moments E K^q for q in {0.5, 1, 1.5} at both horizons
    double ekq_half[3] = {0, 0, 0};
    double ekq_full[3] = {0, 0, 0};
    double stabilization = 0.0;  // EK^1(full) / EK^1(half)
};

// K(f0) = max_{n <= horizon} e^{mu_hat n / 2} ||f_n|| / ||f_0|| per sample,
// from the annealed ensemble of cfg (identical streams).
QuenchedReport run_quenched(const EnsembleConfig& cfg, double mu_hat);
QuenchedReport quenched_from_trace(const MixingTrace& trace, double mu_hat,
                                   std::size_t n_steps);

struct FullPipelineReport {
    LambdaCurve curve;
    PsiGrid psi;
    double seminorm = 0.0;
    double seminorm_doubled = 0.0;
    GardingReport garding;
    EgorovScalingReport egorov;
    LasotaYorkeReport lasota_yorke;
    TwoPointReport two_point;
    LowFreqReport low_freq;
    MixingTrace annealed;
    QuenchedReport quenched;
    double mu_hat = 0.0;             // annealed fit.rate / 2
    double rate_bound = 0.0;         // min{Lambda_hat(p)/2, alpha0_hat}
    std::vector<std::pair<std::string, bool>> flags;
};

// The whole chain at one config: Lambda curve, psi_p, symbol, Garding,
// Egorov scaling, Lasota-Yorke, two-point, low-frequency, annealed, quenched,
// plus the mu_hat vs min{Lambda(p)/2, alpha0} comparison.
FullPipelineReport run_full_pipeline(const EnsembleConfig& cfg);

} // namespace shearmix
