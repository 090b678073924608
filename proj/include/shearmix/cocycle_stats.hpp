#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "shearmix/rng.hpp"
#include "shearmix/torus_maps.hpp"

namespace shearmix {

// Ensemble law of one map step. The default draws Pierrehumbert shears with
// iid uniform(-pi,pi) parameters; tests substitute degenerate laws.
using StepSampler = std::function<ShearMapStep(RngStream&)>;

StepSampler pierrehumbert_sampler();
StepSampler identity_sampler();
StepSampler fixed_sampler(const ShearMapStep& s);

struct LyapunovEstimate {
    double value = 0.0;    // per-step exponent
    double stderr_ = 0.0;  // across-sample standard error
    std::size_t n_steps = 0;
    std::size_t n_samples = 0;
};

// Top Lyapunov exponent of the inverse-transpose cocycle: averages
// (1/n) sum log|A v| along projective orbits from uniform (x, v).
LyapunovEstimate top_lyapunov(std::size_t n_steps, std::size_t n_samples,
                              std::uint64_t seed, const StepSampler& sampler = {},
                              int workers = 1);

// Running per-step means across samples (convergence trace for the CLI).
std::vector<LyapunovEstimate> top_lyapunov_trace(std::size_t n_steps,
                                                 std::size_t n_samples,
                                                 std::uint64_t seed,
                                                 const StepSampler& sampler = {},
                                                 int workers = 1);

struct MomentLyapunovEstimate {
    double lambda = 0.0;        // Lambda(p) estimate
    double stderr_ = 0.0;       // delta-method standard error
    double ess_fraction = 1.0;  // mean(w)^2 / mean(w^2) of the exp weights
    bool unreliable = false;    // ess_fraction < 0.01 (heavy-tail warning)
    std::size_t n_steps = 0;
    std::size_t n_samples = 0;
};

// Direct estimator Lambda(p) = -(1/n) log mean exp(-p sum log|Av|).
MomentLyapunovEstimate moment_lyapunov_direct(double p, std::size_t n_steps,
                                              std::size_t n_samples,
                                              std::uint64_t seed,
                                              const StepSampler& sampler = {},
                                              int workers = 1);

// Sampled dominant eigenfunction psi_p of the twisted semigroup on an
// (x, theta) grid, positive and sup-normalized; lambda_p = e^{-Lambda(p)}.
struct PsiGrid {
    int nx = 0;
    int ntheta = 0;
    double p = 0.0;
    std::vector<double> values;  // [(ix*nx + iy)*ntheta + it]

    double lambda_p = 1.0;       // e^{-Lambda_hat}
    double lambda_hat = 0.0;     // Lambda_hat(p) from sup-factor decay
    double lambda_se = 0.0;      // stderr of the mean log-factor
    double final_increment = 0.0;  // sup |psi_T - psi_{T-1}|
    std::vector<double> factors;   // per-iteration sup factors

    double at(int ix, int iy, int it) const {
        return values[(std::size_t(ix) * nx + iy) * ntheta + it];
    }
    // periodic trilinear interpolation; theta in any branch
    double interp(double x, double y, double theta) const;
    double min_value() const;
    double max_value() const;

    static PsiGrid constant(int nx, int ntheta, double p);

    // CSV dump `ix,iy,itheta,value` with `# p=.. nx=.. ntheta=.. lambda_p=..`
    void write_csv(const std::string& path) const;
};

// Power iteration for psi_p starting from the constant 1: each iteration
// averages |A v|^{-p} psi(phi(x), v1) over m map samples shared across all
// grid nodes, records the sup as the eigenvalue factor and renormalizes.
// Lambda_hat(p) = -log(geometric mean of the last n_iters/2 factors).
PsiGrid psi_power_iteration(double p, int nx, int ntheta, int n_maps_per_iter,
                            int n_iters, std::uint64_t seed,
                            const StepSampler& sampler = {}, int workers = 1);

// One empirical application of e^{Lambda_hat} P^p to the grid with fresh
// maps (residual diagnostics).
std::vector<double> psi_apply_empirical(const PsiGrid& psi, int n_maps,
                                        std::uint64_t seed, std::uint64_t label,
                                        const StepSampler& sampler = {},
                                        int workers = 1);

struct LambdaCurvePoint {
    double p = 0.0;
    double lambda_hat = 0.0;
    double stderr_ = 0.0;
};

struct LambdaCurve {
    std::vector<LambdaCurvePoint> points;
    std::vector<PsiGrid> grids;     // aligned with points
    double secant_slope = 0.0;      // (L(p1)-L(p0))/(p1-p0)
    double secant_se = 0.0;
    std::string warnings;
};

// Lambda_hat(p) over a sorted p_list in [0, 0.5] via psi_power_iteration,
// with the secant slope at 0. Map batches are shared across p (common
// random numbers).
LambdaCurve lambda_curve(const std::vector<double>& p_list, int nx, int ntheta,
                         int n_maps_per_iter, int n_iters, std::uint64_t seed,
                         const StepSampler& sampler = {}, int workers = 1);

} // namespace shearmix
