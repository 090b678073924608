#pragma once

#include <functional>
#include <string>
#include <vector>

#include "shearmix/cocycle_stats.hpp"
#include "shearmix/spectral_fields.hpp"
#include "shearmix/torus_maps.hpp"

namespace shearmix {

// Smooth nonnegative dyadic partition of unity on [0, inf): quintic
// smoothstep ramps rho_N rising on [N/2, N], shells chi_N = rho_N - rho_{2N}
// for N = 2..n_max (support [N/2, 2N]) and chi_1 = 1 - rho_2 (support [0,2]).
// The telescoping makes sum_N chi_N = 1 exact on [0, n_max].
struct DyadicPartition {
    int n_max = 0;
    std::vector<int> shells;  // 2, 4, ..., n_max

    // ascending ramp for scale N: 0 below N/2, 1 above N
    static double ramp(int N, double z);
    double chi(int N, double z) const;  // N = 1 or a shell
    double sum_all(double z) const;     // includes chi_1
    double sum_shells(double z) const;  // N >= 2 only (equals rho_2 on [0,n_max])
};

DyadicPartition build_partition(int n_max);

// Periodic convolution of a PsiGrid with a nonnegative unit-mass compactly
// supported polynomial bump of radius h on (x, theta); discrete weights, so
// the min/max sandwich is exact. If h resolves no neighbor (below grid
// resolution) the input is returned unchanged and *unchanged is set.
std::vector<double> mollify(const PsiGrid& psi, double h, bool* unchanged = nullptr);

// Dyadic-shell mollified symbol
//   a_{p,eps}(x, xi) = sum_{N>=2} chi_N(|xi|) psi^{N^-eps}(x, xi/|xi|) |xi|^-p
// with the per-shell mollification scales h_N = N^-eps.
class SymbolModel {
  public:
    SymbolModel() = default;

    double p() const { return p_; }
    double eps() const { return eps_; }
    const DyadicPartition& partition() const { return partition_; }
    const PsiGrid& psi() const { return psi_; }
    int shell_count() const { return int(partition_.shells.size()); }
    // mollified psi for shell index si (aligned with partition().shells)
    const PsiGrid& bank(int si) const { return bank_[si]; }
    double h_scale(int si) const { return h_[si]; }
    bool mollify_was_noop(int si) const { return noop_[si]; }

    // a(x, k); returns 0 at k = 0
    double eval(TorusPoint x, double k1, double k2) const;

    friend SymbolModel build_symbol(const PsiGrid& psi, double eps, int n_max);

  private:
    double p_ = 0.0;
    double eps_ = 0.0;
    PsiGrid psi_;
    DyadicPartition partition_;
    std::vector<PsiGrid> bank_;
    std::vector<double> h_;
    std::vector<bool> noop_;
};

// eps in (0, 1/4); n_max covers the represented frequencies of the target grid
SymbolModel build_symbol(const PsiGrid& psi, double eps, int n_max);

// --- Kohn-Nirenberg quantization on the flat torus -------------------------
// (Op(a) f)(x) = sum_k a(x,k) fhat(k) e^{ik.x}

using MultiplierFn = std::function<double(double k1, double k2)>;
using SymbolFn = std::function<double(TorusPoint x, double k1, double k2)>;

// exact Fourier multiplier
ScalarField quantize_apply(const MultiplierFn& a, const ScalarField& f);

// general symbol by per-mode synthesis on the grid (O(N^2 * modes); meant for
// moderate N or band-limited f). Returns the real part; the imaginary part of
// the assembled field is the caller's concern via quadratic_form.
ScalarField quantize_apply(const SymbolFn& a, const ScalarField& f, int workers = 1);

// fast path for the dyadic symbol: per (shell, theta-node) Fourier multiplier
// plus a bilinear x-profile, exact for the trilinear symbol definition
ScalarField quantize_apply(const SymbolModel& S, const ScalarField& f,
                           int workers = 1);

// <Op(a) f, f> with the (2 pi)^{-2} integral normalization (matches
// sobolev_norm). The form is assembled complex, checked real to 1e-10, and
// the imaginary part is discarded only after the check.
double quadratic_form(const SymbolModel& S, const ScalarField& f, int workers = 1);
double quadratic_form(const MultiplierFn& a, const ScalarField& f);

// Hormander seminorm estimate by central finite differences over sampled
// (x, xi): sup |d^alpha_x d^beta_xi a| (1+|xi|^2)^{(-m+rho|beta|-(1-rho)|alpha|)/2}
// over |alpha|,|beta| <= k_order (k_order <= 2). x step = psi grid spacing,
// xi step = 0.5.
double seminorm_estimate(const SymbolFn& a, int k_order, double m, double rho,
                         int n_x_samples, int n_xi_samples, double xi_max,
                         double x_step, std::uint64_t seed, int workers = 1);
double seminorm_estimate(const SymbolModel& S, int k_order, double m, double rho,
                         int n_x_samples, int n_xi_samples, std::uint64_t seed,
                         int workers = 1);

// --- Egorov decomposition ---------------------------------------------------

// Diffeomorphism interface for conjugation tests: the shear family plus
// synthetic maps (translations) that are not in the family.
struct TorusDiffeo {
    std::function<TorusPoint(TorusPoint)> fwd;
    std::function<TorusPoint(TorusPoint)> inv;
    std::function<Mat2(TorusPoint)> jac;  // D phi

    static TorusDiffeo from_step(const ShearMapStep& s);
    static TorusDiffeo translation(double c1, double c2);
};

struct EgorovDecomposition {
    ScalarField main;       // Op(a o cotangent lift) f
    ScalarField remainder;  // [Op(a)(f o phi^{-1})] o phi - main
};

// main = Op(a~) f with a~(x,k) = a(phi(x), Dphi(x)^{-T} k); the conjugated
// operator is computed by exact pullback synthesis on the grid. The general
// overload is O(N^2 x N^2 x modes) and meant for moderate N; the multiplier
// overload applies Op(a) spectrally and scales to production grids.
EgorovDecomposition egorov_decompose(const SymbolFn& a, const TorusDiffeo& phi,
                                     const ScalarField& f, int workers = 1);
EgorovDecomposition egorov_decompose(const MultiplierFn& a, const TorusDiffeo& phi,
                                     const ScalarField& f, int workers = 1);

} // namespace shearmix
