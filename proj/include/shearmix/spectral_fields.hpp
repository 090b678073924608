#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "shearmix/torus_maps.hpp"

namespace shearmix {

// Band-limited real scalar on an N x N torus grid with dual representation:
// samples values[i*N+j] at x_ij = (2*pi*i/N, 2*pi*j/N) and Fourier
// coefficients fhat(k) for |k1|,|k2| <= N/2-1 (the Nyquist row/column is
// projected out). Normalization: fhat(k) = (2*pi)^{-2} int f e^{-ik.x} dx,
// discretely (1/N^2) sum_x f(x) e^{-ik.x}.
class ScalarField {
  public:
    ScalarField() = default;

    static ScalarField from_samples(int N, std::vector<double> samples);
    // synthesize samples from coefficients laid out in FFT index order
    static ScalarField from_coeffs(int N, std::vector<std::complex<double>> coeffs);
    static ScalarField zero(int N);

    int size() const { return N_; }
    const std::vector<double>& values() const { return values_; }
    const std::vector<std::complex<double>>& coeffs() const { return coeffs_; }

    std::complex<double> coeff(int k1, int k2) const;

    // sqrt( sum_k (1+|k|^2)^s |fhat(k)|^2 ) over represented modes
    double sobolev_norm(double s) const;

    double value(int i, int j) const { return values_[std::size_t(i) * N_ + j]; }

    // grid L2 norm sqrt((1/N^2) sum f^2); equals sobolev_norm(0) for
    // band-limited fields (Parseval)
    double grid_l2() const;

    ScalarField operator+(const ScalarField& o) const;
    ScalarField operator*(double s) const;

    // CSV dump: header `i,j,x,y,value` preceded by the metadata line
    // `# N=<n> seed=<s> n_steps=<k>`
    void write_csv(const std::string& path, std::uint64_t seed,
                   std::size_t n_steps) const;

  private:
    int N_ = 0;
    std::vector<double> values_;
    std::vector<std::complex<double>> coeffs_;
};

// Sparse spectral initial data: each listed mode k with amplitude a stands
// for a e^{ik.x} + conj(a) e^{-ik.x}, so synthesized fields are real.
struct SparseMode {
    int k1 = 0;
    int k2 = 0;
    std::complex<double> amp{0.0, 0.0};
};

struct SparseInitialData {
    std::vector<SparseMode> modes;

    bool mean_zero() const;
    double l2_norm_sq() const; // sum over conjugate pairs of |amp|^2
};

// pointwise exact evaluation, no interpolation
double synthesize(const SparseInitialData& data, TorusPoint p);

// single cosine mode: amplitude 1 at wavevector k, i.e. cos(k.x + phase)
SparseInitialData cosine_mode(int k1, int k2, double phase = 0.0);

// exact spectral placement of sparse data on an N-grid (throws if a mode
// falls outside the represented band)
ScalarField field_from_sparse(const SparseInitialData& data, int N);

// f_n = f_0 o (phi^n)^{-1} sampled exactly on the grid: each grid point is
// pulled back through the reversed inverse steps and f_0 is evaluated by
// sparse synthesis. Spectral side via DFT of the samples.
ScalarField pullback(const SparseInitialData& data, const MapSequence& seq, int N,
                     int workers = 1);

// pullback at N and 2N in one pass (the N grid is the even-index subgrid of
// the 2N grid, so the coarse samples are bitwise those of pullback(.., N))
std::pair<ScalarField, ScalarField> pullback_pair(const SparseInitialData& data,
                                                  const MapSequence& seq, int N,
                                                  int workers = 1);

// Truncated kernel of the H^{-s} inner product:
//   G_s(z) = sum_{|k|_inf <= K} (1+|k|^2)^{-s} e^{ik.z},
// tabulated on a fine periodic grid with bilinear evaluation. K_x = G_s - 1
// is the mean-removed version (the k=0 coefficient removed).
class KernelTable {
  public:
    // requires s > 1 (absolute summability in d=2)
    KernelTable(double s, int K, int table_n = 1024);

    double s() const { return s_; }
    int truncation() const { return K_; }

    double eval(double z1, double z2) const;            // G_s(z)
    double eval_centered(double z1, double z2) const;   // K_x(z) = G_s(z) - 1
    double at_zero() const;                             // exact table value at z=0
    double table_mean_centered() const;                 // spatial mean of K_x

  private:
    double s_ = 0.0;
    int K_ = 0;
    int n_ = 0;
    std::vector<double> table_;
};

// Monte-Carlo estimate of ||f_n||^2_{H^{-s}} for one realization:
// mean over uniform pairs (x,y) of K_x(phi^n(x) - phi^n(y)) f0(x) f0(y),
// which equals the (2*pi)^{-4}-normalized double integral. Returns
// (estimate, stderr). Requires mean-zero data and s > 1.
std::pair<double, double> neg_norm_kernel_mc(const SparseInitialData& data,
                                             const MapSequence& seq,
                                             const KernelTable& kernel,
                                             std::size_t pairs, RngStream rng);

// |norm(2N) - norm(N)| / norm(2N) for sobolev_norm(pullback(.), s); 0 when
// both vanish. Certifies reported norms against aliasing.
double resolution_check(const SparseInitialData& data, const MapSequence& seq,
                        double s, int N, int workers = 1);

} // namespace shearmix
