#include "shearmix/spectral_fields.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "shearmix/csv_io.hpp"
#include "shearmix/fft.hpp"
#include "shearmix/parallel.hpp"

namespace shearmix {

namespace {

void check_grid(int N) {
    if (N < 4 || !is_pow2(N))
        throw std::invalid_argument("ScalarField: N must be a power of two >= 4");
}

// zero the Nyquist row/column so only |k1|,|k2| <= N/2-1 are represented
void project_band(int N, std::vector<std::complex<double>>& c) {
    const int ny = N / 2;
    for (int j = 0; j < N; ++j) c[std::size_t(ny) * N + j] = 0.0;
    for (int i = 0; i < N; ++i) c[std::size_t(i) * N + ny] = 0.0;
}

} // namespace

ScalarField ScalarField::from_samples(int N, std::vector<double> samples) {
    check_grid(N);
    if (samples.size() != std::size_t(N) * N)
        throw std::invalid_argument("ScalarField: sample count != N*N");
    ScalarField f;
    f.N_ = N;
    f.values_ = std::move(samples);
    std::vector<std::complex<double>> buf(std::size_t(N) * N);
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = f.values_[i];
    f.coeffs_.resize(buf.size());
    fft2_forward(N, buf.data(), f.coeffs_.data());
    const double inv = 1.0 / (double(N) * N);
    for (auto& z : f.coeffs_) z *= inv;
    project_band(N, f.coeffs_);
    return f;
}

ScalarField ScalarField::from_coeffs(int N, std::vector<std::complex<double>> coeffs) {
    check_grid(N);
    if (coeffs.size() != std::size_t(N) * N)
        throw std::invalid_argument("ScalarField: coeff count != N*N");
    ScalarField f;
    f.N_ = N;
    f.coeffs_ = std::move(coeffs);
    project_band(N, f.coeffs_);
    std::vector<std::complex<double>> buf(f.coeffs_.size());
    fft2_backward(N, f.coeffs_.data(), buf.data());
    f.values_.resize(buf.size());
    for (std::size_t i = 0; i < buf.size(); ++i) f.values_[i] = buf[i].real();
    return f;
}

ScalarField ScalarField::zero(int N) {
    check_grid(N);
    ScalarField f;
    f.N_ = N;
    f.values_.assign(std::size_t(N) * N, 0.0);
    f.coeffs_.assign(std::size_t(N) * N, {0.0, 0.0});
    return f;
}

std::complex<double> ScalarField::coeff(int k1, int k2) const {
    const int h = N_ / 2 - 1;
    if (std::abs(k1) > h || std::abs(k2) > h) return {0.0, 0.0};
    return coeffs_[std::size_t(fft_index(k1, N_)) * N_ + fft_index(k2, N_)];
}

double ScalarField::sobolev_norm(double s) const {
    double acc = 0.0;
    for (int i = 0; i < N_; ++i) {
        const int k1 = fft_freq(i, N_);
        for (int j = 0; j < N_; ++j) {
            const int k2 = fft_freq(j, N_);
            const double m = std::norm(coeffs_[std::size_t(i) * N_ + j]);
            if (m == 0.0) continue;
            acc += std::pow(1.0 + double(k1) * k1 + double(k2) * k2, s) * m;
        }
    }
    return std::sqrt(acc);
}

double ScalarField::grid_l2() const {
    double acc = 0.0;
    for (double v : values_) acc += v * v;
    return std::sqrt(acc / (double(N_) * N_));
}

ScalarField ScalarField::operator+(const ScalarField& o) const {
    if (N_ != o.N_) throw std::invalid_argument("ScalarField: size mismatch");
    ScalarField f;
    f.N_ = N_;
    f.values_.resize(values_.size());
    f.coeffs_.resize(coeffs_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) {
        f.values_[i] = values_[i] + o.values_[i];
        f.coeffs_[i] = coeffs_[i] + o.coeffs_[i];
    }
    return f;
}

ScalarField ScalarField::operator*(double s) const {
    ScalarField f;
    f.N_ = N_;
    f.values_.resize(values_.size());
    f.coeffs_.resize(coeffs_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) {
        f.values_[i] = values_[i] * s;
        f.coeffs_[i] = coeffs_[i] * s;
    }
    return f;
}

void ScalarField::write_csv(const std::string& path, std::uint64_t seed,
                            std::size_t n_steps) const {
    CsvWriter w(path);
    w.line("# N=" + std::to_string(N_) + " seed=" + std::to_string(seed) +
           " n_steps=" + std::to_string(n_steps));
    w.line("i,j,x,y,value");
    const double h = kTwoPi / N_;
    for (int i = 0; i < N_; ++i)
        for (int j = 0; j < N_; ++j)
            w.row({double(i), double(j), i * h, j * h, value(i, j)});
}

bool SparseInitialData::mean_zero() const {
    for (const auto& m : modes)
        if (m.k1 == 0 && m.k2 == 0) return false;
    return true;
}

double SparseInitialData::l2_norm_sq() const {
    double acc = 0.0;
    for (const auto& m : modes) acc += 2.0 * std::norm(m.amp);
    return acc;
}

double synthesize(const SparseInitialData& data, TorusPoint p) {
    double acc = 0.0;
    for (const auto& m : data.modes) {
        const double ph = m.k1 * p.x + m.k2 * p.y;
        // a e^{i ph} + conj(a) e^{-i ph} = 2 Re(a e^{i ph})
        acc += 2.0 * (m.amp.real() * std::cos(ph) - m.amp.imag() * std::sin(ph));
    }
    return acc;
}

SparseInitialData cosine_mode(int k1, int k2, double phase) {
    SparseInitialData d;
    d.modes.push_back({k1, k2, 0.5 * std::exp(std::complex<double>(0.0, phase))});
    return d;
}

ScalarField field_from_sparse(const SparseInitialData& data, int N) {
    check_grid(N);
    std::vector<std::complex<double>> c(std::size_t(N) * N, {0.0, 0.0});
    const int h = N / 2 - 1;
    for (const auto& m : data.modes) {
        if (std::abs(m.k1) > h || std::abs(m.k2) > h)
            throw std::invalid_argument("field_from_sparse: mode outside the band");
        c[std::size_t(fft_index(m.k1, N)) * N + fft_index(m.k2, N)] += m.amp;
        c[std::size_t(fft_index(-m.k1, N)) * N + fft_index(-m.k2, N)] += std::conj(m.amp);
    }
    return ScalarField::from_coeffs(N, std::move(c));
}

ScalarField pullback(const SparseInitialData& data, const MapSequence& seq, int N,
                     int workers) {
    check_grid(N);
    std::vector<double> samples(std::size_t(N) * N);
    const double h = kTwoPi / N;
    parallel_for(std::size_t(N), workers, [&](std::size_t i) {
        const double x = double(i) * h;
        for (int j = 0; j < N; ++j) {
            TorusPoint p{x, j * h};
            p = apply_inverse(seq, p);
            samples[i * N + j] = synthesize(data, p);
        }
    });
    return ScalarField::from_samples(N, std::move(samples));
}

std::pair<ScalarField, ScalarField> pullback_pair(const SparseInitialData& data,
                                                  const MapSequence& seq, int N,
                                                  int workers) {
    check_grid(N);
    const int M = 2 * N;
    std::vector<double> fine(std::size_t(M) * M);
    const double h = kTwoPi / M;
    parallel_for(std::size_t(M), workers, [&](std::size_t i) {
        const double x = double(i) * h;
        for (int j = 0; j < M; ++j) {
            TorusPoint p{x, j * h};
            p = apply_inverse(seq, p);
            fine[i * M + j] = synthesize(data, p);
        }
    });
    std::vector<double> coarse(std::size_t(N) * N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            coarse[std::size_t(i) * N + j] = fine[std::size_t(2 * i) * M + 2 * j];
    return {ScalarField::from_samples(N, std::move(coarse)),
            ScalarField::from_samples(M, std::move(fine))};
}

KernelTable::KernelTable(double s, int K, int table_n) : s_(s), K_(K), n_(table_n) {
    if (s <= 1.0)
        throw std::invalid_argument("KernelTable: s must be > 1 (summability in d=2)");
    if (K < 1) throw std::invalid_argument("KernelTable: K must be >= 1");
    if (!is_pow2(table_n) || table_n < 2 * K + 2)
        throw std::invalid_argument("KernelTable: table_n must be a power of two > 2K");
    // exact truncated sum at the table nodes via one inverse DFT
    std::vector<std::complex<double>> c(std::size_t(n_) * n_, {0.0, 0.0});
    for (int k1 = -K; k1 <= K; ++k1)
        for (int k2 = -K; k2 <= K; ++k2) {
            const double w = std::pow(1.0 + double(k1) * k1 + double(k2) * k2, -s);
            c[std::size_t(fft_index(k1, n_)) * n_ + fft_index(k2, n_)] = w;
        }
    std::vector<std::complex<double>> out(c.size());
    fft2_backward(n_, c.data(), out.data());
    table_.resize(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) table_[i] = out[i].real();
}

double KernelTable::eval(double z1, double z2) const {
    const double g = n_ / kTwoPi;
    double u = (z1 - kTwoPi * std::floor(z1 / kTwoPi)) * g;
    double v = (z2 - kTwoPi * std::floor(z2 / kTwoPi)) * g;
    int i0 = static_cast<int>(u), j0 = static_cast<int>(v);
    // guard against u == n_ after rounding
    if (i0 >= n_) i0 = 0, u -= n_;
    if (j0 >= n_) j0 = 0, v -= n_;
    const double fu = u - i0, fv = v - j0;
    const int i1 = (i0 + 1) & (n_ - 1), j1 = (j0 + 1) & (n_ - 1);
    const double g00 = table_[std::size_t(i0) * n_ + j0];
    const double g01 = table_[std::size_t(i0) * n_ + j1];
    const double g10 = table_[std::size_t(i1) * n_ + j0];
    const double g11 = table_[std::size_t(i1) * n_ + j1];
    return (1 - fu) * ((1 - fv) * g00 + fv * g01) + fu * ((1 - fv) * g10 + fv * g11);
}

double KernelTable::eval_centered(double z1, double z2) const {
    return eval(z1, z2) - 1.0;
}

double KernelTable::at_zero() const { return table_[0]; }

double KernelTable::table_mean_centered() const {
    double acc = 0.0;
    for (double v : table_) acc += v - 1.0;
    return acc / double(table_.size());
}

std::pair<double, double> neg_norm_kernel_mc(const SparseInitialData& data,
                                             const MapSequence& seq,
                                             const KernelTable& kernel,
                                             std::size_t pairs, RngStream rng) {
    if (!data.mean_zero())
        throw std::invalid_argument("neg_norm_kernel_mc: initial data must be mean zero");
    if (pairs == 0) throw std::invalid_argument("neg_norm_kernel_mc: pairs must be > 0");
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t i = 0; i < pairs; ++i) {
        TorusPoint x{rng.uniform(0.0, kTwoPi), rng.uniform(0.0, kTwoPi)};
        TorusPoint y{rng.uniform(0.0, kTwoPi), rng.uniform(0.0, kTwoPi)};
        const double f0x = synthesize(data, x);
        const double f0y = synthesize(data, y);
        const TorusPoint xn = apply(seq, x);
        const TorusPoint yn = apply(seq, y);
        const double w = kernel.eval_centered(xn.x - yn.x, xn.y - yn.y) * f0x * f0y;
        sum += w;
        sum2 += w * w;
    }
    const double mean = sum / double(pairs);
    const double var = std::max(0.0, sum2 / double(pairs) - mean * mean);
    return {mean, std::sqrt(var / double(pairs))};
}

double resolution_check(const SparseInitialData& data, const MapSequence& seq,
                        double s, int N, int workers) {
    const double a = pullback(data, seq, N, workers).sobolev_norm(s);
    const double b = pullback(data, seq, 2 * N, workers).sobolev_norm(s);
    if (b == 0.0) return a == 0.0 ? 0.0 : 1.0;
    return std::fabs(b - a) / b;
}

} // namespace shearmix
