#pragma once

#include <complex>
#include <vector>

namespace shearmix {

// 2D complex DFTs on N x N arrays (row-major), N a power of two. Thin wrapper
// over FFTW: plans are cached per (N, direction) and executed on caller
// buffers, so transforms are safe to call from worker threads and bitwise
// reproducible for a given N.
//
// forward:  out(k) = sum_x in(x) e^{-i k.x}   (unnormalized)
// backward: out(x) = sum_k in(k) e^{+i k.x}
void fft2_forward(int N, const std::complex<double>* in, std::complex<double>* out);
void fft2_backward(int N, const std::complex<double>* in, std::complex<double>* out);

// frequency of array index i in an N-point transform, in [-N/2, N/2)
inline int fft_freq(int i, int N) { return i < N / 2 ? i : i - N; }
// array index of frequency k
inline int fft_index(int k, int N) { return k >= 0 ? k : k + N; }

bool is_pow2(int n);

} // namespace shearmix
