#include "shearmix/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace shearmix {

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

namespace {

std::mutex g_plan_mutex;
std::map<std::pair<int, int>, fftw_plan> g_plans;

// FFTW planning is not thread safe; new-array execution is. Plans are built
// once per (N, sign) with FFTW_ESTIMATE (deterministic algorithm choice) on
// scratch buffers, then executed on caller arrays of matching alignment.
fftw_plan get_plan(int N, int sign) {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    auto it = g_plans.find({N, sign});
    if (it != g_plans.end()) return it->second;
    fftw_complex* buf = fftw_alloc_complex(static_cast<std::size_t>(N) * N);
    fftw_plan p = fftw_plan_dft_2d(N, N, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    if (!p) throw std::runtime_error("fftw plan creation failed");
    g_plans[{N, sign}] = p;
    return p;
}

void run(int N, int sign, const std::complex<double>* in, std::complex<double>* out) {
    if (!is_pow2(N)) throw std::invalid_argument("fft2: N must be a power of two");
    fftw_plan p = get_plan(N, sign);
    // FFTW does not write through the in pointer for out-of-place new-array
    // execution, but the API is non-const; in-place (in == out) is fine too.
    fftw_execute_dft(p,
                     reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

} // namespace

void fft2_forward(int N, const std::complex<double>* in, std::complex<double>* out) {
    run(N, FFTW_FORWARD, in, out);
}

void fft2_backward(int N, const std::complex<double>* in, std::complex<double>* out) {
    run(N, FFTW_BACKWARD, in, out);
}

} // namespace shearmix
