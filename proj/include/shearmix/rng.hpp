#pragma once

#include <cstdint>

namespace shearmix {

// Counter-based random stream. A draw is a pure function of (key, counter),
// where the key is derived from the master seed and a label path such as
// (sample index, step index). Any draw can therefore be produced independently
// of scheduling, which is what makes ensemble runs reproducible at every
// worker count.
struct RngStream {
    std::uint64_t key = 0;
    std::uint64_t ctr = 0;

    std::uint64_t next_u64();

    // uniform on the open interval (0,1), 53-bit resolution
    double uniform01();

    // uniform on the open interval (a,b)
    double uniform(double a, double b);
};

// Mix one label into a stream key (splitmix64 finalizer chain).
std::uint64_t rng_derive(std::uint64_t key, std::uint64_t label);

RngStream make_stream(std::uint64_t master, std::uint64_t l1);
RngStream make_stream(std::uint64_t master, std::uint64_t l1, std::uint64_t l2);
RngStream make_stream(std::uint64_t master, std::uint64_t l1, std::uint64_t l2,
                      std::uint64_t l3);

// Label namespace for the major consumers, so independent sub-experiments
// never collide on a stream.
enum StreamLabel : std::uint64_t {
    kStreamSteps = 1,      // map-step sampling: (kStreamSteps, sample, step)
    kStreamPairs = 2,      // kernel Monte-Carlo pair sampling
    kStreamPsi = 3,        // power-iteration map batches
    kStreamTwoPoint = 4,   // two-point motion ensembles
    kStreamFields = 5,     // random field generation (Garding batches etc.)
    kStreamLyapunov = 6,   // starting points for Lyapunov ensembles
    kStreamSeminorm = 7,   // (x, xi) sampling for seminorm estimation
    kStreamLasotaYorke = 8,
    kStreamGarding = 9,
    kStreamEgorov = 10,
};

} // namespace shearmix
