#include "shearmix/rng.hpp"

namespace shearmix {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// splitmix64 output function
inline std::uint64_t fin(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace

std::uint64_t rng_derive(std::uint64_t key, std::uint64_t label) {
    return fin(key ^ fin(label + kGolden));
}

std::uint64_t RngStream::next_u64() {
    ctr += 1;
    return fin(key + ctr * kGolden);
}

double RngStream::uniform01() {
    // (n + 0.5) / 2^53 with n in [0, 2^53): never exactly 0 or 1
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::uniform(double a, double b) {
    return a + (b - a) * uniform01();
}

RngStream make_stream(std::uint64_t master, std::uint64_t l1) {
    return RngStream{rng_derive(fin(master + kGolden), l1), 0};
}

RngStream make_stream(std::uint64_t master, std::uint64_t l1, std::uint64_t l2) {
    return RngStream{rng_derive(rng_derive(fin(master + kGolden), l1), l2), 0};
}

RngStream make_stream(std::uint64_t master, std::uint64_t l1, std::uint64_t l2,
                      std::uint64_t l3) {
    return RngStream{
        rng_derive(rng_derive(rng_derive(fin(master + kGolden), l1), l2), l3), 0};
}

} // namespace shearmix
