#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "shearmix/rng.hpp"

using namespace shearmix;

TEST_CASE("streams are pure functions of their labels") {
    RngStream a = make_stream(42, kStreamSteps, 3, 7);
    RngStream b = make_stream(42, kStreamSteps, 3, 7);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("distinct labels give distinct streams") {
    std::set<std::uint64_t> firsts;
    for (std::uint64_t s = 0; s < 64; ++s)
        for (std::uint64_t i = 0; i < 16; ++i) {
            RngStream r = make_stream(1, kStreamSteps, s, i);
            firsts.insert(r.next_u64());
        }
    CHECK(firsts.size() == 64 * 16);
}

TEST_CASE("uniform01 lies strictly inside (0,1) and has the right mean") {
    RngStream r = make_stream(7, 1);
    double acc = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = r.uniform01();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
        acc += u;
    }
    // SE of the mean is 1/sqrt(12 n)
    CHECK(std::fabs(acc / n - 0.5) < 4.0 / std::sqrt(12.0 * n));
}
