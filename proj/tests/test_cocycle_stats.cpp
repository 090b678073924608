#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "shearmix/cocycle_stats.hpp"
#include "shearmix/rng.hpp"

using namespace shearmix;

namespace {
constexpr double kPi = kTwoPi / 2.0;
}

TEST_CASE("top_lyapunov: identity ensemble is exactly zero") {
    const LyapunovEstimate est = top_lyapunov(50, 20, 1, identity_sampler(), 2);
    CHECK(est.value == 0.0);
    CHECK(est.stderr_ == 0.0);
}

TEST_CASE("top_lyapunov: fixed hyperbolic step matches power iteration of the cocycle") {
    // deterministic map: the exponent equals the growth rate of |A^n v|
    // measured by direct renormalized matrix products along the same orbit
    const ShearMapStep s{2.0, 2.0, 0.0, 0.0};
    const std::size_t n = 4000;
    const LyapunovEstimate est = top_lyapunov(n, 8, 2, fixed_sampler(s), 2);

    // oracle: power iteration with explicit matrices, no projective bookkeeping
    double oracle = 0.0;
    {
        RngStream rng = make_stream(2, kStreamLyapunov, 0);
        TorusPoint x{rng.uniform(0.0, kTwoPi), rng.uniform(0.0, kTwoPi)};
        double wx = 1.0, wy = 0.0, acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const Mat2 A = inv_transpose_jacobian(s, x);
            const auto [ux, uy] = A.apply_vec(wx, wy);
            const double g = std::hypot(ux, uy);
            acc += std::log(g);
            wx = ux / g;
            wy = uy / g;
            x = apply(s, x);
        }
        oracle = acc / double(n);
    }
    CHECK(std::fabs(est.value - oracle) <= 3.0 * std::max(est.stderr_, 1e-3));
}

TEST_CASE("top_lyapunov: Pierrehumbert exponent is positive at high confidence") {
    const LyapunovEstimate est = top_lyapunov(400, 400, 3, {}, 2);
    CHECK(est.value - 2.576 * est.stderr_ > 0.0);
}

TEST_CASE("moment_lyapunov_direct: degenerate cases are exact") {
    const MomentLyapunovEstimate id = moment_lyapunov_direct(0.3, 40, 16, 4,
                                                             identity_sampler(), 2);
    CHECK(id.lambda == 0.0);
    const MomentLyapunovEstimate p0 = moment_lyapunov_direct(0.0, 40, 16, 4, {}, 2);
    CHECK(p0.lambda == 0.0);
}

TEST_CASE("psi_power_iteration: identity ensemble keeps psi = 1 exactly") {
    const PsiGrid g = psi_power_iteration(0.3, 8, 8, 4, 6, 5, identity_sampler(), 2);
    CHECK(g.lambda_hat == doctest::Approx(0.0).epsilon(1e-12));
    for (double v : g.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("psi_power_iteration: p=0 keeps the constant function") {
    const PsiGrid g = psi_power_iteration(0.0, 8, 16, 8, 10, 6, {}, 2);
    CHECK(std::fabs(g.lambda_hat) < 1e-9);
    for (double v : g.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("psi_power_iteration: Pierrehumbert p=0.1 converges to a positive psi") {
    const PsiGrid g = psi_power_iteration(0.1, 16, 32, 96, 40, 7, {}, 2);
    CHECK(g.min_value() > 0.0);
    CHECK(g.final_increment < 0.05);
    CHECK(g.lambda_hat > 0.0);

    // eigenfunction residual: e^{Lambda} P^p psi stays within 0.1 sup psi
    const auto applied = psi_apply_empirical(g, 64, 7, 999, {}, 2);
    double resid = 0.0;
    for (std::size_t i = 0; i < applied.size(); ++i)
        resid = std::max(resid,
                         std::fabs(std::exp(g.lambda_hat) * applied[i] - g.values[i]));
    CHECK(resid <= 0.1 * g.max_value());
}

TEST_CASE("interp reproduces grid nodes and is periodic") {
    PsiGrid g = PsiGrid::constant(8, 8, 0.1);
    for (std::size_t i = 0; i < g.values.size(); ++i)
        g.values[i] = 1.0 + 0.1 * double(i % 7);
    const double v = g.interp(kTwoPi * 3 / 8.0, kTwoPi * 5 / 8.0, kTwoPi * 2 / 8.0);
    CHECK(v == doctest::Approx(g.at(3, 5, 2)).epsilon(1e-12));
    const double w1 = g.interp(0.37, 1.91, 4.2);
    const double w2 = g.interp(0.37 + kTwoPi, 1.91 - kTwoPi, 4.2 + kTwoPi);
    CHECK(w1 == doctest::Approx(w2).epsilon(1e-12));
}

TEST_CASE("lambda_curve: p=0 point vanishes, curve positive, secant near lambda1") {
    const std::vector<double> ps{0.0, 0.05, 0.1, 0.2};
    const LambdaCurve curve = lambda_curve(ps, 16, 32, 96, 40, 8, {}, 2);
    CHECK(std::fabs(curve.points[0].lambda_hat) <= 3.0 * std::max(curve.points[0].stderr_, 1e-12));
    for (std::size_t i = 1; i < curve.points.size(); ++i)
        CHECK(curve.points[i].lambda_hat > 0.0);

    const LyapunovEstimate lam = top_lyapunov(400, 400, 8, {}, 2);
    const double combined = 3.0 * (curve.secant_se + lam.stderr_) + 0.02;
    CHECK(std::fabs(curve.secant_slope - lam.value) <= combined);

    // discrete convexity of the curve within statistical slack
    for (std::size_t i = 2; i < curve.points.size(); ++i) {
        const auto &a = curve.points[i - 2], &b = curve.points[i - 1],
                   &c = curve.points[i];
        const double left = (b.lambda_hat - a.lambda_hat) / (b.p - a.p);
        const double right = (c.lambda_hat - b.lambda_hat) / (c.p - b.p);
        const double se = std::sqrt(a.stderr_ * a.stderr_ + 4 * b.stderr_ * b.stderr_ +
                                    c.stderr_ * c.stderr_) /
                          (b.p - a.p);
        CHECK(right - left >= -3.0 * se);
    }
}

TEST_CASE("direct and power-iteration moment estimates agree at p=0.1") {
    const double p = 0.1;
    const MomentLyapunovEstimate direct = moment_lyapunov_direct(p, 200, 20000, 9, {}, 2);
    const PsiGrid g = psi_power_iteration(p, 16, 32, 96, 40, 9, {}, 2);
    CHECK(std::fabs(direct.lambda - g.lambda_hat) <=
          3.0 * (direct.stderr_ + g.lambda_se) + 0.01);
}

TEST_CASE("psi grid CSV dump") {
    const PsiGrid g = psi_power_iteration(0.1, 8, 8, 4, 4, 10, {}, 1);
    g.write_csv("psi_dump_test.csv");
    std::FILE* f = std::fopen("psi_dump_test.csv", "rb");
    REQUIRE(f != nullptr);
    char buf[128];
    REQUIRE(std::fgets(buf, sizeof buf, f) != nullptr);
    CHECK(std::string(buf).find("# p=") == 0);
    std::fclose(f);
    std::remove("psi_dump_test.csv");
}
