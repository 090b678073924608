#include "shearmix/torus_maps.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "shearmix/jet2.hpp"

namespace shearmix {

double wrap_2pi(double t) {
    double r = t - kTwoPi * std::floor(t / kTwoPi);
    // floor rounding can land exactly on 2*pi
    if (r >= kTwoPi) r -= kTwoPi;
    if (r < 0.0) r += kTwoPi;
    return r;
}

double Mat2::max_abs() const {
    return std::max(std::max(std::fabs(a), std::fabs(b)),
                    std::max(std::fabs(c), std::fabs(d)));
}

MapSequence MapSequence::prefix(std::size_t n) const {
    MapSequence s;
    s.seed = seed;
    s.sample_index = sample_index;
    s.steps.assign(steps.begin(), steps.begin() + std::min(n, steps.size()));
    return s;
}

ShearMapStep sample_step(RngStream& rng) {
    constexpr double pi = kTwoPi / 2.0;
    ShearMapStep s;
    s.A = rng.uniform(-pi, pi);
    s.Aprime = rng.uniform(-pi, pi);
    s.gamma = rng.uniform(-pi, pi);
    s.gammaprime = rng.uniform(-pi, pi);
    return s;
}

ShearMapStep sample_step(std::uint64_t master, std::uint64_t sample_index,
                         std::uint64_t step_index) {
    RngStream rng = make_stream(master, kStreamSteps, sample_index, step_index);
    return sample_step(rng);
}

MapSequence sample_sequence(std::uint64_t master, std::uint64_t sample_index,
                            std::size_t n_steps) {
    MapSequence seq;
    seq.seed = master;
    seq.sample_index = sample_index;
    seq.steps.reserve(n_steps);
    for (std::size_t i = 0; i < n_steps; ++i)
        seq.steps.push_back(sample_step(master, sample_index, i));
    return seq;
}

TorusPoint apply(const ShearMapStep& s, TorusPoint p) {
    const double xs = wrap_2pi(p.x + s.A * std::sin(p.y + s.gamma));
    const double ys = wrap_2pi(p.y + s.Aprime * std::sin(xs + s.gammaprime));
    return {xs, ys};
}

TorusPoint apply_inverse(const ShearMapStep& s, TorusPoint p) {
    // undo the second shear first; closed form, no iteration
    const double y = wrap_2pi(p.y - s.Aprime * std::sin(p.x + s.gammaprime));
    const double x = wrap_2pi(p.x - s.A * std::sin(y + s.gamma));
    return {x, y};
}

TorusPoint apply(const MapSequence& seq, TorusPoint p) {
    for (const auto& s : seq.steps) p = apply(s, p);
    return p;
}

TorusPoint apply_inverse(const MapSequence& seq, TorusPoint p) {
    for (auto it = seq.steps.rbegin(); it != seq.steps.rend(); ++it)
        p = apply_inverse(*it, p);
    return p;
}

Mat2 jacobian(const ShearMapStep& s, TorusPoint p) {
    const double c1 = std::cos(p.y + s.gamma);
    const double xs = p.x + s.A * std::sin(p.y + s.gamma);
    const double c2 = std::cos(xs + s.gammaprime);
    const double b = s.A * c1;
    const double c = s.Aprime * c2;
    return {1.0, b, c, 1.0 + b * c};
}

Mat2 inv_transpose_jacobian(const ShearMapStep& s, TorusPoint p) {
    const Mat2 m = jacobian(s, p);
    return {m.d, -m.c, -m.b, m.a};
}

std::pair<TorusPoint, Mat2> cocycle(const MapSequence& seq, TorusPoint p) {
    Mat2 acc = Mat2::identity();
    TorusPoint q = p;
    for (const auto& s : seq.steps) {
        acc = inv_transpose_jacobian(s, q) * acc;
        if (acc.max_abs() > 1e300)
            throw std::overflow_error(
                "cocycle entries exceeded 1e300; use projective_step for long horizons");
        q = apply(s, q);
    }
    return {q, acc};
}

ProjectiveStep projective_step(const ShearMapStep& s, TorusPoint x, double v) {
    const Mat2 m = inv_transpose_jacobian(s, x);
    const auto [wx, wy] = m.apply_vec(std::cos(v), std::sin(v));
    const double gain = std::hypot(wx, wy);
    return {apply(s, x), std::atan2(wy, wx), std::log(gain)};
}

namespace {

double max_partials(const Jet2& jx, const Jet2& jy, int k) {
    double m = 0.0;
    for (int ord = 1; ord <= k; ++ord)
        for (int i = 0; i <= ord; ++i) {
            const int j = ord - i;
            m = std::max(m, std::fabs(jx.partial(i, j)));
            m = std::max(m, std::fabs(jy.partial(i, j)));
        }
    return m;
}

} // namespace

double derivative_bound(const ShearMapStep& s, int k, int grid) {
    if (k < 1 || k > Jet2::kOrder)
        throw std::invalid_argument("derivative_bound: k must be in [1,4]");
    if (grid < 1) throw std::invalid_argument("derivative_bound: grid must be >= 1");
    double sup = 0.0;
    const double h = kTwoPi / grid;
    for (int i = 0; i < grid; ++i) {
        for (int j = 0; j < grid; ++j) {
            const double x0 = i * h, y0 = j * h;
            // forward map
            {
                const Jet2 X = Jet2::var_x(x0), Y = Jet2::var_y(y0);
                const Jet2 xs = X + sin(Y + s.gamma) * s.A;
                const Jet2 ys = Y + sin(xs + s.gammaprime) * s.Aprime;
                sup = std::max(sup, max_partials(xs, ys, k));
            }
            // inverse map, expanded around the same grid of target points
            {
                const Jet2 Xs = Jet2::var_x(x0), Ys = Jet2::var_y(y0);
                const Jet2 Y = Ys - sin(Xs + s.gammaprime) * s.Aprime;
                const Jet2 X = Xs - sin(Y + s.gamma) * s.A;
                sup = std::max(sup, max_partials(X, Y, k));
            }
        }
    }
    return 1.0 + sup;
}

} // namespace shearmix
