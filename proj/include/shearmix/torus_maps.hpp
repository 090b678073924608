#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "shearmix/rng.hpp"

namespace shearmix {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// reduce to [0, 2*pi)
double wrap_2pi(double t);

struct TorusPoint {
    double x = 0.0;
    double y = 0.0;
};

// One random alternating-shear time-1 map of T^2:
//   x* = x + A sin(y + gamma),  y* = y + A' sin(x* + gamma')
// (x* is computed first). Exact bijection with unit Jacobian determinant.
struct ShearMapStep {
    double A = 0.0;
    double Aprime = 0.0;
    double gamma = 0.0;
    double gammaprime = 0.0;
};

// 2x2 real matrix acting on (co)tangent vectors; row-major [[a,b],[c,d]].
struct Mat2 {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

    static Mat2 identity() { return {}; }
    double det() const { return a * d - b * c; }
    Mat2 transpose() const { return {a, c, b, d}; }
    double max_abs() const;
    // (this * m)
    Mat2 operator*(const Mat2& m) const {
        return {a * m.a + b * m.c, a * m.b + b * m.d,
                c * m.a + d * m.c, c * m.b + d * m.d};
    }
    // (this * v) with v = (vx, vy)
    std::pair<double, double> apply_vec(double vx, double vy) const {
        return {a * vx + b * vy, c * vx + d * vy};
    }
};

using CotangentFrame = Mat2;

// Ordered list of shear steps; steps[0] acts first.
struct MapSequence {
    std::uint64_t seed = 0;
    std::uint64_t sample_index = 0;
    std::vector<ShearMapStep> steps;

    std::size_t size() const { return steps.size(); }
    // first n steps of this sequence
    MapSequence prefix(std::size_t n) const;
};

// A, A', gamma, gamma' drawn iid uniform on (-pi, pi), in that order.
ShearMapStep sample_step(RngStream& rng);

// Convenience: step sampled from the stream (master, kStreamSteps, sample, step).
ShearMapStep sample_step(std::uint64_t master, std::uint64_t sample_index,
                         std::uint64_t step_index);

MapSequence sample_sequence(std::uint64_t master, std::uint64_t sample_index,
                            std::size_t n_steps);

TorusPoint apply(const ShearMapStep& s, TorusPoint p);
TorusPoint apply_inverse(const ShearMapStep& s, TorusPoint p);
TorusPoint apply(const MapSequence& seq, TorusPoint p);
TorusPoint apply_inverse(const MapSequence& seq, TorusPoint p);

// D(phi) at p: [[1, A c1], [A' c2, 1 + A A' c1 c2]], c1 = cos(y+gamma),
// c2 = cos(x*+gamma'); determinant 1 by construction.
Mat2 jacobian(const ShearMapStep& s, TorusPoint p);

// (D phi)^{-T}; for det-1 [[a,b],[c,d]] this is [[d,-c],[-b,a]].
Mat2 inv_transpose_jacobian(const ShearMapStep& s, TorusPoint p);

// (phi^n(p), (D_p phi^n)^{-T}) by chained multiplication along the orbit.
// No renormalization: entries grow like e^{lambda n}; throws
// std::overflow_error when any entry exceeds 1e300. Long horizons should go
// through projective_step instead.
std::pair<TorusPoint, Mat2> cocycle(const MapSequence& seq, TorusPoint p);

struct ProjectiveStep {
    TorusPoint x;      // phi(x)
    double angle;      // direction of Av / |Av|, in (-pi, pi]
    double log_gain;   // log |Av|, Euclidean norm
};

// One step of the projectivized cocycle on the unit cosphere bundle:
// v is the angle of a unit covector.
ProjectiveStep projective_step(const ShearMapStep& s, TorusPoint x, double v);

// Q_k functional on T^2: 1 + sup over a grid^2 of sample points of the
// max-abs partial derivatives of orders 1..k of the map and of its inverse.
// Derivatives are exact (truncated-jet arithmetic), 1 <= k <= 4.
double derivative_bound(const ShearMapStep& s, int k, int grid);

} // namespace shearmix
