#pragma once

#include <array>
#include <cmath>

namespace shearmix {

// Bivariate truncated Taylor polynomial of total order <= 4 around a point:
// coefficient c[i][j] multiplies dx^i dy^j / (i! j!)... stored as plain
// monomial coefficients, so the (i,j) partial derivative is c[i][j]*i!*j!.
// Enough arithmetic (+, *, sin) to push jets through the shear maps exactly.
struct Jet2 {
    static constexpr int kOrder = 4;
    // c[i][j] valid for i + j <= 4
    std::array<std::array<double, kOrder + 1>, kOrder + 1> c{};

    static Jet2 constant(double v) {
        Jet2 j;
        j.c[0][0] = v;
        return j;
    }
    // the coordinate x0 + dx
    static Jet2 var_x(double x0) {
        Jet2 j;
        j.c[0][0] = x0;
        j.c[1][0] = 1.0;
        return j;
    }
    static Jet2 var_y(double y0) {
        Jet2 j;
        j.c[0][0] = y0;
        j.c[0][1] = 1.0;
        return j;
    }

    double partial(int i, int j) const {
        static constexpr double fact[5] = {1, 1, 2, 6, 24};
        return c[i][j] * fact[i] * fact[j];
    }

    Jet2 operator+(const Jet2& o) const {
        Jet2 r;
        for (int i = 0; i <= kOrder; ++i)
            for (int j = 0; i + j <= kOrder; ++j) r.c[i][j] = c[i][j] + o.c[i][j];
        return r;
    }
    Jet2 operator-(const Jet2& o) const {
        Jet2 r;
        for (int i = 0; i <= kOrder; ++i)
            for (int j = 0; i + j <= kOrder; ++j) r.c[i][j] = c[i][j] - o.c[i][j];
        return r;
    }
    Jet2 operator*(double s) const {
        Jet2 r;
        for (int i = 0; i <= kOrder; ++i)
            for (int j = 0; i + j <= kOrder; ++j) r.c[i][j] = c[i][j] * s;
        return r;
    }
    Jet2 operator+(double s) const {
        Jet2 r = *this;
        r.c[0][0] += s;
        return r;
    }
    // truncated product
    Jet2 operator*(const Jet2& o) const {
        Jet2 r;
        for (int i = 0; i <= kOrder; ++i)
            for (int j = 0; i + j <= kOrder; ++j) {
                if (c[i][j] == 0.0) continue;
                for (int k = 0; i + k <= kOrder; ++k)
                    for (int l = 0; i + j + k + l <= kOrder; ++l)
                        r.c[i + k][j + l] += c[i][j] * o.c[k][l];
            }
        return r;
    }
};

// sin of a jet: split f = f0 + g with g the zero-constant part, then
// sin(f) = sin(f0) cos(g) + cos(f0) sin(g) with series truncated at order 4:
// sin(g) = g - g^3/6, cos(g) = 1 - g^2/2 + g^4/24 (exact at this truncation).
inline Jet2 sin(const Jet2& f) {
    const double f0 = f.c[0][0];
    Jet2 g = f;
    g.c[0][0] = 0.0;
    const Jet2 g2 = g * g;
    const Jet2 g3 = g2 * g;
    const Jet2 g4 = g2 * g2;
    const Jet2 sing = g - g3 * (1.0 / 6.0);
    const Jet2 cosg = (g4 * (1.0 / 24.0) - g2 * 0.5) + 1.0;
    return sing * std::cos(f0) + cosg * std::sin(f0);
}

} // namespace shearmix
