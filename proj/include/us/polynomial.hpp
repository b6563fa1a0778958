#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "types.hpp"

namespace us {

namespace detail {

// Real roots of c2 x^2 + c1 x + c0 (c2 may be zero). Cancellation-free form.
inline std::vector<double> quadratic_roots(double c2, double c1, double c0) {
    if (c2 == 0) {
        if (c1 == 0) return {};
        return {-c0 / c1};
    }
    double disc = c1 * c1 - 4 * c2 * c0;
    double scale = c1 * c1 + std::abs(4 * c2 * c0);
    if (disc < 0) {
        if (disc < -1e-14 * scale) return {};
        disc = 0;
    }
    double q = -0.5 * (c1 + (c1 >= 0 ? 1.0 : -1.0) * std::sqrt(disc));
    if (q == 0) return {0.0};
    return {q / c2, c0 / q};
}

inline double cubic_value(const std::array<double, 4>& c, double x) {
    return ((c[3] * x + c[2]) * x + c[1]) * x + c[0];
}

// Newton polish that only accepts an update when |p| shrinks.
inline double polish_cubic_root(const std::array<double, 4>& c, double x) {
    double px = cubic_value(c, x);
    for (int k = 0; k < 8 && px != 0; ++k) {
        double dp = (3 * c[3] * x + 2 * c[2]) * x + c[1];
        if (dp == 0 || !std::isfinite(dp)) break;
        double xn = x - px / dp;
        double pn = cubic_value(c, xn);
        if (!(std::abs(pn) < std::abs(px))) break;
        x = xn;
        px = pn;
    }
    return x;
}

// Real roots of c3 x^3 + c2 x^2 + c1 x + c0 with c3 != 0.
inline std::vector<double> cubic_roots(double c3, double c2, double c1, double c0) {
    std::array<double, 4> c{c0, c1, c2, c3};
    double a = c2 / c3, b = c1 / c3, d = c0 / c3;
    std::vector<double> out;
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(d)) {
        // leading coefficient negligible: behaves like a quadratic
        for (double r : quadratic_roots(c2, c1, c0)) out.push_back(polish_cubic_root(c, r));
        return out;
    }
    double Q = (a * a - 3 * b) / 9;
    double R = (2 * a * a * a - 9 * a * b + 27 * d) / 54;
    double Q3 = Q * Q * Q;
    if (R * R < Q3) {
        double th = std::acos(std::clamp(R / std::sqrt(Q3), -1.0, 1.0));
        double s = -2 * std::sqrt(Q);
        out = {s * std::cos(th / 3) - a / 3,
               s * std::cos((th + 2 * std::numbers::pi) / 3) - a / 3,
               s * std::cos((th - 2 * std::numbers::pi) / 3) - a / 3};
    } else {
        double A = -std::copysign(std::cbrt(std::abs(R) + std::sqrt(R * R - Q3)), R);
        double B = A == 0 ? 0 : Q / A;
        out = {A + B - a / 3};
        // (near-)double root: the pair collapses onto -(A+B)/2 - a/3
        double im = std::sqrt(3.0) / 2 * (A - B);
        if (std::abs(im) <= 1e-7 * std::max(1.0, std::abs(A) + std::abs(B))) out.push_back(-(A + B) / 2 - a / 3);
    }
    for (double& r : out) r = polish_cubic_root(c, r);
    return out;
}

inline double pick_directed(const std::vector<double>& roots, int direction, double origin, const Domain& domain) {
    double best = 0;
    bool found = false;
    for (double d : roots) {
        if (!std::isfinite(d) || sign_of(d) != direction) continue;
        if (!found || std::abs(d) < std::abs(best)) {
            best = d;
            found = true;
        }
    }
    if (!found) throw Error(ErrorCode::NoAdmissibleStep, "no real root in the step direction");
    if (!domain.contains(origin + best)) throw Error(ErrorCode::DomainEscape, "directed root leaves the domain");
    return best;
}

} // namespace detail

// Root of c2 d^2 + c1 d + c0 = 0 in the given direction with the smallest |d|.
inline double select_directed_root(double c2, double c1, double c0, int direction, double origin = 0,
                                   const Domain& domain = Domain::real_line()) {
    if (c0 == 0) return 0;
    return detail::pick_directed(detail::quadratic_roots(c2, c1, c0), direction, origin, domain);
}

// Same for a cubic c3 d^3 + c2 d^2 + c1 d + c0.
inline double select_directed_cubic_root(double c3, double c2, double c1, double c0, int direction, double origin = 0,
                                         const Domain& domain = Domain::real_line()) {
    if (c0 == 0) return 0;
    if (c3 == 0) return select_directed_root(c2, c1, c0, direction, origin, domain);
    return detail::pick_directed(detail::cubic_roots(c3, c2, c1, c0), direction, origin, domain);
}

// Directed root of A x^2 + B x + C = 0 written in absolute coordinates, measured from x_t.
inline double directed_root_abs(double A, double B, double C, double xt, int direction, const Domain& domain) {
    double c1 = 2 * A * xt + B;
    double c0 = (A * xt + B) * xt + C;
    return xt + select_directed_root(A, c1, c0, direction, xt, domain);
}

} // namespace us
