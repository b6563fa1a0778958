#pragma once

#include <array>
#include <cmath>

namespace us {

namespace detail {

inline constexpr std::array<double, 8> kronrod_x = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851, 0.864864423359769072789712788640926,
    0.741531185599394439863864773280788, 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kronrod_w = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204, 0.104790010322250183839876322541518,
    0.140653259715525918745189590510238, 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gauss_w = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780, 0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <class F>
void gk15(F& f, double a, double b, double& kronrod, double& err) {
    double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double fc = f(c);
    double k = kronrod_w[7] * fc, g = gauss_w[3] * fc;
    for (int j = 0; j < 7; ++j) {
        double dx = h * kronrod_x[j];
        double s = f(c - dx) + f(c + dx);
        k += kronrod_w[j] * s;
        if (j % 2 == 1) g += gauss_w[j / 2] * s;
    }
    kronrod = k * h;
    err = std::abs((k - g) * h);
}

template <class F>
double adaptive_gk(F& f, double a, double b, double tol, int depth) {
    double k, e;
    gk15(f, a, b, k, e);
    if (e <= tol || depth <= 0 || std::abs(b - a) < 1e-15 * (1 + std::abs(a))) return k;
    double m = 0.5 * (a + b);
    return adaptive_gk(f, a, m, 0.5 * tol, depth - 1) + adaptive_gk(f, m, b, 0.5 * tol, depth - 1);
}

} // namespace detail

// Adaptive Gauss-Kronrod (7/15) on a finite interval.
template <class F>
double integrate(F&& f, double a, double b, double abs_tol = 1e-12, int max_depth = 40) {
    if (a == b) return 0;
    if (a > b) return -integrate(f, b, a, abs_tol, max_depth);
    return detail::adaptive_gk(f, a, b, abs_tol, max_depth);
}

} // namespace us
