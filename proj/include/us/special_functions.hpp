#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "error.hpp"
#include "quadrature.hpp"

namespace us {

inline void check_sigma(double sigma) {
    if (!(sigma > 0)) throw Error(ErrorCode::DomainError, "sigma must be positive");
}

inline double normal_pdf(double x, double mu = 0, double sigma = 1) {
    check_sigma(sigma);
    double z = (x - mu) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2 * std::numbers::pi));
}

// erfc keeps full relative accuracy in both tails.
inline double normal_cdf(double x, double mu = 0, double sigma = 1) {
    check_sigma(sigma);
    return 0.5 * std::erfc(-(x - mu) / (sigma * std::numbers::sqrt2));
}

inline double normal_sf(double x, double mu = 0, double sigma = 1) {
    check_sigma(sigma);
    return 0.5 * std::erfc((x - mu) / (sigma * std::numbers::sqrt2));
}

// phi(z) / Phi(z), stable for very negative z.
inline double normal_mills_inverse(double z) {
    if (z > -30) return normal_pdf(z) / normal_cdf(z);
    double z2 = z * z;
    // Phi(z) ~ phi(z)/|z| * (1 - 1/z^2 + 3/z^4 - 15/z^6 + 105/z^8)
    double series = 1 - 1 / z2 + 3 / (z2 * z2) - 15 / (z2 * z2 * z2) + 105 / (z2 * z2 * z2 * z2);
    return -z / series;
}

// Lanczos (g = 7, n = 9).
inline double log_gamma(double x) {
    if (!(x > 0)) throw Error(ErrorCode::DomainError, "log_gamma needs x > 0");
    static constexpr std::array<double, 9> c = {
        0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
        771.32342877765313,   -176.61502916214059,   12.507343278686905,
        -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    if (x < 0.5) return log_gamma(x + 1) - std::log(x);
    double z = x - 1;
    double s = c[0];
    for (int i = 1; i < 9; ++i) s += c[i] / (z + i);
    double t = z + 7.5;
    return 0.5 * std::log(2 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(s);
}

inline double log_beta(double a, double b) { return log_gamma(a) + log_gamma(b) - log_gamma(a + b); }

// Recurrence up to x >= 10, then the asymptotic series.
inline double digamma(double x) {
    if (!(x > 0)) throw Error(ErrorCode::DomainError, "digamma needs x > 0");
    double acc = 0;
    while (x < 10) {
        acc -= 1 / x;
        x += 1;
    }
    double r = 1 / (x * x);
    double series = r * (1.0 / 12 - r * (1.0 / 120 - r * (1.0 / 252 - r * (1.0 / 240 - r * (1.0 / 132 - r * (691.0 / 32760 - r / 12))))));
    return acc + std::log(x) - 0.5 / x - series;
}

inline double trigamma(double x) {
    if (!(x > 0)) throw Error(ErrorCode::DomainError, "trigamma needs x > 0");
    double acc = 0;
    while (x < 10) {
        acc += 1 / (x * x);
        x += 1;
    }
    double r = 1 / (x * x);
    double series = 1 / x + r / 2 + r / x * (1.0 / 6 - r * (1.0 / 30 - r * (1.0 / 42 - r * (1.0 / 30 - r * 5.0 / 66))));
    return acc + series;
}

namespace detail {

inline double gamma_series(double a, double x) {
    double ap = a, sum = 1 / a, del = sum;
    for (int n = 0; n < 10000; ++n) {
        ap += 1;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-17) break;
    }
    return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
}

// Upper tail Q(a, x) by Lentz's continued fraction.
inline double gamma_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1 - a, c = 1 / tiny, d = 1 / b, h = d;
    for (int i = 1; i < 10000; ++i) {
        double an = -i * (i - a);
        b += 2;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - log_gamma(a)) * h;
}

inline double beta_cf(double a, double b, double x) {
    const double tiny = 1e-300;
    double qab = a + b, qap = a + 1, qam = a - 1;
    double c = 1, d = 1 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1 / d;
    double h = d;
    for (int m = 1; m < 10000; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1) < 1e-16) break;
    }
    return h;
}

} // namespace detail

// Regularized lower incomplete gamma P(a, x).
inline double reg_incomplete_gamma_P(double a, double x) {
    if (!(a > 0) || x < 0) throw Error(ErrorCode::DomainError, "P(a, x) needs a > 0, x >= 0");
    if (x == 0) return 0;
    if (x < a + 1) return detail::gamma_series(a, x);
    return 1 - detail::gamma_cf(a, x);
}

inline double reg_incomplete_gamma_Q(double a, double x) {
    if (!(a > 0) || x < 0) throw Error(ErrorCode::DomainError, "Q(a, x) needs a > 0, x >= 0");
    if (x == 0) return 1;
    if (x < a + 1) return 1 - detail::gamma_series(a, x);
    return detail::gamma_cf(a, x);
}

// Regularized incomplete beta I_x(a, b).
inline double reg_incomplete_beta(double x, double a, double b) {
    if (!(a > 0) || !(b > 0) || x < 0 || x > 1) throw Error(ErrorCode::DomainError, "I_x(a, b) needs a, b > 0, 0 <= x <= 1");
    if (x == 0) return 0;
    if (x == 1) return 1;
    double lf = a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
    if (x < (a + 1) / (a + b + 2)) return std::exp(lf) * detail::beta_cf(a, b, x) / a;
    return 1 - std::exp(lf) * detail::beta_cf(b, a, 1 - x) / b;
}

inline double beta_pdf(double x, double a, double b) {
    if (x <= 0 || x >= 1) return 0;
    return std::exp((a - 1) * std::log(x) + (b - 1) * std::log1p(-x) - log_beta(a, b));
}

struct AccuracyBudget {
    double abs_tol = 1e-12;
    int max_terms = 500;
};

struct ZetaValues {
    double z = 0, d1 = 0, d2 = 0;
    int terms = 0;
};

// Z(s) and its first two derivatives: direct sum over n < N, the integral
// tail N^(1-s)/(s-1), and Euler-Maclaurin corrections at the cut. N grows
// until the first omitted correction is below the budget.
inline ZetaValues riemann_zeta_all(double s, const AccuracyBudget& budget = {}) {
    if (!(s > 1) || !std::isfinite(s)) throw Error(ErrorCode::DomainError, "zeta needs s > 1");
    // B_{2k} / (2k)!
    static constexpr std::array<double, 8> bern = {
        1.0 / 6 / 2,           -1.0 / 30 / 24,          1.0 / 42 / 720,         -1.0 / 30 / 40320,
        5.0 / 66 / 3628800,    -691.0 / 2730 / 479001600, 7.0 / 6 / 87178291200.0, -3617.0 / 510 / 20922789888000.0};
    constexpr int K = 7;
    for (int N = 8;; N *= 2) {
        if (N > budget.max_terms) N = budget.max_terms;
        double L = std::log(static_cast<double>(N));
        ZetaValues v;
        v.terms = N;
        for (int n = N - 1; n >= 1; --n) {
            double ln = std::log(static_cast<double>(n));
            double t = std::exp(-s * ln);
            v.z += t;
            v.d1 -= ln * t;
            v.d2 += ln * ln * t;
        }
        double u = s - 1;
        double T = std::exp(-u * L) / u;
        v.z += T;
        v.d1 += -T * (L + 1 / u);
        v.d2 += T * ((L + 1 / u) * (L + 1 / u) + 1 / (u * u));
        double h = 0.5 * std::exp(-s * L);
        v.z += h;
        v.d1 += -L * h;
        v.d2 += L * L * h;
        double err = 0;
        for (int k = 1; k <= K + 1; ++k) {
            // P = s (s+1) ... (s+2k-2) and its derivatives
            double P = 1, P1 = 0, P2 = 0;
            for (int j = 0; j <= 2 * k - 2; ++j) {
                double f = s + j;
                P2 = P2 * f + 2 * P1;
                P1 = P1 * f + P;
                P *= f;
            }
            double E = std::exp(-(s + 2 * k - 1) * L);
            double c = bern[k - 1];
            double t0 = c * P * E;
            double t1 = c * (P1 - L * P) * E;
            double t2 = c * (P2 - 2 * L * P1 + L * L * P) * E;
            if (k == K + 1) {
                err = std::max({std::abs(t0), std::abs(t1), std::abs(t2)});
                break;
            }
            v.z += t0;
            v.d1 += t1;
            v.d2 += t2;
        }
        if (err <= budget.abs_tol) return v;
        if (N >= budget.max_terms) throw Error(ErrorCode::BudgetExceeded, "zeta truncation error above tolerance within max_terms");
    }
}

inline double riemann_zeta(double s, const AccuracyBudget& budget = {}) { return riemann_zeta_all(s, budget).z; }
inline double riemann_zeta_deriv(double s, const AccuracyBudget& budget = {}) { return riemann_zeta_all(s, budget).d1; }
inline double riemann_zeta_deriv2(double s, const AccuracyBudget& budget = {}) { return riemann_zeta_all(s, budget).d2; }

inline double skew_normal_pdf(double x, double mu, double sigma, double alpha) {
    if (!(sigma > 0)) throw Error(ErrorCode::DomainError, "sigma must be positive");
    double z = (x - mu) / sigma;
    return 2 / sigma * normal_pdf(z) * normal_cdf(alpha * z);
}

// Integrated from mu - 12 sigma; the mass below that is under 1e-32. For large
// alpha the density lives in a band of width ~sigma/alpha next to mu, so the
// range is split there or the quadrature can miss it entirely.
inline double skew_normal_cdf(double x, double mu, double sigma, double alpha) {
    check_sigma(sigma);
    double lo = mu - 12 * sigma, hi = std::min(x, mu + 12 * sigma);
    if (x <= lo) return 0;
    auto f = [&](double t) { return skew_normal_pdf(t, mu, sigma, alpha); };
    std::vector<double> cuts = {lo, mu};
    double w = sigma / std::max(1.0, std::abs(alpha));
    for (double k : {1.0, 3.0, 8.0, 20.0}) {
        cuts.push_back(mu - k * w);
        cuts.push_back(mu + k * w);
    }
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    double v = 0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double a = std::max(cuts[i], lo), b = std::min(cuts[i + 1], hi);
        if (b > a) v += integrate(f, a, b, 1e-14);
    }
    return std::clamp(v, 0.0, 1.0);
}

} // namespace us
