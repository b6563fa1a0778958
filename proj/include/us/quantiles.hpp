#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "solver.hpp"
#include "special_functions.hpp"

namespace us {

enum class QuantileMethod { Flb, Slub, Tlb };

// Quantile through the density's peak: b1 = -f(mode) bounds g' = -f.
inline SolveResult quantile_via_mode(const Evaluator& pdf, const Evaluator& cdf, double mode, double p, double x0,
                                     const SolveOptions& opts = {}, Domain domain = Domain::real_line()) {
    if (!(p > 0 && p < 1)) throw Error(ErrorCode::DomainError, "p must lie in (0, 1)");
    double fm = pdf(mode);
    if (!(fm > 0) || !std::isfinite(fm)) throw Error(ErrorCode::DomainError, "density at the mode must be positive and finite");
    OrientedObjective obj;
    obj.g = [cdf, p](double x) { return p - cdf(x); };
    obj.g1 = [pdf](double x) { return -pdf(x); };
    obj.domain = domain;
    return us_solve(obj, FlbConstant{-fm}, x0, opts);
}

inline OrientedObjective normal_quantile_objective(double p, double mu, double sigma) {
    OrientedObjective o;
    o.g = [=](double x) { return p - normal_cdf(x, mu, sigma); };
    o.g1 = [=](double x) { return -normal_pdf(x, mu, sigma); };
    o.g2 = [=](double x) { return (x - mu) / (sigma * sigma) * normal_pdf(x, mu, sigma); };
    o.g3 = [=](double x) {
        double z = (x - mu) / sigma;
        return (1 - z * z) / (sigma * sigma) * normal_pdf(x, mu, sigma);
    };
    return o;
}

inline BoundSpec normal_quantile_bound(double sigma, QuantileMethod m) {
    const double s2pi = std::sqrt(2 * std::numbers::pi);
    switch (m) {
    case QuantileMethod::Flb: return FlbConstant{-1 / (s2pi * sigma)};
    case QuantileMethod::Slub: {
        double c = 1 / (s2pi * sigma * sigma * std::exp(0.5));
        return Slub{-c, c};
    }
    case QuantileMethod::Tlb: return Tlb{-2 / (s2pi * sigma * sigma * sigma * std::exp(1.5))};
    }
    return FlbConstant{-1 / (s2pi * sigma)};
}

inline SolveResult normal_quantile(double p, double mu, double sigma, double x0, const SolveOptions& opts = {},
                                   QuantileMethod method = QuantileMethod::Tlb) {
    if (!(p > 0 && p < 1)) throw Error(ErrorCode::DomainError, "p must lie in (0, 1)");
    if (!(sigma > 0)) throw Error(ErrorCode::DomainError, "sigma must be positive");
    return us_solve(normal_quantile_objective(p, mu, sigma), normal_quantile_bound(sigma, method), x0, opts);
}

// Mean of the normal N(m, s^2) truncated to values below c.
inline double truncated_normal_mean_below(double m, double s, double c) {
    return m - s * normal_mills_inverse((c - m) / s);
}

struct ModeResult {
    double mode = 0;
    int n_iters = 0;
    std::vector<double> iterates;
};

// Minorize-maximize iteration for the skew-normal mode. Each update needs
// the mean of a shifted normal truncated at mu, which is available in closed form.
// alpha < 0 is handled by reflection about mu.
inline ModeResult skew_normal_mode(double mu, double sigma, double alpha, std::optional<double> s0 = std::nullopt,
                                   double tol_x = 1e-10, int max_iter = 500) {
    if (!(sigma > 0)) throw Error(ErrorCode::DomainError, "sigma must be positive");
    if (alpha == 0) return {mu, 0, {mu}};
    if (alpha < 0) {
        std::optional<double> r0;
        if (s0) r0 = 2 * mu - *s0;
        auto r = skew_normal_mode(mu, sigma, -alpha, r0, tol_x, max_iter);
        r.mode = 2 * mu - r.mode;
        for (double& x : r.iterates) x = 2 * mu - x;
        return r;
    }
    double a2 = alpha * alpha, s_star = sigma / alpha;
    double x = s0.value_or(mu);
    ModeResult r;
    r.iterates.push_back(x);
    for (int s = 1; s <= max_iter; ++s) {
        // z has density phi(z + x - mu | mu, s*^2) restricted to z < mu
        double ez = truncated_normal_mean_below(2 * mu - x, s_star, mu);
        double xn = (mu * (1 + 2 * a2) - a2 * ez) / (1 + a2);
        bool done = std::abs(xn - x) <= tol_x;
        x = xn;
        r.iterates.push_back(x);
        if (done) {
            r.mode = x;
            r.n_iters = s;
            return r;
        }
    }
    throw Error(ErrorCode::NonConvergence, "skew-normal mode iteration hit max_iter");
}

inline SolveResult skew_normal_quantile(double p, double mu, double sigma, double alpha, double x0,
                                        const SolveOptions& opts = {}) {
    auto mode = skew_normal_mode(mu, sigma, alpha);
    return quantile_via_mode([=](double x) { return skew_normal_pdf(x, mu, sigma, alpha); },
                             [=](double x) { return skew_normal_cdf(x, mu, sigma, alpha); }, mode.mode, p, x0, opts);
}

struct BetaSmallParams {
    OrientedObjective objective;
    double a = 0;
    FlbCustom bound;
    StepFunction step;
};

// Beta(alpha, beta) quantile with alpha, beta <= 1: g' = -f is bounded below by
// -a/x^2 - a/(1-x)^2, which turns each S-step into a quadratic on (0, 1).
inline BetaSmallParams beta_small_params_problem(double p, double alpha, double beta) {
    if (!(p > 0 && p < 1)) throw Error(ErrorCode::DomainError, "p must lie in (0, 1)");
    if (!(alpha > 0 && alpha <= 1 && beta > 0 && beta <= 1))
        throw Error(ErrorCode::DomainError, "shape parameters must lie in (0, 1]");
    BetaSmallParams bp;
    double xm = alpha / (alpha + beta);
    double a = std::exp(alpha * std::log(xm) + beta * std::log1p(-xm) - log_beta(alpha, beta)) / 2;
    bp.a = a;
    bp.objective.g = [=](double x) { return p - reg_incomplete_beta(x, alpha, beta); };
    bp.objective.g1 = [=](double x) { return -beta_pdf(x, alpha, beta); };
    bp.objective.domain = Domain::open(0, 1);
    bp.bound = FlbCustom{[a](double x) { return -a / (x * x) - a / ((1 - x) * (1 - x)); },
                         [a](double x) { return a / x - a / (1 - x); }};
    Domain dom = bp.objective.domain;
    bp.step = [a, dom](double xt, double gt) {
        int dir = sign_of(gt);
        if (dir == 0) return xt;
        double a1 = -gt + a / xt - a / (1 - xt);
        double a2 = -a1 - 2 * a;
        return directed_root_abs(a1, a2, a, xt, dir, dom);
    };
    return bp;
}

inline SolveResult beta_quantile_small_params(double p, double alpha, double beta, double x0, const SolveOptions& opts = {}) {
    auto bp = beta_small_params_problem(p, alpha, beta);
    return us_iterate(bp.objective, bp.step, x0, opts);
}

} // namespace us
