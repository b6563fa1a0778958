#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "solver.hpp"
#include "special_functions.hpp"

namespace us {

struct Sample {
    std::vector<double> values;
    std::size_t n = 0;
    double mean = 0;
    double variance = 0; // unbiased
    double G = 0;        // mean of logs; NaN unless all values > 0
    double T_max = 0;    // max (log x_i)^2
    double x_max = 0;
    double x_min = 0;

    static Sample from(std::vector<double> v) {
        Sample s;
        s.values = std::move(v);
        s.n = s.values.size();
        if (s.n < 2) throw Error(ErrorCode::DegenerateSample, "need at least two observations");
        double sum = 0;
        bool positive = true;
        s.x_max = s.x_min = s.values[0];
        for (double x : s.values) {
            if (!std::isfinite(x)) throw Error(ErrorCode::DomainError, "non-finite observation");
            sum += x;
            positive = positive && x > 0;
            s.x_max = std::max(s.x_max, x);
            s.x_min = std::min(s.x_min, x);
        }
        s.mean = sum / s.n;
        double ss = 0;
        for (double x : s.values) ss += (x - s.mean) * (x - s.mean);
        s.variance = ss / (s.n - 1);
        s.G = std::numeric_limits<double>::quiet_NaN();
        if (positive) {
            double lg = 0;
            for (double x : s.values) {
                double l = std::log(x);
                lg += l;
                s.T_max = std::max(s.T_max, l * l);
            }
            s.G = lg / s.n;
        }
        return s;
    }

    bool all_equal() const { return x_max == x_min; }
};

struct FitResult {
    std::vector<std::pair<std::string, double>> parameters;
    SolveResult solver;
    double gradient = 0;

    double param(const std::string& name) const {
        for (auto& [k, v] : parameters)
            if (k == name) return v;
        throw Error(ErrorCode::DomainError, "no parameter " + name);
    }
};

// A score equation ready for US: objective, its FLB with antiderivative, and
// the closed-form quadratic step.
struct ScoreProblem {
    OrientedObjective objective;
    FlbCustom bound;
    StepFunction step;
    double x0 = 1;
    std::vector<double> probe;
};

inline SolveOptions default_fit_options() {
    SolveOptions o;
    o.max_iter = 10000;
    return o;
}

namespace detail {

inline std::vector<double> log_grid(double lo, double hi, int k = 11) {
    std::vector<double> v;
    for (int i = 0; i < k; ++i) v.push_back(lo * std::pow(hi / lo, double(i) / (k - 1)));
    return v;
}

inline void require_root(const ScoreProblem& sp) {
    int seen = 0;
    bool change = false;
    for (double x : sp.probe) {
        if (!sp.objective.domain.contains(x)) continue;
        double v = sp.objective.g(x);
        if (!std::isfinite(v)) continue;
        int s = sign_of(v);
        if (s == 0) return;
        if (seen != 0 && s != seen) change = true;
        seen = s;
    }
    if (!change) throw Error(ErrorCode::NoRoot, "score has constant sign on the probe grid");
}

inline void require_integers(const Sample& s, double min_value) {
    for (double x : s.values)
        if (x != std::floor(x) || x < min_value)
            throw Error(ErrorCode::DomainError, "observations must be integers >= " + std::to_string(int(min_value)));
}

// Distinct values with their multiplicities; the discrete scores are sums over these.
inline std::vector<std::pair<long, double>> tally(const Sample& s) {
    std::map<long, double> m;
    for (double x : s.values) m[static_cast<long>(x)] += 1;
    return {m.begin(), m.end()};
}

inline double clip_into(const Domain& d, double x, double fallback) {
    return d.contains(x) ? x : fallback;
}

inline FitResult run_score(const ScoreProblem& sp, std::optional<double> x0, const SolveOptions& opts, const std::string& name) {
    require_root(sp);
    double start = clip_into(sp.objective.domain, x0.value_or(sp.x0), sp.x0);
    FitResult f;
    f.solver = us_iterate(sp.objective, sp.step, start, opts);
    if (!f.solver.converged())
        throw Error(ErrorCode::NonConvergence, name + " solve ended with status " + to_string(f.solver.status));
    f.gradient = sp.objective.g(f.solver.root);
    return f;
}

} // namespace detail

// g(alpha) = c0 - psi(alpha), FLB b = -1/alpha^2 - pi^2/6.
inline ScoreProblem gamma_alpha_problem(double c0) {
    const double k = std::numbers::pi * std::numbers::pi / 6;
    ScoreProblem sp;
    sp.objective.g = [c0](double a) { return c0 - digamma(a); };
    sp.objective.g1 = [](double a) { return -trigamma(a); };
    sp.objective.domain = Domain::open(0, inf);
    sp.bound = FlbCustom{[k](double a) { return -1 / (a * a) - k; }, [k](double a) { return 1 / a - k * a; }};
    Domain dom = sp.objective.domain;
    sp.step = [k, dom](double at, double gt) {
        int dir = sign_of(gt);
        if (dir == 0) return at;
        double a3 = gt + k * at - 1 / at;
        return directed_root_abs(k, -a3, -1, at, dir, dom);
    };
    sp.x0 = 1;
    sp.probe = detail::log_grid(1e-8, 1e8);
    return sp;
}

inline FitResult gamma_alpha_mle_c0(double c0, std::optional<double> x0 = std::nullopt,
                                    const SolveOptions& opts = default_fit_options()) {
    auto sp = gamma_alpha_problem(c0);
    auto f = detail::run_score(sp, x0, opts, "gamma alpha");
    f.parameters = {{"alpha", f.solver.root}};
    return f;
}

inline FitResult gamma_alpha_mle(const Sample& s, double beta, std::optional<double> x0 = std::nullopt,
                                 const SolveOptions& opts = default_fit_options()) {
    if (!(s.x_min > 0)) throw Error(ErrorCode::DomainError, "gamma data must be positive");
    if (!(beta > 0)) throw Error(ErrorCode::DomainError, "beta must be positive");
    auto f = gamma_alpha_mle_c0(s.G + std::log(beta), x0, opts);
    f.parameters.push_back({"beta", beta});
    return f;
}

// Alternates beta = alpha / mean with the alpha solve until the joint change is
// below tol_x. gradient reports the larger of the two score residuals.
inline FitResult gamma_fit(const Sample& s, const SolveOptions& opts = default_fit_options(), int max_cycles = 100000) {
    if (!(s.x_min > 0)) throw Error(ErrorCode::DomainError, "gamma data must be positive");
    if (s.all_equal() || !(std::log(s.mean) - s.G > 0))
        throw Error(ErrorCode::NoRoot, "zero-variance sample: the likelihood has no finite maximizer");
    double alpha = std::max(0.5 * s.mean * s.mean / s.variance, 1e-6);
    double beta = alpha / s.mean;
    FitResult f;
    int total = 0;
    for (int c = 1; c <= max_cycles; ++c) {
        double beta_new = alpha / s.mean;
        auto inner = gamma_alpha_mle_c0(s.G + std::log(beta_new), alpha, opts);
        double alpha_new = inner.solver.root;
        total += inner.solver.n_iters;
        double change = std::abs(alpha_new - alpha) + std::abs(beta_new - beta);
        alpha = alpha_new;
        beta = beta_new;
        f.solver = inner.solver;
        if (change <= opts.tol_x) {
            beta = alpha / s.mean;
            f.solver.n_iters = total;
            f.parameters = {{"alpha", alpha}, {"beta", beta}};
            double r1 = s.G + std::log(beta) - digamma(alpha);
            double r2 = alpha / beta - s.mean;
            f.gradient = std::max(std::abs(r1), std::abs(r2));
            return f;
        }
    }
    throw Error(ErrorCode::NonConvergence, "gamma cyclic fit did not settle");
}

// Profile score in the shape, with sums of x^theta done as log-sum-exp.
inline ScoreProblem weibull_problem(const Sample& s) {
    if (!(s.x_min > 0)) throw Error(ErrorCode::DomainError, "Weibull data must be positive");
    if (s.all_equal()) throw Error(ErrorCode::DegenerateSample, "all values equal: g(theta) = 1/theta has no root");
    if (!(s.T_max > 0)) throw Error(ErrorCode::DegenerateSample, "T_max = 0");
    std::vector<double> logs;
    for (double x : s.values) logs.push_back(std::log(x));
    double G = s.G, T = s.T_max;
    auto moments = [logs](double th, double& m1, double& m2) {
        double mx = -inf;
        for (double l : logs) mx = std::max(mx, th * l);
        double s0 = 0, s1 = 0, s2 = 0;
        for (double l : logs) {
            double w = std::exp(th * l - mx);
            s0 += w;
            s1 += w * l;
            s2 += w * l * l;
        }
        m1 = s1 / s0;
        m2 = s2 / s0;
    };
    ScoreProblem sp;
    sp.objective.g = [=](double th) {
        double m1, m2;
        moments(th, m1, m2);
        return G + 1 / th - m1;
    };
    sp.objective.g1 = [=](double th) {
        double m1, m2;
        moments(th, m1, m2);
        return -1 / (th * th) - (m2 - m1 * m1);
    };
    sp.objective.domain = Domain::open(0, inf);
    sp.bound = FlbCustom{[T](double th) { return -1 / (th * th) - T; }, [T](double th) { return 1 / th - T * th; }};
    Domain dom = sp.objective.domain;
    sp.step = [T, dom](double tt, double gt) {
        int dir = sign_of(gt);
        if (dir == 0) return tt;
        double a4 = gt + T * tt - 1 / tt;
        return directed_root_abs(T, -a4, -1, tt, dir, dom);
    };
    sp.x0 = 1;
    sp.probe = detail::log_grid(1e-4, 1e4);
    return sp;
}

inline FitResult weibull_fit(const Sample& s, std::optional<double> x0 = std::nullopt,
                             const SolveOptions& opts = default_fit_options()) {
    auto sp = weibull_problem(s);
    auto f = detail::run_score(sp, x0, opts, "Weibull");
    double th = f.solver.root;
    double mx = -inf;
    for (double x : s.values) mx = std::max(mx, th * std::log(x));
    double acc = 0;
    for (double x : s.values) acc += std::exp(th * std::log(x) - mx);
    double log_lambda = (std::log(acc / s.n) + mx) / th;
    f.parameters = {{"theta", th}, {"lambda", std::exp(log_lambda)}};
    return f;
}

// g = -G - Z'/Z on (1, inf); b = a5 - a6/(theta-1)^2 from the zeta bounds.
inline ScoreProblem zeta_problem(const Sample& s) {
    detail::require_integers(s, 1);
    if (s.x_max == 1) throw Error(ErrorCode::DegenerateSample, "all values are 1: g > 0 everywhere");
    const double l2 = std::numbers::ln2;
    const double a5 = -l2 * (l2 + 2), a6 = 2 * l2 + 2;
    double G = s.G;
    ScoreProblem sp;
    sp.objective.g = [G](double th) {
        auto z = riemann_zeta_all(th);
        return -G - z.d1 / z.z;
    };
    sp.objective.g1 = [](double th) {
        auto z = riemann_zeta_all(th);
        return -(z.d2 * z.z - z.d1 * z.d1) / (z.z * z.z);
    };
    sp.objective.domain = Domain::open(1, inf);
    sp.bound = FlbCustom{[=](double th) { return a5 - a6 / ((th - 1) * (th - 1)); },
                         [=](double th) { return a5 * th + a6 / (th - 1); }};
    Domain dom = sp.objective.domain;
    sp.step = [=](double tt, double gt) {
        int dir = sign_of(gt);
        if (dir == 0) return tt;
        double a7 = gt - a5 * (tt + 1) - a6 / (tt - 1);
        double a8 = -gt + a5 * tt + a6 * tt / (tt - 1);
        return directed_root_abs(a5, a7, a8, tt, dir, dom);
    };
    sp.x0 = 1.5;
    sp.probe = {1.0001, 1.001, 1.01, 1.1, 1.5, 2, 4, 8, 16, 32, 64};
    return sp;
}

inline FitResult zeta_theta_mle(const Sample& s, std::optional<double> x0 = std::nullopt,
                                const SolveOptions& opts = default_fit_options()) {
    auto f = detail::run_score(zeta_problem(s), x0, opts, "zeta");
    f.parameters = {{"theta", f.solver.root}};
    return f;
}

inline ScoreProblem yule_simon_problem(const Sample& s) {
    detail::require_integers(s, 1);
    if (s.x_max == 1) throw Error(ErrorCode::DegenerateSample, "all values are 1: g > 0 everywhere");
    auto t = detail::tally(s);
    double n = double(s.n);
    auto inner = [t](double th, int power) {
        double acc = 0;
        for (auto& [x, c] : t) {
            double part = 0;
            for (long m = 0; m < x; ++m) part += power == 1 ? 1 / (m + th + 1) : 1 / ((m + th + 1) * (m + th + 1));
            acc += c * part;
        }
        return acc;
    };
    ScoreProblem sp;
    sp.objective.g = [=](double th) { return n / th - inner(th, 1); };
    sp.objective.g1 = [=](double th) { return -n / (th * th) + inner(th, 2); };
    sp.objective.domain = Domain::open(0, inf);
    sp.bound = FlbCustom{[n](double th) { return -n / (th * th) + n / ((th + 1) * (th + 1)); },
                         [n](double th) { return n / th - n / (th + 1); }};
    Domain dom = sp.objective.domain;
    sp.step = [n, dom](double tt, double gt) {
        int dir = sign_of(gt);
        if (dir == 0) return tt;
        double a9 = gt - n / tt + n / (tt + 1);
        return directed_root_abs(a9, a9, n, tt, dir, dom);
    };
    sp.x0 = 1;
    sp.probe = detail::log_grid(1e-6, 1e6);
    return sp;
}

inline FitResult yule_simon_mle(const Sample& s, std::optional<double> x0 = std::nullopt,
                                const SolveOptions& opts = default_fit_options()) {
    auto f = detail::run_score(yule_simon_problem(s), x0, opts, "Yule-Simon");
    f.parameters = {{"theta", f.solver.root}};
    return f;
}

inline ScoreProblem gamma_poisson_problem(const Sample& s) {
    detail::require_integers(s, 0);
    if (s.x_max == 0) throw Error(ErrorCode::DegenerateSample, "all values are 0");
    auto t = detail::tally(s);
    double n = double(s.n), xbar = s.mean;
    double a10 = 0, a11 = 0;
    for (auto& [x, c] : t) {
        if (x >= 1) a11 -= c;
        for (long m = 1; m < x; ++m) a10 -= c / (double(m) * m);
    }
    auto inner = [t](double a, int power) {
        double acc = 0;
        for (auto& [x, c] : t) {
            double part = 0;
            for (long m = 0; m < x; ++m) part += power == 1 ? 1 / (m + a) : 1 / ((m + a) * (m + a));
            acc += c * part;
        }
        return acc;
    };
    ScoreProblem sp;
    sp.objective.g = [=](double a) { return inner(a, 1) - n * std::log1p(xbar / a); };
    sp.objective.g1 = [=](double a) { return -inner(a, 2) + n / a - n / (a + xbar); };
    sp.objective.domain = Domain::open(0, inf);
    sp.bound = FlbCustom{[=](double a) { return a10 + a11 / (a * a); }, [=](double a) { return a10 * a - a11 / a; }};
    Domain dom = sp.objective.domain;
    sp.step = [=](double at, double gt) {
        int dir = sign_of(gt);
        if (dir == 0) return at;
        double a12 = gt - a10 * at + a11 / at;
        return directed_root_abs(a10, a12, -a11, at, dir, dom);
    };
    double excess = s.variance - xbar;
    sp.x0 = excess > 0 ? xbar * xbar / excess : 1;
    sp.probe = detail::log_grid(1e-6, 1e6);
    return sp;
}

inline FitResult gamma_poisson_fit(const Sample& s, std::optional<double> x0 = std::nullopt,
                                   const SolveOptions& opts = default_fit_options()) {
    auto f = detail::run_score(gamma_poisson_problem(s), x0, opts, "gamma-Poisson");
    double a = f.solver.root;
    f.parameters = {{"alpha", a}, {"beta", a / s.mean}};
    return f;
}

// theta < 0 branch only. Admissible: lambda + theta x > 0 at every observed x,
// i.e. theta > -mean/(x_max - mean), and theta > -1.
inline ScoreProblem genpoisson_problem(const Sample& s) {
    detail::require_integers(s, 0);
    if (!(s.x_max > s.mean)) throw Error(ErrorCode::DegenerateSample, "x_max equals the mean");
    auto t = detail::tally(s);
    double n = double(s.n), xbar = s.mean, r = s.x_max - xbar;
    double a14 = xbar / r, a13 = 0;
    for (auto& [x, c] : t) a13 += c * x * (x - xbar) * (x - xbar) / (r * r);
    double lo = std::max(-1.0, -a14 * (1 - 1e-9));
    ScoreProblem sp;
    sp.objective.g = [=](double th) {
        double acc = -n / (1 - th);
        for (auto& [x, c] : t) acc += c * (x - 1) * (x - xbar) / (xbar + (x - xbar) * th);
        return acc;
    };
    sp.objective.g1 = [=](double th) {
        double acc = -n / ((1 - th) * (1 - th));
        for (auto& [x, c] : t) {
            double d = xbar + (x - xbar) * th;
            acc -= c * (x - 1) * (x - xbar) * (x - xbar) / (d * d);
        }
        return acc;
    };
    sp.objective.domain = Domain::open(lo, 0);
    sp.bound = FlbCustom{[=](double th) { return -n / ((1 - th) * (1 - th)) - a13 / ((a14 + th) * (a14 + th)); },
                         [=](double th) { return -n / (1 - th) + a13 / (a14 + th); }};
    Domain dom = sp.objective.domain;
    sp.step = [=](double tt, double gt) {
        int dir = sign_of(gt);
        if (dir == 0) return tt;
        double a15 = gt + n / (1 - tt) - a13 / (a14 + tt);
        double a16 = a15 * (1 - a14) - n - a13;
        return directed_root_abs(a15, -a16, (n - a15) * a14 - a13, tt, dir, dom);
    };
    sp.x0 = lo / 2;
    for (int i = 0; i <= 10; ++i) sp.probe.push_back(lo + (0 - lo) * (i == 0 ? 1e-9 : i == 10 ? 1 - 1e-9 : i / 10.0));
    return sp;
}

inline FitResult genpoisson_theta_mle(const Sample& s, std::optional<double> x0 = std::nullopt,
                                      const SolveOptions& opts = default_fit_options()) {
    auto f = detail::run_score(genpoisson_problem(s), x0, opts, "generalized Poisson");
    double th = f.solver.root;
    f.parameters = {{"theta", th}, {"lambda", (1 - th) * s.mean}};
    return f;
}

} // namespace us
