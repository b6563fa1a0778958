#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "solver.hpp"
#include "special_functions.hpp"

namespace us {

enum class TailCase { AtMode, CaseI, CaseII };

inline const char* to_string(TailCase c) {
    switch (c) {
    case TailCase::AtMode: return "AtMode";
    case TailCase::CaseI: return "CaseI";
    case TailCase::CaseII: return "CaseII";
    }
    return "?";
}

struct EqualTailResult {
    double p_value = 1;
    double matched_point = 0;
    TailCase which = TailCase::AtMode;
    SolveResult solve;
};

// Problem for the point with the same density as the observed statistic on the
// other side of the mode. Case I: observed below the mode, match in (m0, inf).
// Case II: observed above, match in (0, m0). In both cases g is oriented to
// decrease through the matching point, so the monotone S-steps converge to it.
struct EqualDensityProblem {
    double mode = 0;
    TailCase which = TailCase::AtMode;
    ProblemInstance problem;
    FlbCustom bound;
    double x0 = 0;
};

inline void check_tail_tolerance(SolveOptions& o) {
    // |g| is twice the log-density mismatch; keep densities equal to 1e-9 relative
    o.tol_g = std::min(o.tol_g, 1e-10);
}

inline EqualDensityProblem chisq_equal_density_problem(double obs, double nu) {
    if (!(nu >= 3)) throw Error(ErrorCode::DomainError, "chi-squared test needs nu >= 3");
    if (!(obs > 0) || !std::isfinite(obs)) throw Error(ErrorCode::DomainError, "observed statistic must be positive");
    EqualDensityProblem e;
    double m0 = nu - 2;
    e.mode = m0;
    double c0 = m0 * std::log(obs) - obs;
    auto& obj = e.problem.objective;
    if (std::abs(obs - m0) <= 1e-12 * m0) return e;
    if (obs < m0) {
        e.which = TailCase::CaseI;
        obj.g = [=](double x) { return m0 * std::log(x) - x - c0; };
        obj.g1 = [=](double x) { return m0 / x - 1; };
        obj.domain = Domain::open(m0, inf);
        e.bound = FlbCustom{[](double) { return -1.0; }, [](double x) { return -x; }};
        e.problem.step = [=](double x, double) { return m0 * std::log(x / obs) + obs; };
        e.x0 = std::max(m0 * (1 + 1e-6), m0 * m0 / obs);
    } else {
        e.which = TailCase::CaseII;
        obj.g = [=](double x) { return c0 - m0 * std::log(x) + x; };
        obj.g1 = [=](double x) { return 1 - m0 / x; };
        obj.domain = Domain::open(0, m0);
        e.bound = FlbCustom{[=](double x) { return -m0 / x; }, [=](double x) { return -m0 * std::log(x); }};
        e.problem.step = [=](double x, double gx) { return x * std::exp(gx / m0); };
        e.x0 = m0 * (1 - 1e-6);
    }
    e.problem.name = "chisq";
    return e;
}

inline EqualTailResult chisq_equal_tail_pvalue(double obs, double nu, SolveOptions opts = {}) {
    auto e = chisq_equal_density_problem(obs, nu);
    EqualTailResult r;
    r.which = e.which;
    if (e.which == TailCase::AtMode) {
        r.p_value = 1;
        r.matched_point = obs;
        r.solve.root = obs;
        r.solve.status = Status::Converged;
        return r;
    }
    check_tail_tolerance(opts);
    r.solve = us_iterate(e.problem.objective, e.problem.step, e.x0, opts);
    double x = r.solve.root;
    r.matched_point = x;
    double lo = std::min(obs, x), hi = std::max(obs, x);
    r.p_value = reg_incomplete_gamma_P(nu / 2, lo / 2) + reg_incomplete_gamma_Q(nu / 2, hi / 2);
    return r;
}

inline double f_cdf(double x, double nu1, double nu2) {
    if (x <= 0) return 0;
    return reg_incomplete_beta(nu1 * x / (nu1 * x + nu2), nu1 / 2, nu2 / 2);
}

inline double f_sf(double x, double nu1, double nu2) {
    if (x <= 0) return 1;
    return reg_incomplete_beta(nu2 / (nu2 + nu1 * x), nu2 / 2, nu1 / 2);
}

inline EqualDensityProblem f_equal_density_problem(double obs, double nu1, double nu2) {
    if (!(nu1 >= 3) || !(nu2 >= 1)) throw Error(ErrorCode::DomainError, "F test needs nu1 >= 3, nu2 >= 1");
    if (!(obs > 0) || !std::isfinite(obs)) throw Error(ErrorCode::DomainError, "observed statistic must be positive");
    EqualDensityProblem e;
    double m1 = nu1 - 2, nu = nu1 / nu2, nu12 = nu1 + nu2;
    double m0 = m1 * nu2 / (nu1 * (nu2 + 2));
    e.mode = m0;
    auto D = [=](double x) { return m1 * std::log(x) - nu12 * std::log1p(nu * x); };
    double c0 = D(obs);
    auto& obj = e.problem.objective;
    if (std::abs(obs - m0) <= 1e-12 * m0) return e;
    if (obs < m0) {
        e.which = TailCase::CaseI;
        double k = 2 + nu2;
        obj.g = [=](double x) { return D(x) - c0; };
        obj.g1 = [=](double x) { return m1 / x - nu12 * nu / (1 + nu * x); };
        obj.domain = Domain::open(m0, inf);
        e.bound = FlbCustom{[=](double x) { return -k / x; }, [=](double x) { return -k * std::log(x); }};
        e.problem.step = [=](double x, double gx) { return x * std::exp(gx / k); };
        e.x0 = std::max(m0 * (1 + 1e-6), m0 * m0 / obs);
    } else {
        e.which = TailCase::CaseII;
        obj.g = [=](double x) { return c0 - D(x); };
        obj.g1 = [=](double x) { return -m1 / x + nu12 * nu / (1 + nu * x); };
        obj.domain = Domain::open(0, m0);
        e.bound = FlbCustom{[=](double x) { return -m1 / x; }, [=](double x) { return -m1 * std::log(x); }};
        e.problem.step = [=](double x, double gx) { return x * std::exp(gx / m1); };
        e.x0 = m0 * (1 - 1e-6);
    }
    e.problem.name = "f";
    return e;
}

inline EqualTailResult f_equal_tail_pvalue(double obs, double nu1, double nu2, SolveOptions opts = {}) {
    auto e = f_equal_density_problem(obs, nu1, nu2);
    EqualTailResult r;
    r.which = e.which;
    if (e.which == TailCase::AtMode) {
        r.p_value = 1;
        r.matched_point = obs;
        r.solve.root = obs;
        r.solve.status = Status::Converged;
        return r;
    }
    check_tail_tolerance(opts);
    r.solve = us_iterate(e.problem.objective, e.problem.step, e.x0, opts);
    double x = r.solve.root;
    r.matched_point = x;
    double lo = std::min(obs, x), hi = std::max(obs, x);
    r.p_value = f_cdf(lo, nu1, nu2) + f_sf(hi, nu1, nu2);
    return r;
}

} // namespace us
