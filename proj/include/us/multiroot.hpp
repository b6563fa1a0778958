#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "solver.hpp"

namespace us {

// Each restart begins epsilon past a root where |g| ~ epsilon, so leaving it
// takes many small steps when the FLB constant is loose.
inline SolveOptions sweep_default_options() {
    SolveOptions o;
    o.max_iter = 10000;
    return o;
}

struct SweepConfig {
    Domain interval;
    double epsilon = 1e-6;
    double flb_g = -1;
    double flb_neg_g = -1;
    int max_roots = 64;
    SolveOptions opts = sweep_default_options();
};

namespace detail {

// Any point in [a, b] where g has sign opposite to s, on a 1024-point grid.
inline bool sign_change_ahead(const Evaluator& g, double a, double b, int s) {
    const int n = 1024;
    for (int i = 1; i <= n; ++i) {
        double x = a + (b - a) * i / n;
        if (sign_of(g(x)) == -s) return true;
    }
    return false;
}

} // namespace detail

// Left-to-right root discovery: US on g while g > 0 at the start, on -g while
// g < 0, restarting epsilon past each root.
inline std::vector<double> sweep_roots(const Evaluator& g, const SweepConfig& cfg) {
    const Domain& I = cfg.interval;
    if (!I.bounded()) throw Error(ErrorCode::DomainError, "sweep needs a finite interval");
    if (!(cfg.flb_g < 0) || !(cfg.flb_neg_g < 0)) throw Error(ErrorCode::DomainError, "FLB constants must be negative");
    if (!(cfg.epsilon > 0)) throw Error(ErrorCode::DomainError, "epsilon must be positive");
    double right = I.hi_open ? I.hi - cfg.epsilon : I.hi;
    double start = I.lo;
    if (I.lo_open || g(start) == 0) start += cfg.epsilon;
    std::vector<double> roots;
    while (start < right) {
        double gs = g(start);
        if (!std::isfinite(gs)) throw Error(ErrorCode::NonFiniteEvaluation, "g not finite at " + std::to_string(start));
        int s = sign_of(gs);
        if (s == 0) {
            roots.push_back(start);
            start += cfg.epsilon;
            continue;
        }
        if (!detail::sign_change_ahead(g, start, right, s)) break;
        if (static_cast<int>(roots.size()) >= cfg.max_roots)
            throw Error(ErrorCode::MaxRootsExceeded, "more than " + std::to_string(cfg.max_roots) + " roots");
        OrientedObjective obj;
        obj.domain = Domain::closed(start, right);
        double b;
        if (s > 0) {
            obj.g = g;
            b = cfg.flb_g;
        } else {
            obj.g = [&g](double x) { return -g(x); };
            b = cfg.flb_neg_g;
        }
        auto res = us_solve(obj, FlbConstant{b}, start, cfg.opts);
        if (!res.converged())
            throw Error(ErrorCode::NonConvergence, "sweep " + std::to_string(roots.size()) + ": " + to_string(res.status));
        roots.push_back(res.root);
        start = res.root + cfg.epsilon;
    }
    return roots;
}

// Heuristic only: finite-difference minimum of g' and of -g' on a grid,
// widened by a safety factor. Not a certified bound.
inline std::pair<double, double> estimate_flb_constants(const Evaluator& g, const Domain& interval, int n_grid = 2048,
                                                        double safety = 1.25) {
    double lo = interval.lo, hi = interval.hi;
    double h = (hi - lo) / n_grid;
    double dmin = inf, dmax = -inf;
    for (int i = 0; i < n_grid; ++i) {
        double a = lo + i * h, b = a + h;
        double d = (g(b) - g(a)) / h;
        dmin = std::min(dmin, d);
        dmax = std::max(dmax, d);
    }
    auto widen = [safety](double m) { return m < 0 ? safety * m : -0.1 * safety; };
    return {widen(dmin), widen(-dmax)};
}

} // namespace us
