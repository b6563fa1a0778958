#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "polynomial.hpp"
#include "types.hpp"

namespace us {

struct Derivatives {
    Evaluator g1, g2, g3;
};

namespace detail {

// 17 probe points: probe itself plus 8 on each side, dense near the probe and
// spreading geometrically out to the ends (or far away on unbounded sides).
inline std::vector<double> orientation_grid(const Domain& dom, double probe) {
    std::vector<double> left, right;
    double scale = std::max(1.0, std::abs(probe));
    auto inner = [&](double end, bool open) {
        if (!open) return end;
        return end + (probe - end) * 1e-8;
    };
    for (int k = 1; k <= 8; ++k) {
        double frac = (std::ldexp(1.0, k) - 1) / 255.0;
        double far = scale * (std::ldexp(1.0, k) - 1) / 2;
        left.push_back(std::isfinite(dom.lo) ? probe - (probe - inner(dom.lo, dom.lo_open)) * frac : probe - far);
        right.push_back(std::isfinite(dom.hi) ? probe + (inner(dom.hi, dom.hi_open) - probe) * frac : probe + far);
    }
    std::vector<double> grid(left.rbegin(), left.rend());
    grid.push_back(probe);
    grid.insert(grid.end(), right.begin(), right.end());
    return grid;
}

inline Evaluator negate(const Evaluator& f) {
    if (!f) return {};
    return [f](double x) { return -f(x); };
}

} // namespace detail

// Decide whether g must be negated so that it is positive left of its root.
// Exactly one sign change on the probe grid fixes the orientation; with no
// sign change the overall trend on the grid decides.
inline OrientedObjective orient(Evaluator g, Derivatives d, Domain domain, double probe) {
    if (!domain.contains(probe)) throw Error(ErrorCode::DomainError, "probe outside domain");
    auto grid = detail::orientation_grid(domain, probe);
    std::vector<double> vals;
    for (double x : grid) {
        double v = g(x);
        if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteEvaluation, "g not finite at " + std::to_string(x));
        vals.push_back(v);
    }
    int changes = 0, prev = 0, first_change = 0;
    for (double v : vals) {
        int s = sign_of(v);
        if (s == 0) continue;
        if (prev != 0 && s != prev) {
            if (changes == 0) first_change = s;
            ++changes;
        }
        prev = s;
    }
    if (changes > 1) throw Error(ErrorCode::AmbiguousOrientation, "g changes sign more than once on the probe grid");
    bool flip = changes == 1 ? first_change > 0 : vals.back() > vals.front();
    OrientedObjective o;
    o.domain = domain;
    o.flipped = flip;
    if (flip) {
        o.g = detail::negate(g);
        o.g1 = detail::negate(d.g1);
        o.g2 = detail::negate(d.g2);
        o.g3 = detail::negate(d.g3);
    } else {
        o.g = std::move(g);
        o.g1 = std::move(d.g1);
        o.g2 = std::move(d.g2);
        o.g3 = std::move(d.g3);
    }
    return o;
}

// Value of the surrogate U(theta | theta_t).
inline double surrogate_value(const OrientedObjective& obj, const BoundSpec& bound, double theta, double theta_t) {
    double gt = obj.g(theta_t);
    double dx = theta - theta_t;
    if (auto* b = std::get_if<FlbConstant>(&bound)) return gt + b->b1 * dx;
    if (auto* b = std::get_if<FlbLinear>(&bound)) return gt + (b->b1 + b->b2 * theta_t) * dx + 0.5 * b->b2 * dx * dx;
    if (auto* b = std::get_if<FlbCustom>(&bound)) return gt + b->B(theta) - b->B(theta_t);
    double g1 = obj.derivative(1, theta_t);
    if (auto* b = std::get_if<Slub>(&bound)) {
        double b2 = theta > theta_t ? b->b21 : b->b22;
        return gt + g1 * dx + 0.5 * b2 * dx * dx;
    }
    auto& t = std::get<Tlb>(bound);
    double g2 = obj.derivative(2, theta_t);
    return gt + g1 * dx + 0.5 * g2 * dx * dx + t.b3 / 6 * dx * dx * dx;
}

namespace detail {

inline double check_step(const OrientedObjective& obj, double x) {
    if (!obj.domain.contains(x)) throw Error(ErrorCode::DomainEscape, "step left the domain");
    return x;
}

// Solve gt + B(x) - B(xt) = 0 moving in direction sign(gt); B is decreasing.
inline double flb_custom_step(const OrientedObjective& obj, const FlbCustom& b, double xt, double gt, double tol) {
    int dir = sign_of(gt);
    if (dir == 0) return xt;
    double Bt = b.B(xt);
    auto phi = [&](double x) { return gt + b.B(x) - Bt; };
    double slope = b.b(xt);
    double h = (std::isfinite(slope) && slope < 0) ? std::abs(gt / slope) : 1.0;
    if (!(h > 0) || !std::isfinite(h)) h = 1.0;
    const Domain& dom = obj.domain;
    double edge = dir > 0 ? dom.hi : dom.lo;
    double near = xt, far = xt;
    bool bracketed = false;
    for (int k = 0; k < 400; ++k) {
        double cand = xt + dir * h;
        if (std::isfinite(edge) && (dir > 0 ? cand >= edge : cand <= edge)) cand = far + (edge - far) / 2;
        if (!dom.contains(cand) || cand == far) break;
        double v = phi(cand);
        if (!std::isfinite(v)) break;
        if (sign_of(v) != dir) {
            far = cand;
            bracketed = true;
            break;
        }
        near = cand;
        far = cand;
        h *= 2;
    }
    if (!bracketed) throw Error(ErrorCode::DomainEscape, "surrogate has no root inside the domain");
    double lo = std::min(near, far), hi = std::max(near, far);
    double flo = phi(lo);
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        double fm = phi(mid);
        if (fm == 0) return mid;
        if (sign_of(fm) == sign_of(flo)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

inline double flb_step(const OrientedObjective& obj, const BoundSpec& bound, double xt, double gt, double tol) {
    int dir = sign_of(gt);
    if (dir == 0) return xt;
    if (auto* b = std::get_if<FlbConstant>(&bound)) {
        if (!(b->b1 < 0)) throw Error(ErrorCode::DomainError, "FLB constant must be negative");
        return check_step(obj, xt - gt / b->b1);
    }
    if (auto* b = std::get_if<FlbLinear>(&bound)) {
        return xt + select_directed_root(0.5 * b->b2, b->b1 + b->b2 * xt, gt, dir, xt, obj.domain);
    }
    if (auto* b = std::get_if<FlbCustom>(&bound)) return check_step(obj, flb_custom_step(obj, *b, xt, gt, tol));
    throw Error(ErrorCode::DomainError, "not a first-derivative bound");
}

inline double slub_step(const OrientedObjective& obj, const Slub& b, double xt, double gt) {
    int dir = sign_of(gt);
    if (dir == 0) return xt;
    double g1 = obj.derivative(1, xt);
    double b2 = dir > 0 ? b.b21 : b.b22;
    return xt + select_directed_root(0.5 * b2, g1, gt, dir, xt, obj.domain);
}

inline double tlb_step(const OrientedObjective& obj, const Tlb& b, double xt, double gt) {
    int dir = sign_of(gt);
    if (dir == 0) return xt;
    double g1 = obj.derivative(1, xt);
    double g2 = obj.derivative(2, xt);
    return xt + select_directed_cubic_root(b.b3 / 6, 0.5 * g2, g1, gt, dir, xt, obj.domain);
}

inline double bound_step(const OrientedObjective& obj, const BoundSpec& bound, double xt, double gt, double tol) {
    if (auto* s = std::get_if<Slub>(&bound)) return slub_step(obj, *s, xt, gt);
    if (auto* t = std::get_if<Tlb>(&bound)) return tlb_step(obj, *t, xt, gt);
    return flb_step(obj, bound, xt, gt, tol);
}

} // namespace detail

inline double us_step_flb(const OrientedObjective& obj, const BoundSpec& bound, double xt, double tol = 1e-13) {
    return detail::flb_step(obj, bound, xt, obj.g(xt), tol);
}

inline double us_step_slub(const OrientedObjective& obj, const Slub& b, double xt) {
    return detail::slub_step(obj, b, xt, obj.g(xt));
}

inline double us_step_tlb(const OrientedObjective& obj, const Tlb& b, double xt) {
    return detail::tlb_step(obj, b, xt, obj.g(xt));
}

inline double us_step(const OrientedObjective& obj, const BoundSpec& bound, double xt, double tol = 1e-13) {
    return detail::bound_step(obj, bound, xt, obj.g(xt), tol);
}

// Generic US loop around any S-step. Iteration 0 is x0.
inline SolveResult us_iterate(const OrientedObjective& obj, const StepFunction& step, double x0,
                              const SolveOptions& opts = {}) {
    SolveResult r;
    r.root = x0;
    auto record = [&](int t, double th, double gv) {
        if (opts.record_trace) r.trace.push_back({t, th, gv, std::nullopt, std::nullopt});
    };
    if (!obj.domain.contains(x0)) {
        r.status = Status::DomainEscape;
        return r;
    }
    double x = x0;
    double gx = obj.g(x);
    ++r.n_g_evals;
    record(0, x, gx);
    if (!std::isfinite(gx)) {
        r.status = Status::DomainEscape;
        return r;
    }
    if (std::abs(gx) <= opts.tol_g) {
        r.status = Status::Converged;
        return r;
    }
    int d0 = sign_of(gx);
    for (int t = 1; t <= opts.max_iter; ++t) {
        double xn;
        try {
            xn = step(x, gx);
        } catch (const Error& e) {
            r.status = e.code() == ErrorCode::DomainEscape ? Status::DomainEscape : Status::NoAdmissibleStep;
            return r;
        }
        if (!obj.domain.contains(xn)) {
            r.status = Status::DomainEscape;
            return r;
        }
        double gn = obj.g(xn);
        ++r.n_g_evals;
        r.n_iters = t;
        record(t, xn, gn);
        if (!std::isfinite(gn)) {
            r.root = xn;
            r.status = Status::DomainEscape;
            return r;
        }
        double dx = xn - x;
        if (opts.stability_check) {
            bool wrong_way = dx != 0 && sign_of(dx) != d0;
            bool overshoot = sign_of(gn) == -d0 && std::abs(gn) > opts.tol_g;
            if (wrong_way || overshoot) {
                r.root = xn;
                r.status = Status::DegenerateProblem;
                return r;
            }
        }
        r.root = xn;
        x = xn;
        gx = gn;
        if (std::abs(gn) <= opts.tol_g || std::abs(dx) <= opts.tol_x) {
            r.status = Status::Converged;
            return r;
        }
    }
    r.status = Status::MaxIterations;
    return r;
}

inline SolveResult us_solve(const OrientedObjective& obj, const BoundSpec& bound, double x0, const SolveOptions& opts = {}) {
    double tol = opts.tol_x / 10;
    return us_iterate(obj, [&](double x, double gx) { return detail::bound_step(obj, bound, x, gx, tol); }, x0, opts);
}

inline SolveResult newton_solve(const OrientedObjective& obj, double x0, const SolveOptions& opts = {}) {
    if (!obj.has(1)) throw Error(ErrorCode::MissingDerivative, "Newton needs g'");
    StepFunction step = [&](double x, double gx) {
        double d = obj.g1(x);
        if (!std::isfinite(d) || std::abs(d) < 1e-300) throw Error(ErrorCode::NoAdmissibleStep, "vanishing derivative");
        return x - gx / d;
    };
    SolveOptions o = opts;
    o.stability_check = false;
    return us_iterate(obj, step, x0, o);
}

// Plain bisection; n_iters counts halvings. A negative tol_g stops on width only.
inline SolveResult bisection_solve(const Evaluator& g, double lo, double hi, const SolveOptions& opts = {}) {
    double flo = g(lo), fhi = g(hi);
    if (!(flo * fhi < 0)) throw Error(ErrorCode::BracketInvalid, "g(lo) and g(hi) must have opposite signs");
    SolveResult r;
    r.n_g_evals = 2;
    r.status = Status::MaxIterations;
    int cap = std::max(opts.max_iter, 2000);
    for (int t = 1; t <= cap; ++t) {
        double mid = 0.5 * (lo + hi);
        double fm = g(mid);
        ++r.n_g_evals;
        r.n_iters = t;
        r.root = mid;
        if (opts.record_trace) r.trace.push_back({t, mid, fm, std::nullopt, std::nullopt});
        if (std::abs(fm) <= opts.tol_g) {
            r.status = Status::Converged;
            return r;
        }
        bool stalled = mid <= lo || mid >= hi;
        if (sign_of(fm) == sign_of(flo)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if (hi - lo <= opts.tol_x || stalled) {
            r.root = 0.5 * (lo + hi);
            r.status = Status::Converged;
            return r;
        }
    }
    return r;
}

// Spot check of a bound against the oriented objective on a grid. Returns the
// first offending point, if any. slack is relative to the magnitudes involved.
inline std::optional<double> bound_violation(const OrientedObjective& obj, const BoundSpec& bound,
                                             const std::vector<double>& grid, double slack = 1e-9) {
    for (double x : grid) {
        if (!obj.domain.contains(x)) continue;
        if (auto* b = std::get_if<FlbConstant>(&bound)) {
            double d = obj.derivative(1, x);
            if (d < b->b1 - slack * std::max(1.0, std::abs(d))) return x;
        } else if (auto* b = std::get_if<FlbLinear>(&bound)) {
            double d = obj.derivative(1, x), lb = b->b1 + b->b2 * x;
            if (d < lb - slack * std::max(1.0, std::abs(d))) return x;
        } else if (auto* b = std::get_if<FlbCustom>(&bound)) {
            double d = obj.derivative(1, x), lb = b->b(x);
            if (!(lb < 0) || d < lb - slack * std::max(1.0, std::abs(d))) return x;
        } else if (auto* b = std::get_if<Slub>(&bound)) {
            double d = obj.derivative(2, x), tol = slack * std::max(1.0, std::abs(d));
            if (d < b->b21 - tol || d > b->b22 + tol) return x;
        } else if (auto* b = std::get_if<Tlb>(&bound)) {
            double d = obj.derivative(3, x);
            if (d < b->b3 - slack * std::max(1.0, std::abs(d))) return x;
        }
    }
    return std::nullopt;
}

} // namespace us
