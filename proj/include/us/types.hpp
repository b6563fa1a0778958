#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "error.hpp"

namespace us {

using Evaluator = std::function<double(double)>;

inline constexpr double inf = std::numeric_limits<double>::infinity();

inline int sign_of(double v) { return (v > 0) - (v < 0); }

// Interval with independently open/closed ends. Infinite ends are always open.
struct Domain {
    double lo = -inf;
    double hi = inf;
    bool lo_open = true;
    bool hi_open = true;

    static Domain real_line() { return {}; }
    static Domain open(double lo, double hi) { return {lo, hi, true, true}; }
    static Domain closed(double lo, double hi) { return {lo, hi, false, false}; }

    bool contains(double x) const {
        if (!std::isfinite(x)) return false;
        bool left = lo_open ? x > lo : x >= lo;
        bool right = hi_open ? x < hi : x <= hi;
        return left && right;
    }
    bool bounded() const { return std::isfinite(lo) && std::isfinite(hi); }
};

// g arranged so that it is positive left of the root and negative right of it.
// Derivatives, when present, are of the oriented function.
struct OrientedObjective {
    Evaluator g;
    Evaluator g1, g2, g3;
    Domain domain;
    bool flipped = false;

    double value(double x) const { return g(x); }
    bool has(int order) const {
        switch (order) {
        case 0: return bool(g);
        case 1: return bool(g1);
        case 2: return bool(g2);
        case 3: return bool(g3);
        }
        return false;
    }
    double derivative(int order, double x) const {
        if (!has(order))
            throw Error(ErrorCode::MissingDerivative, "derivative of order " + std::to_string(order) + " not supplied");
        switch (order) {
        case 1: return g1(x);
        case 2: return g2(x);
        case 3: return g3(x);
        }
        return g(x);
    }
};

// Lower bound on g' everywhere on the domain.
struct FlbConstant { double b1; };
// b(x) = b1 + b2 x.
struct FlbLinear { double b1; double b2; };
// b(x) supplied with its antiderivative B, b < 0 on the domain.
struct FlbCustom { Evaluator b; Evaluator B; };
// b21 <= g'' <= b22 (b21 used when moving right, b22 when moving left).
struct Slub { double b21; double b22; };
// b3 <= g''' everywhere.
struct Tlb { double b3; };

using BoundSpec = std::variant<FlbConstant, FlbLinear, FlbCustom, Slub, Tlb>;

inline int bound_order(const BoundSpec& b) {
    if (std::holds_alternative<Slub>(b)) return 2;
    if (std::holds_alternative<Tlb>(b)) return 3;
    return 1;
}

struct SolveOptions {
    double tol_g = 1e-8;
    double tol_x = 1e-12;
    int max_iter = 200;
    bool record_trace = true;
    bool stability_check = false;
};

enum class Status { Converged, MaxIterations, DomainEscape, NoAdmissibleStep, DegenerateProblem };

inline const char* to_string(Status s) {
    switch (s) {
    case Status::Converged: return "Converged";
    case Status::MaxIterations: return "MaxIterations";
    case Status::DomainEscape: return "DomainEscape";
    case Status::NoAdmissibleStep: return "NoAdmissibleStep";
    case Status::DegenerateProblem: return "DegenerateProblem";
    }
    return "Unknown";
}

struct IterationRecord {
    int t = 0;
    double theta = 0;
    double g = 0;
    std::optional<double> eps;
    std::optional<double> rate;
};

struct SolveResult {
    double root = 0;
    Status status = Status::MaxIterations;
    int n_iters = 0;
    int n_g_evals = 0;
    std::vector<IterationRecord> trace;

    bool converged() const { return status == Status::Converged; }
};

// Closed-form S-step: maps (theta_t, g(theta_t)) to theta_{t+1}.
using StepFunction = std::function<double(double, double)>;

// A catalog entry: oriented objective plus its own S-step.
struct ProblemInstance {
    std::string name;
    OrientedObjective objective;
    StepFunction step;
    double init_lo = 0;
    double init_hi = 0;
    std::optional<BoundSpec> bound;
};

} // namespace us
