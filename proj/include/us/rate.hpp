#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "types.hpp"

namespace us {

// Fill eps = theta - root and rate = |eps_{t+1} / eps_t| into a trace.
inline void attach_reference(std::vector<IterationRecord>& trace, double root) {
    for (auto& r : trace) r.eps = r.theta - root;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        trace[i].rate.reset();
        if (i + 1 < trace.size() && *trace[i].eps != 0) trace[i].rate = std::abs(*trace[i + 1].eps / *trace[i].eps);
    }
}

// Last ratio |eps_{t+1}| / |eps_t|^order before rounding noise takes over.
// With a radius, only pairs whose |eps_t| is within it count.
inline double estimate_rate(const std::vector<IterationRecord>& trace, double root, int order,
                            double radius = std::numeric_limits<double>::infinity()) {
    if (order < 1 || order > 3) throw Error(ErrorCode::DomainError, "order must be 1, 2 or 3");
    if (trace.size() < static_cast<std::size_t>(order + 2))
        throw Error(ErrorCode::InsufficientTrace, "need at least order+2 records");
    double floor = 1e3 * std::numeric_limits<double>::epsilon() * std::abs(root);
    std::vector<double> eps;
    for (auto& r : trace) {
        double e = std::abs(r.theta - root);
        if (e <= floor) break;
        eps.push_back(e);
    }
    if (eps.size() < 2 || eps[eps.size() - 2] > radius)
        throw Error(ErrorCode::InsufficientTrace, "no informative iterations");
    double e0 = eps[eps.size() - 2], e1 = eps.back();
    return e1 / std::pow(e0, order);
}

// Asymptotic constant of the bound's error recursion at root. For SLUB the
// active second-derivative constant depends on the side the iterates come
// from: approach > 0 means increasing iterates (b21), otherwise b22.
inline double theoretical_rate(const OrientedObjective& obj, const BoundSpec& bound, double root, int approach = -1) {
    double g1 = obj.derivative(1, root);
    if (g1 == 0) throw Error(ErrorCode::DomainError, "g'(root) = 0");
    if (auto* b = std::get_if<FlbConstant>(&bound)) return std::abs(1 - g1 / b->b1);
    if (auto* b = std::get_if<FlbLinear>(&bound)) return std::abs(1 - g1 / (b->b1 + b->b2 * root));
    if (auto* b = std::get_if<FlbCustom>(&bound)) return std::abs(1 - g1 / b->b(root));
    if (auto* b = std::get_if<Slub>(&bound)) {
        double c = approach > 0 ? b->b21 : b->b22;
        return std::abs(c - obj.derivative(2, root)) / (2 * std::abs(g1));
    }
    auto& t = std::get<Tlb>(bound);
    return std::abs(t.b3 - obj.derivative(3, root)) / (6 * std::abs(g1));
}

} // namespace us
