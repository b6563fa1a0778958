#pragma once

#include <chrono>
#include <cstdio>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "mle.hpp"
#include "pvalues.hpp"
#include "quantiles.hpp"
#include "rate.hpp"
#include "solver.hpp"

namespace us {

// cos(pi x / 2) - x, the running example with g' >= -(pi/2 + 1).
inline ProblemInstance example1_problem() {
    const double h = std::numbers::pi / 2;
    ProblemInstance p;
    p.name = "example1";
    p.objective.g = [h](double x) { return std::cos(h * x) - x; };
    p.objective.g1 = [h](double x) { return -h * std::sin(h * x) - 1; };
    p.objective.g2 = [h](double x) { return -h * h * std::cos(h * x); };
    p.objective.g3 = [h](double x) { return h * h * h * std::sin(h * x); };
    p.objective.domain = Domain::real_line();
    p.bound = FlbConstant{-(h + 1)};
    auto obj = p.objective;
    BoundSpec b = *p.bound;
    p.step = [obj, b](double x, double gx) { return detail::bound_step(obj, b, x, gx, 1e-13); };
    p.init_lo = -3;
    p.init_hi = 3;
    return p;
}

struct PolynomialProblem {
    double a3, a2, a1, a0, m, a_max;

    double g(double x) const { return a3 * std::pow(x, m) + (a2 * x + a1) * x + a0; }
    double g1(double x) const { return a3 * m * std::pow(x, m - 1) + 2 * a2 * x + a1; }
    double g2(double x) const { return a3 * m * (m - 1) * std::pow(x, m - 2) + 2 * a2; }
    double g3(double x) const { return a3 * m * (m - 1) * (m - 2) * std::pow(x, m - 3); }

    // Quadratic A2 x^2 + A1 x + A0 whose root is the next iterate. a3 < 0 uses
    // the two-constant second-derivative bound on the a3 x^m term, a3 > 0 its
    // exact second-order expansion (its third derivative is nonnegative).
    void coefficients(double xt, double gt, double& A2, double& A1, double& A0) const {
        if (a3 < 0) {
            double b2 = gt > 0 ? a3 * m * (m - 1) * std::pow(a_max, m - 2) : 0;
            A2 = b2 / 2 + a2;
            A1 = a3 * m * std::pow(xt, m - 1) - b2 * xt + a1;
            A0 = a3 * (1 - m) * std::pow(xt, m) + b2 / 2 * xt * xt + a0;
        } else {
            A2 = a3 * m * (m - 1) / 2 * std::pow(xt, m - 2) + a2;
            A1 = a3 * m * (2 - m) * std::pow(xt, m - 1) + a1;
            A0 = a3 * (m - 1) * (m / 2 - 1) * std::pow(xt, m) + a0;
        }
    }

    double step(double xt, double gt) const {
        if (gt == 0) return xt;
        double A2, A1, A0;
        coefficients(xt, gt, A2, A1, A0);
        if (A2 == 0) return -A0 / A1;
        double disc = A1 * A1 - 4 * A2 * A0;
        if (disc < 0) throw Error(ErrorCode::NoRealStep, "there exists no root");
        return -(A1 + std::sqrt(disc)) / (2 * A2);
    }

    // The same surrogate expressed as a generic bound on the whole g.
    BoundSpec generic_bound() const {
        if (a3 < 0) return Slub{a3 * m * (m - 1) * std::pow(a_max, m - 2) + 2 * a2, 2 * a2};
        return Tlb{0};
    }
};

inline ProblemInstance polynomial_problem(double a3, double a2, double a1, double a0, double m, double a_max) {
    if (!(m >= 3)) throw Error(ErrorCode::DomainError, "order m must be >= 3");
    if (!(a_max > 0)) throw Error(ErrorCode::DomainError, "a_max must be positive");
    if (!(a0 > 0)) throw Error(ErrorCode::DomainError, "a0 must be positive");
    if (a3 == 0) throw Error(ErrorCode::DomainError, "a3 must be nonzero");
    PolynomialProblem P{a3, a2, a1, a0, m, a_max};
    if (!(P.g(a_max) < 0)) throw Error(ErrorCode::NoRoot, "g must change sign on (0, a_max)");
    int changes = 0;
    double prev = a0;
    for (int i = 1; i <= 64; ++i) {
        double v = P.g(a_max * i / 64);
        if (sign_of(v) != 0 && sign_of(v) != sign_of(prev)) ++changes;
        if (sign_of(v) != 0) prev = v;
    }
    if (changes != 1) throw Error(ErrorCode::AmbiguousOrientation, "g must change sign exactly once on (0, a_max)");
    ProblemInstance p;
    p.name = a3 < 0 ? "poly_u2" : "poly_u3";
    p.objective.g = [P](double x) { return P.g(x); };
    p.objective.g1 = [P](double x) { return P.g1(x); };
    p.objective.g2 = [P](double x) { return P.g2(x); };
    p.objective.g3 = [P](double x) { return P.g3(x); };
    p.objective.domain = Domain{0, a_max, false, true};
    p.step = [P](double x, double gx) { return P.step(x, gx); };
    p.bound = P.generic_bound();
    p.init_lo = 0;
    p.init_hi = a_max;
    return p;
}

inline ProblemInstance table2_problem(bool second) {
    // coefficient sets {a0,a1,a2,a3,m} = {1,-1,1,-1,3} and {1,-1,-3,1,3}
    return second ? polynomial_problem(1, -3, -1, 1, 3, 2) : polynomial_problem(-1, 1, -1, 1, 3, 2);
}

struct ExperimentSpec {
    std::string experiment; // table2a | table2b | table3
    std::vector<std::string> algorithms;
    int n_reps = 1000;
    double init_lo = 0, init_hi = 0;
    std::uint64_t seed = 20240601;
    SolveOptions opts;
    int threads = 1;
    std::optional<double> fixed_x0;
};

struct ExperimentRow {
    std::string label;
    std::string algorithm;
    double percentage = 0;
    double mean_iterations = 0;
    double time_s = 0;
};

struct ExperimentReport {
    std::string experiment;
    int n_reps = 0;
    std::uint64_t seed = 0;
    std::vector<ExperimentRow> rows;

    std::string csv(int digits = 10) const {
        std::string out = "algorithm,percentage,mean_iters,time_s\n";
        char buf[256];
        for (auto& r : rows) {
            std::string name = r.label.empty() ? r.algorithm : r.algorithm + "[" + r.label + "]";
            std::snprintf(buf, sizeof buf, "%s,%.*g,%.*g,%.6g\n", name.c_str(), digits, r.percentage, digits,
                          r.mean_iterations, r.time_s);
            out += buf;
        }
        return out;
    }
};

// Uniform draw for repetition i, independent of every other repetition.
inline double repetition_uniform(std::uint64_t seed, std::uint64_t i) {
    std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(i), std::uint32_t(i >> 32)};
    std::mt19937_64 eng(seq);
    return ((eng() >> 11) + 0.5) * 0x1.0p-53;
}

namespace detail {

struct BenchCase {
    std::string label;
    OrientedObjective objective;
    StepFunction us_step;           // problem-specific step (polynomials)
    std::vector<std::pair<std::string, BoundSpec>> bounds;
    double bis_lo, bis_hi;
    double init_lo, init_hi;
};

inline std::vector<BenchCase> bench_cases(const std::string& experiment) {
    std::vector<BenchCase> cs;
    if (experiment == "table2a" || experiment == "table2b") {
        auto p = table2_problem(experiment == "table2b");
        BenchCase c{"", p.objective, p.step, {}, 0, 2, 0, 2};
        cs.push_back(c);
        return cs;
    }
    if (experiment == "table3") {
        for (double p : {0.01, 0.9})
            for (double mu : {-2.0, 2.0}) {
                BenchCase c;
                char buf[64];
                std::snprintf(buf, sizeof buf, "p=%g;mu=%g", p, mu);
                c.label = buf;
                c.objective = normal_quantile_objective(p, mu, 1);
                c.bounds = {{"us_flb", normal_quantile_bound(1, QuantileMethod::Flb)},
                            {"us_slub", normal_quantile_bound(1, QuantileMethod::Slub)},
                            {"us_tlb", normal_quantile_bound(1, QuantileMethod::Tlb)}};
                c.bis_lo = mu - 8;
                c.bis_hi = mu + 8;
                c.init_lo = -4;
                c.init_hi = 4;
                cs.push_back(c);
            }
        return cs;
    }
    throw Error(ErrorCode::UnknownProblem, "unknown experiment " + experiment);
}

inline std::vector<std::string> default_algorithms(const std::string& experiment) {
    if (experiment == "table2a") return {"us_slub", "newton", "bisection"};
    if (experiment == "table2b") return {"us_tlb", "newton", "bisection"};
    return {"us_slub", "us_tlb", "newton", "bisection"};
}

inline SolveResult run_one(const BenchCase& c, const std::string& alg, double x0, const SolveOptions& opts) {
    if (alg == "newton") return newton_solve(c.objective, x0, opts);
    if (alg == "bisection") {
        // width-only stopping (negative tol_g), so the count reflects tol_x alone
        SolveOptions o = opts;
        o.tol_g = -1;
        o.record_trace = false;
        return bisection_solve(c.objective.g, c.bis_lo, c.bis_hi, o);
    }
    if (c.us_step) {
        bool u2 = alg == "us_slub", u3 = alg == "us_tlb";
        // the polynomial sets each admit exactly one of the two surrogates
        bool ok = c.objective.g3 && ((u2 && c.objective.g3(1) < 0) || (u3 && c.objective.g3(1) > 0));
        if (!ok) throw Error(ErrorCode::UnknownAlgorithm, alg + " does not apply to this polynomial");
        return us_iterate(c.objective, c.us_step, x0, opts);
    }
    for (auto& [name, b] : c.bounds)
        if (name == alg) return us_solve(c.objective, b, x0, opts);
    throw Error(ErrorCode::UnknownAlgorithm, "unknown algorithm " + alg);
}

} // namespace detail

inline ExperimentReport run_experiment(const ExperimentSpec& spec) {
    if (spec.n_reps < 1) throw Error(ErrorCode::DomainError, "n_reps must be >= 1");
    auto cases = detail::bench_cases(spec.experiment);
    auto algs = spec.algorithms.empty() ? detail::default_algorithms(spec.experiment) : spec.algorithms;
    ExperimentReport rep;
    rep.experiment = spec.experiment;
    rep.n_reps = spec.n_reps;
    rep.seed = spec.seed;
    SolveOptions opts = spec.opts;
    opts.record_trace = false;
    for (auto& c : cases) {
        double lo = spec.init_hi > spec.init_lo ? spec.init_lo : c.init_lo;
        double hi = spec.init_hi > spec.init_lo ? spec.init_hi : c.init_hi;
        std::vector<double> inits(spec.n_reps);
        for (int i = 0; i < spec.n_reps; ++i)
            inits[i] = spec.fixed_x0 ? *spec.fixed_x0 : lo + (hi - lo) * repetition_uniform(spec.seed, i);
        for (auto& alg : algs) {
            detail::run_one(c, alg, inits[0], opts); // validates the algorithm name up front
            int nt = std::max(1, spec.threads);
            std::vector<long long> conv(nt, 0), iters(nt, 0);
            auto work = [&](int k) {
                for (int i = k; i < spec.n_reps; i += nt) {
                    auto r = detail::run_one(c, alg, inits[i], opts);
                    if (r.converged()) {
                        ++conv[k];
                        iters[k] += r.n_iters;
                    }
                }
            };
            auto t0 = std::chrono::steady_clock::now();
            if (nt == 1) {
                work(0);
            } else {
                std::vector<std::thread> pool;
                for (int k = 0; k < nt; ++k) pool.emplace_back(work, k);
                for (auto& th : pool) th.join();
            }
            auto t1 = std::chrono::steady_clock::now();
            long long nc = 0, ni = 0;
            for (int k = 0; k < nt; ++k) {
                nc += conv[k];
                ni += iters[k];
            }
            ExperimentRow row;
            row.label = c.label;
            row.algorithm = alg;
            row.percentage = 100.0 * nc / spec.n_reps;
            row.mean_iterations = nc ? double(ni) / nc : 0;
            row.time_s = std::chrono::duration<double>(t1 - t0).count();
            rep.rows.push_back(row);
        }
    }
    return rep;
}

inline double example1_root() {
    auto p = example1_problem();
    SolveOptions o;
    o.tol_g = 0;
    o.tol_x = 0;
    o.record_trace = false;
    return bisection_solve(p.objective.g, 0, 1, o).root;
}

// The two example traces from x0 = -1 and x0 = 2, stopped at |g| <= 1e-6.
inline std::pair<std::vector<IterationRecord>, std::vector<IterationRecord>> table1_trace() {
    auto p = example1_problem();
    SolveOptions o;
    o.tol_g = 1e-6;
    double root = example1_root();
    auto a = us_solve(p.objective, *p.bound, -1, o).trace;
    auto b = us_solve(p.objective, *p.bound, 2, o).trace;
    attach_reference(a, root);
    attach_reference(b, root);
    return {a, b};
}

} // namespace us
