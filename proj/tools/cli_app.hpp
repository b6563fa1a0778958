#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "us/us.hpp"

namespace us::cli {

using json = nlohmann::ordered_json;

// One number per line; blank lines and '#' lines are skipped.
inline std::vector<double> parse_data(std::istream& in) {
    std::vector<double> v;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos || line[b] == '#') continue;
        auto e = line.find_last_not_of(" \t\r");
        std::string tok = line.substr(b, e - b + 1);
        double x = 0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
        if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(x))
            throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": not a number: '" + tok + "'");
        v.push_back(x);
    }
    return v;
}

inline std::vector<double> read_data_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorCode::ParseError, "cannot open " + path);
    return parse_data(f);
}

inline std::vector<double> split_numbers(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        double x = 0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
        if (ec != std::errc() || ptr != tok.data() + tok.size()) throw CLI::ValidationError("bad number list: " + s);
        v.push_back(x);
    }
    return v;
}

struct Common {
    double tol_g = 1e-8, tol_x = 1e-12;
    int max_iter = 200;
    bool trace = false;
    std::string format = "plain";
    int digits = 10;

    SolveOptions opts() const {
        SolveOptions o;
        o.tol_g = tol_g;
        o.tol_x = tol_x;
        o.max_iter = max_iter;
        o.record_trace = trace;
        return o;
    }
};

inline void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--tol-g", c.tol_g, "stop when |g| <= tol")->check(CLI::PositiveNumber);
    sub->add_option("--tol-x", c.tol_x, "stop when the step is <= tol")->check(CLI::PositiveNumber);
    sub->add_option("--max-iter", c.max_iter)->check(CLI::PositiveNumber);
    sub->add_flag("--trace", c.trace, "include the iteration trace");
    sub->add_option("--format", c.format)->check(CLI::IsMember({"json", "csv", "plain"}));
    sub->add_option("--digits", c.digits, "significant digits for plain/csv")->check(CLI::Range(1, 17));
}

inline std::string fmt(double x, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

inline std::string scalar_text(const json& v, int digits) {
    if (v.is_number_float()) return fmt(v.get<double>(), digits);
    if (v.is_string()) return v.get<std::string>();
    if (v.is_array()) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + scalar_text(v[i], digits);
        return s;
    }
    return v.dump();
}

inline json trace_json(const std::vector<IterationRecord>& tr) {
    json a = json::array();
    for (auto& r : tr) {
        json row = {{"t", r.t}, {"theta", r.theta}, {"g", r.g}};
        if (r.eps) row["eps"] = *r.eps;
        if (r.rate) row["rate"] = *r.rate;
        a.push_back(row);
    }
    return a;
}

// Renders {"result","status","trace"} in the requested format.
inline void emit(std::ostream& out, const Common& c, const std::string& status, const json& result, const json& trace) {
    if (c.format == "json") {
        json env = {{"result", result}, {"status", status}, {"trace", trace}};
        out << env.dump(2) << "\n";
        return;
    }
    bool table = result.is_object() && result.contains("rows");
    if (c.format == "csv") {
        if (table) {
            json cols = result["rows"].empty() ? json::object() : result["rows"][0];
            std::string head;
            for (auto& [k, v] : cols.items()) head += (head.empty() ? "" : ",") + k;
            out << head << "\n";
            for (auto& row : result["rows"]) {
                std::string line;
                for (auto& [k, v] : row.items()) line += (line.empty() ? "" : ",") + scalar_text(v, c.digits);
                out << line << "\n";
            }
        } else {
            std::string head = "status", line = status;
            for (auto& [k, v] : result.items()) {
                head += "," + k;
                line += "," + scalar_text(v, c.digits);
            }
            out << head << "\n" << line << "\n";
        }
        if (trace.is_array()) {
            out << "\nt,theta,g\n";
            for (auto& r : trace) out << r["t"] << "," << fmt(r["theta"], c.digits) << "," << fmt(r["g"], c.digits) << "\n";
        }
        return;
    }
    out << "status: " << status << "\n";
    if (table) {
        for (auto& row : result["rows"]) {
            std::string line;
            for (auto& [k, v] : row.items()) line += (line.empty() ? "" : "  ") + k + "=" + scalar_text(v, c.digits);
            out << line << "\n";
        }
    } else {
        for (auto& [k, v] : result.items()) out << k << ": " << scalar_text(v, c.digits) << "\n";
    }
    if (trace.is_array()) {
        out << "t theta g\n";
        for (auto& r : trace) out << r["t"] << " " << fmt(r["theta"], c.digits) << " " << fmt(r["g"], c.digits) << "\n";
    }
}

inline int finish_solve(std::ostream& out, const Common& c, const SolveResult& r, json result) {
    result["iterations"] = r.n_iters;
    json tr = c.trace ? trace_json(r.trace) : json(nullptr);
    emit(out, c, to_string(r.status), result, tr);
    return r.converged() ? 0 : 2;
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"US root finding: solve, quantile, pvalue, fit, roots, bench", "us-solve"};
    app.require_subcommand(1);

    Common c_solve, c_q, c_p, c_fit, c_roots, c_bench;

    auto* solve = app.add_subcommand("solve", "solve a named problem");
    std::string problem, method, coeffs;
    double order = 3, amax = 2;
    std::optional<double> x0;
    solve->add_option("--problem", problem)->required()->check(CLI::IsMember({"example1", "poly"}));
    solve->add_option("--method", method)->check(CLI::IsMember({"flb", "slub", "tlb"}));
    solve->add_option("--coeffs", coeffs, "a3,a2,a1,a0");
    solve->add_option("--order", order);
    solve->add_option("--amax", amax);
    solve->add_option("--x0", x0);
    add_common(solve, c_solve);

    auto* quant = app.add_subcommand("quantile", "distribution quantile");
    std::string dist, qmethod = "tlb";
    double p = 0.5, mu = 0, sigma = 1, alpha = 0, shape_b = 1;
    std::optional<double> qx0;
    quant->add_option("--dist", dist)->required()->check(CLI::IsMember({"normal", "skew-normal", "beta"}));
    quant->add_option("--p", p)->required();
    quant->add_option("--mu", mu);
    quant->add_option("--sigma", sigma);
    quant->add_option("--alpha", alpha, "skewness (skew-normal) or first shape (beta)");
    quant->add_option("--beta", shape_b, "second shape (beta)");
    quant->add_option("--method", qmethod)->check(CLI::IsMember({"flb", "slub", "tlb"}));
    quant->add_option("--x0", qx0);
    add_common(quant, c_q);

    auto* pval = app.add_subcommand("pvalue", "equal-density two-sided p-value");
    std::string test;
    double obs = 0, nu = 0, nu2 = 0;
    pval->add_option("--test", test)->required()->check(CLI::IsMember({"chisq", "f"}));
    pval->add_option("--obs", obs)->required();
    pval->add_option("--nu", nu)->required();
    pval->add_option("--nu2", nu2);
    add_common(pval, c_p);

    auto* fit = app.add_subcommand("fit", "maximum likelihood fit");
    std::string fdist, data;
    std::optional<double> fx0;
    fit->add_option("--dist", fdist)
        ->required()
        ->check(CLI::IsMember({"gamma", "weibull", "zeta", "yule-simon", "gamma-poisson", "gen-poisson"}));
    fit->add_option("--data", data)->required();
    fit->add_option("--x0", fx0);
    add_common(fit, c_fit);
    c_fit.max_iter = default_fit_options().max_iter;

    auto* roots = app.add_subcommand("roots", "all roots on an interval");
    std::string rproblem, rpoly, interval;
    std::optional<double> flb_g, flb_neg_g;
    double epsilon = 1e-6;
    roots->add_option("--problem", rproblem)->check(CLI::IsMember({"toy63"}));
    roots->add_option("--poly", rpoly, "coefficients, highest degree first");
    roots->add_option("--interval", interval)->required();
    roots->add_option("--flb-g", flb_g);
    roots->add_option("--flb-neg-g", flb_neg_g);
    roots->add_option("--epsilon", epsilon)->check(CLI::PositiveNumber);
    add_common(roots, c_roots);
    c_roots.max_iter = sweep_default_options().max_iter;

    auto* bench = app.add_subcommand("bench", "reproduce the comparison experiments");
    std::string experiment, algs;
    int reps = 1000, threads = 1;
    std::uint64_t seed = 20240601;
    bench->add_option("--experiment", experiment)->required()->check(CLI::IsMember({"table2a", "table2b", "table3"}));
    bench->add_option("--reps", reps)->check(CLI::PositiveNumber);
    bench->add_option("--seed", seed);
    bench->add_option("--threads", threads)->check(CLI::PositiveNumber);
    bench->add_option("--algorithms", algs, "comma separated subset");
    add_common(bench, c_bench);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n" << app.help();
        return 1;
    }

    const Common* active = nullptr;
    try {
        if (*solve) {
            active = &c_solve;
            auto opts = c_solve.opts();
            if (problem == "example1") {
                auto pi = example1_problem();
                const double h = std::numbers::pi / 2;
                BoundSpec b = *pi.bound;
                if (method == "slub") b = Slub{-h * h, h * h};
                if (method == "tlb") b = Tlb{-h * h * h};
                auto r = us_solve(pi.objective, b, x0.value_or(0), opts);
                return finish_solve(out, c_solve, r, {{"root", r.root}, {"g", pi.objective.g(r.root)}});
            }
            auto cs = split_numbers(coeffs);
            if (cs.size() != 4) throw CLI::ValidationError("--coeffs needs a3,a2,a1,a0");
            auto pi = polynomial_problem(cs[0], cs[1], cs[2], cs[3], order, amax);
            if (!method.empty() && method != (cs[0] < 0 ? "slub" : "tlb"))
                throw CLI::ValidationError("polynomial with this a3 uses method " + std::string(cs[0] < 0 ? "slub" : "tlb"));
            auto r = us_iterate(pi.objective, pi.step, x0.value_or(0), opts);
            return finish_solve(out, c_solve, r, {{"root", r.root}, {"g", pi.objective.g(r.root)}});
        }
        if (*quant) {
            active = &c_q;
            auto opts = c_q.opts();
            if (dist == "normal") {
                auto m = qmethod == "flb" ? QuantileMethod::Flb : qmethod == "slub" ? QuantileMethod::Slub : QuantileMethod::Tlb;
                auto r = normal_quantile(p, mu, sigma, qx0.value_or(mu), opts, m);
                return finish_solve(out, c_q, r, {{"quantile", r.root}});
            }
            if (dist == "skew-normal") {
                auto r = skew_normal_quantile(p, mu, sigma, alpha, qx0.value_or(mu), opts);
                return finish_solve(out, c_q, r, {{"quantile", r.root}});
            }
            auto r = beta_quantile_small_params(p, alpha, shape_b, qx0.value_or(alpha / (alpha + shape_b)), opts);
            return finish_solve(out, c_q, r, {{"quantile", r.root}});
        }
        if (*pval) {
            active = &c_p;
            auto opts = c_p.opts();
            EqualTailResult r;
            if (test == "chisq") {
                r = chisq_equal_tail_pvalue(obs, nu, opts);
            } else {
                if (!(nu2 > 0)) throw CLI::ValidationError("--nu2 is required for the F test");
                r = f_equal_tail_pvalue(obs, nu, nu2, opts);
            }
            json res = {{"p_value", r.p_value}, {"matched_point", r.matched_point}, {"case", to_string(r.which)},
                        {"iterations", r.solve.n_iters}};
            json tr = c_p.trace ? trace_json(r.solve.trace) : json(nullptr);
            emit(out, c_p, to_string(r.solve.status), res, tr);
            return r.solve.converged() ? 0 : 2;
        }
        if (*fit) {
            active = &c_fit;
            auto opts = c_fit.opts();
            auto s = Sample::from(read_data_file(data));
            FitResult f;
            if (fdist == "gamma") f = gamma_fit(s, opts);
            else if (fdist == "weibull") f = weibull_fit(s, fx0, opts);
            else if (fdist == "zeta") f = zeta_theta_mle(s, fx0, opts);
            else if (fdist == "yule-simon") f = yule_simon_mle(s, fx0, opts);
            else if (fdist == "gamma-poisson") f = gamma_poisson_fit(s, fx0, opts);
            else f = genpoisson_theta_mle(s, fx0, opts);
            json res = json::object();
            for (auto& [k, v] : f.parameters) res[k] = v;
            res["score"] = f.gradient;
            res["iterations"] = f.solver.n_iters;
            json tr = c_fit.trace ? trace_json(f.solver.trace) : json(nullptr);
            emit(out, c_fit, to_string(f.solver.status), res, tr);
            return 0;
        }
        if (*roots) {
            active = &c_roots;
            auto iv = split_numbers(interval);
            if (iv.size() != 2 || !(iv[0] < iv[1])) throw CLI::ValidationError("--interval needs lo,hi with lo < hi");
            Evaluator g;
            if (!rproblem.empty()) {
                g = [](double x) { return -0.5 * x - 2 * std::sin(x) + 1; };
            } else if (!rpoly.empty()) {
                auto cs = split_numbers(rpoly);
                g = [cs](double x) {
                    double acc = 0;
                    for (double ci : cs) acc = acc * x + ci;
                    return acc;
                };
            } else {
                throw CLI::ValidationError("roots needs --problem or --poly");
            }
            SweepConfig cfg;
            cfg.interval = Domain::open(iv[0], iv[1]);
            cfg.epsilon = epsilon;
            cfg.opts = c_roots.opts();
            if (!flb_g || !flb_neg_g) {
                auto est = estimate_flb_constants(g, cfg.interval);
                err << "note: FLB constants estimated heuristically (" << est.first << ", " << est.second << ")\n";
                cfg.flb_g = flb_g.value_or(est.first);
                cfg.flb_neg_g = flb_neg_g.value_or(est.second);
            } else {
                cfg.flb_g = *flb_g;
                cfg.flb_neg_g = *flb_neg_g;
            }
            auto rs = sweep_roots(g, cfg);
            json arr = json::array();
            for (double r : rs) arr.push_back(r);
            emit(out, c_roots, "Converged", {{"roots", arr}, {"count", rs.size()}}, nullptr);
            return 0;
        }
        active = &c_bench;
        ExperimentSpec spec;
        spec.experiment = experiment;
        spec.n_reps = reps;
        spec.seed = seed;
        spec.threads = threads;
        spec.opts = c_bench.opts();
        if (!algs.empty()) {
            std::stringstream ss(algs);
            std::string a;
            while (std::getline(ss, a, ',')) spec.algorithms.push_back(a);
        }
        auto rep = run_experiment(spec);
        json rows = json::array();
        for (auto& r : rep.rows) {
            std::string name = r.label.empty() ? r.algorithm : r.algorithm + "[" + r.label + "]";
            rows.push_back({{"algorithm", name}, {"percentage", r.percentage}, {"mean_iters", r.mean_iterations},
                            {"time_s", r.time_s}});
        }
        if (c_bench.format == "csv") {
            out << rep.csv(c_bench.digits);
            return 0;
        }
        emit(out, c_bench, "Converged", {{"experiment", rep.experiment}, {"reps", rep.n_reps}, {"seed", rep.seed}, {"rows", rows}},
             nullptr);
        return 0;
    } catch (const CLI::ValidationError& e) {
        err << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ParseError) {
            err << e.what() << "\n";
            return 3;
        }
        if (e.code() == ErrorCode::UnknownProblem || e.code() == ErrorCode::UnknownAlgorithm) {
            err << "usage error: " << e.what() << "\n";
            return 1;
        }
        err << e.what() << "\n";
        if (active) emit(out, *active, to_string(e.code()), json::object(), nullptr);
        return 2;
    }
}

} // namespace us::cli
