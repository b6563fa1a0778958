#include <gtest/gtest.h>

#include <cmath>

#include "oracle.hpp"
#include "us/pvalues.hpp"

using namespace us;

namespace {

// First sign change of d on an n-point grid over (lo, hi), refined by bisection.
double grid_solve(const std::function<double(double)>& d, double lo, double hi, int n = 10000000) {
    double h = (hi - lo) / n, prev = d(lo + h);
    for (int i = 2; i < n; ++i) {
        double x = lo + i * h, v = d(x);
        if ((v > 0) != (prev > 0)) return oracle::bisect(d, x - h, x);
        prev = v;
    }
    return std::nan("");
}

double chisq_logpdf(double x, double nu) { return (nu / 2 - 1) * std::log(x) - x / 2; }

double f_logpdf(double x, double n1, double n2) {
    return (n1 / 2 - 1) * std::log(x) - (n1 + n2) / 2 * std::log1p(n1 * x / n2);
}

struct Ref {
    double x, p;
};

Ref chisq_oracle(double obs, double nu, double lo, double hi) {
    double c = chisq_logpdf(obs, nu);
    double x = grid_solve([&](double t) { return chisq_logpdf(t, nu) - c; }, lo, hi);
    double a = std::min(x, obs), b = std::max(x, obs);
    return {x, reg_incomplete_gamma_P(nu / 2, a / 2) + 1 - reg_incomplete_gamma_P(nu / 2, b / 2)};
}

Ref f_oracle(double obs, double n1, double n2, double lo, double hi) {
    double c = f_logpdf(obs, n1, n2);
    double x = grid_solve([&](double t) { return f_logpdf(t, n1, n2) - c; }, lo, hi);
    double a = std::min(x, obs), b = std::max(x, obs);
    auto cdf = [&](double t) { return reg_incomplete_beta(n1 * t / (n1 * t + n2), n1 / 2, n2 / 2); };
    return {x, cdf(a) + 1 - cdf(b)};
}

} // namespace

TEST(ChiSquared, AtMode) {
    auto r = chisq_equal_tail_pvalue(2, 4);
    EXPECT_EQ(r.which, TailCase::AtMode);
    EXPECT_EQ(r.p_value, 1);
}

TEST(ChiSquared, CaseIOracle) {
    auto r = chisq_equal_tail_pvalue(1, 4);
    ASSERT_TRUE(r.solve.converged());
    EXPECT_EQ(r.which, TailCase::CaseI);
    auto ref = chisq_oracle(1, 4, 2, 60);
    EXPECT_NEAR(r.matched_point, ref.x, 1e-6);
    EXPECT_NEAR(r.p_value, ref.p, 1e-6);
    EXPECT_GT(r.matched_point, 2);
}

TEST(ChiSquared, CaseIIOracle) {
    auto r = chisq_equal_tail_pvalue(15, 10);
    ASSERT_TRUE(r.solve.converged());
    EXPECT_EQ(r.which, TailCase::CaseII);
    auto ref = chisq_oracle(15, 10, 0, 8);
    EXPECT_NEAR(r.matched_point, ref.x, 1e-6);
    EXPECT_NEAR(r.p_value, ref.p, 1e-6);
    EXPECT_LT(r.matched_point, 8);
    EXPECT_NEAR(r.p_value, 0.168973, 1e-6);
}

TEST(ChiSquared, DensitiesMatch) {
    for (auto [obs, nu] : {std::pair{1.0, 4.0}, {2.0, 10.0}, {15.0, 10.0}, {0.3, 3.0}, {30.0, 12.0}}) {
        auto r = chisq_equal_tail_pvalue(obs, nu);
        ASSERT_TRUE(r.solve.converged());
        double rel = std::expm1(chisq_logpdf(r.matched_point, nu) - chisq_logpdf(obs, nu));
        EXPECT_LE(std::abs(rel), 1e-9) << obs << " " << nu;
        EXPECT_GE(r.p_value, 0);
        EXPECT_LE(r.p_value, 1);
    }
}

TEST(ChiSquared, MonotoneTraceOnCorrectSide) {
    auto r = chisq_equal_tail_pvalue(2, 10);
    auto& tr = r.solve.trace;
    ASSERT_GE(tr.size(), 3u);
    double dir = tr[1].theta - tr[0].theta, root = r.matched_point;
    for (std::size_t i = 1; i < tr.size(); ++i) {
        EXPECT_GE((tr[i].theta - tr[i - 1].theta) * dir, 0);
        EXPECT_GE((root - tr[i].theta) * dir, -1e-9);
        EXPECT_GT(tr[i].theta, 8);
    }
}

TEST(ChiSquared, PValueFallsAwayFromMode) {
    double prev = 1.1;
    for (double obs : {8.5, 10.0, 13.0, 17.0, 22.0, 30.0}) {
        double p = chisq_equal_tail_pvalue(obs, 10).p_value;
        EXPECT_LT(p, prev);
        prev = p;
    }
    prev = 1.1;
    for (double obs : {7.5, 6.0, 4.0, 2.0, 1.0}) {
        double p = chisq_equal_tail_pvalue(obs, 10).p_value;
        EXPECT_LT(p, prev);
        prev = p;
    }
}

TEST(ChiSquared, ClosedStepsMatchGenericPath) {
    for (double obs : {1.0, 15.0}) {
        auto e = chisq_equal_density_problem(obs, obs < 5 ? 4 : 10);
        double x = e.x0;
        for (int k = 0; k < 4; ++k) {
            double gx = e.problem.objective.g(x);
            double closed = e.problem.step(x, gx), generic = us_step_flb(e.problem.objective, e.bound, x);
            EXPECT_NEAR(closed, generic, 1e-10 * std::max(1.0, std::abs(closed)));
            x = closed;
        }
    }
}

TEST(ChiSquared, SmallDegreesOfFreedom) {
    try {
        chisq_equal_tail_pvalue(1, 2);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DomainError);
    }
}

TEST(FDist, AtMode) {
    double m0 = 3.0 * 10 / (5 * 12);
    EXPECT_EQ(f_equal_tail_pvalue(m0, 5, 10).p_value, 1);
}

TEST(FDist, CaseIOracle) {
    auto r = f_equal_tail_pvalue(0.2, 5, 10);
    ASSERT_TRUE(r.solve.converged());
    EXPECT_EQ(r.which, TailCase::CaseI);
    auto ref = f_oracle(0.2, 5, 10, 0.5, 20);
    EXPECT_NEAR(r.matched_point, ref.x, 1e-6);
    EXPECT_NEAR(r.p_value, ref.p, 1e-6);
}

TEST(FDist, CaseIIOracle) {
    auto r = f_equal_tail_pvalue(3.0, 8, 6);
    ASSERT_TRUE(r.solve.converged());
    EXPECT_EQ(r.which, TailCase::CaseII);
    double m0 = 6.0 * 6 / (8 * 8);
    auto ref = f_oracle(3.0, 8, 6, 0, m0);
    EXPECT_NEAR(r.matched_point, ref.x, 1e-6);
    EXPECT_NEAR(r.p_value, ref.p, 1e-6);
    EXPECT_LT(r.matched_point, m0);
}

TEST(FDist, DensitiesMatch) {
    for (auto [obs, n1, n2] : {std::tuple{0.2, 5.0, 10.0}, {3.0, 8.0, 6.0}, {0.05, 3.0, 1.0}, {5.0, 12.0, 30.0}}) {
        auto r = f_equal_tail_pvalue(obs, n1, n2);
        ASSERT_TRUE(r.solve.converged()) << obs;
        double rel = std::expm1(f_logpdf(r.matched_point, n1, n2) - f_logpdf(obs, n1, n2));
        EXPECT_LE(std::abs(rel), 1e-9) << obs;
    }
}

TEST(FDist, ClosedStepsMatchGenericPath) {
    for (auto [obs, n1, n2] : {std::tuple{0.2, 5.0, 10.0}, {3.0, 8.0, 6.0}}) {
        auto e = f_equal_density_problem(obs, n1, n2);
        double x = e.x0;
        for (int k = 0; k < 4; ++k) {
            double gx = e.problem.objective.g(x);
            double closed = e.problem.step(x, gx), generic = us_step_flb(e.problem.objective, e.bound, x);
            EXPECT_NEAR(closed, generic, 1e-10 * std::max(1.0, std::abs(closed)));
            x = closed;
        }
    }
}

TEST(FDist, CdfComplement) {
    for (double x : {0.1, 1.0, 4.0}) EXPECT_NEAR(f_cdf(x, 5, 7) + f_sf(x, 5, 7), 1, 1e-13);
}

TEST(FDist, SmallNu1) { EXPECT_THROW(f_equal_tail_pvalue(1, 2, 5), Error); }
