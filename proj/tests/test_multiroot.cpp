#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracle.hpp"
#include "us/multiroot.hpp"

using namespace us;

namespace {

double toy(double x) { return -0.5 * x - 2 * std::sin(x) + 1; }

SweepConfig toy_config() {
    SweepConfig c;
    c.interval = Domain::open(0, 2 * std::numbers::pi);
    c.flb_g = -2.5;
    c.flb_neg_g = -1.5;
    return c;
}

// Roots from sign changes on a dense grid, each refined by bisection.
std::vector<double> dense_oracle(const std::function<double(double)>& g, double lo, double hi, int n = 200000) {
    std::vector<double> r;
    double h = (hi - lo) / n, prev = g(lo + h);
    for (int i = 2; i < n; ++i) {
        double x = lo + i * h, v = g(x);
        if ((v > 0) != (prev > 0)) r.push_back(oracle::bisect(g, x - h, x));
        prev = v;
    }
    return r;
}

} // namespace

TEST(Sweep, ThreeRootExample) {
    auto roots = sweep_roots(toy, toy_config());
    ASSERT_EQ(roots.size(), 3u);
    EXPECT_NEAR(roots[0], 0.4090497, 1e-6);
    EXPECT_NEAR(roots[1], 3.535612, 1e-6);
    EXPECT_NEAR(roots[2], 5.308993, 1e-6);
    auto ref = dense_oracle(toy, 0, 2 * std::numbers::pi);
    ASSERT_EQ(ref.size(), 3u);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(roots[i], ref[i], 1e-7);
}

TEST(Sweep, Linear) {
    SweepConfig c;
    c.interval = Domain::open(0, 2);
    c.flb_g = -1.5;
    c.flb_neg_g = -1.5;
    auto roots = sweep_roots([](double x) { return x - 1; }, c);
    ASSERT_EQ(roots.size(), 1u);
    EXPECT_NEAR(roots[0], 1, 1e-8);
}

TEST(Sweep, FactoredCubic) {
    auto g = [](double x) { return (x - 1) * (x - 2) * (x - 3); };
    // g' = 3x^2 - 12x + 11 lies in [-1, 11] on [0, 4]
    SweepConfig c;
    c.interval = Domain::open(0, 4);
    c.flb_g = -1.5;
    c.flb_neg_g = -11.5;
    auto roots = sweep_roots(g, c);
    ASSERT_EQ(roots.size(), 3u);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(roots[i], i + 1, 1e-8);
}

TEST(Sweep, OutputInvariants) {
    auto c = toy_config();
    auto roots = sweep_roots(toy, c);
    for (std::size_t i = 0; i < roots.size(); ++i) {
        EXPECT_LE(std::abs(toy(roots[i])), c.opts.tol_g);
        if (i) {
            EXPECT_GT(roots[i] - roots[i - 1], c.epsilon);
        }
    }
}

TEST(Sweep, CountMatchesSignChanges) {
    auto g = [](double x) { return std::sin(3 * x) + 0.3; };
    SweepConfig c;
    c.interval = Domain::open(0.01, 6);
    c.flb_g = -3.2;
    c.flb_neg_g = -3.2;
    auto roots = sweep_roots(g, c);
    auto ref = dense_oracle(g, 0.01, 6);
    ASSERT_EQ(roots.size(), ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(roots[i], ref[i], 1e-7);
}

TEST(Sweep, SubSolvesAreMonotone) {
    // first sub-solve from the left end moves right only
    OrientedObjective o;
    o.g = toy;
    o.domain = Domain::closed(1e-6, 2 * std::numbers::pi);
    auto r = us_solve(o, FlbConstant{-2.5}, 1e-6);
    for (std::size_t i = 1; i < r.trace.size(); ++i) EXPECT_GT(r.trace[i].theta, r.trace[i - 1].theta);
}

TEST(Sweep, MaxRoots) {
    auto c = toy_config();
    c.max_roots = 2;
    try {
        sweep_roots(toy, c);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MaxRootsExceeded);
    }
}

TEST(Sweep, BadConfig) {
    auto c = toy_config();
    c.flb_g = 1;
    EXPECT_THROW(sweep_roots(toy, c), Error);
    c = toy_config();
    c.interval = Domain::real_line();
    EXPECT_THROW(sweep_roots(toy, c), Error);
}

TEST(Sweep, NoRoots) {
    SweepConfig c;
    c.interval = Domain::open(0, 1);
    c.flb_g = -1;
    c.flb_neg_g = -1;
    EXPECT_TRUE(sweep_roots([](double x) { return 2 + x; }, c).empty());
}

TEST(FlbEstimate, HeuristicCoversExample) {
    auto [a, b] = estimate_flb_constants(toy, Domain::open(0, 2 * std::numbers::pi));
    // g' = -0.5 - 2 cos x ranges over [-2.5, 1.5]
    EXPECT_LE(a, -2.5);
    EXPECT_LE(b, -1.5);
    auto c = toy_config();
    c.flb_g = a;
    c.flb_neg_g = b;
    EXPECT_EQ(sweep_roots(toy, c).size(), 3u);
}
