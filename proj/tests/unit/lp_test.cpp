#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "getf/lp.hpp"
#include "support/oracles.hpp"

namespace getf {
namespace {

// Random bounded LP: a budget row keeps the region bounded, the rest mixes relations.
LinearProgram random_lp(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> nvars(1, 6);
    std::uniform_int_distribution<int> nrows(1, 7);
    std::uniform_int_distribution<int> rel(0, 5);
    std::uniform_real_distribution<double> coef(-3.0, 3.0);
    std::uniform_real_distribution<double> rhs(-2.0, 6.0);
    const std::size_t n = static_cast<std::size_t>(nvars(rng));
    LinearProgram lp(n);
    for (double& c : lp.objective) c = coef(rng);
    std::vector<std::pair<std::size_t, double>> budget;
    for (std::size_t v = 0; v < n; ++v) budget.emplace_back(v, 1.0);
    lp.add(budget, Relation::LessEqual, 10.0, "budget");
    const int rows = nrows(rng);
    for (int r = 0; r < rows; ++r) {
        std::vector<std::pair<std::size_t, double>> terms;
        for (std::size_t v = 0; v < n; ++v) terms.emplace_back(v, std::round(coef(rng) * 4.0) / 4.0);
        const int k = rel(rng);
        const Relation relation = k < 3 ? Relation::LessEqual : (k < 5 ? Relation::GreaterEqual : Relation::Equal);
        lp.add(terms, relation, std::round(rhs(rng) * 4.0) / 4.0);
    }
    return lp;
}

TEST(SolveLp, SingleActiveConstraint) {
    LinearProgram lp(2);
    lp.objective = {-1.0, -1.0};
    lp.add({{0, 1.0}, {1, 1.0}}, Relation::LessEqual, 1.0);
    const LpSolution s = solve_lp(lp);
    ASSERT_EQ(s.status, LpStatus::Optimal);
    EXPECT_NEAR(s.objective, -1.0, 1e-9);
}

TEST(SolveLp, OneTaskOneMachineMakespan) {
    // x = 1, C >= 3x, T >= C, T >= 3x.
    LinearProgram lp(3);
    lp.objective = {0.0, 0.0, 1.0};
    lp.add({{0, 1.0}}, Relation::Equal, 1.0);
    lp.add({{1, 1.0}, {0, -3.0}}, Relation::GreaterEqual, 0.0);
    lp.add({{2, 1.0}, {1, -1.0}}, Relation::GreaterEqual, 0.0);
    lp.add({{2, 1.0}, {0, -3.0}}, Relation::GreaterEqual, 0.0);
    const LpSolution s = solve_lp(lp);
    ASSERT_EQ(s.status, LpStatus::Optimal);
    EXPECT_NEAR(s.objective, 3.0, 1e-9);
}

TEST(SolveLp, InfeasibleAndUnbounded) {
    LinearProgram bad(1);
    bad.add({{0, 1.0}}, Relation::LessEqual, 1.0);
    bad.add({{0, 1.0}}, Relation::GreaterEqual, 2.0);
    EXPECT_EQ(solve_lp(bad).status, LpStatus::Infeasible);

    LinearProgram open(2);
    open.objective = {-1.0, 0.0};
    open.add({{0, 1.0}, {1, -1.0}}, Relation::LessEqual, 1.0);
    EXPECT_EQ(solve_lp(open).status, LpStatus::Unbounded);
}

TEST(SolveLp, RedundantEqualities) {
    LinearProgram lp(2);
    lp.objective = {1.0, 2.0};
    lp.add({{0, 1.0}, {1, 1.0}}, Relation::Equal, 2.0);
    lp.add({{0, 2.0}, {1, 2.0}}, Relation::Equal, 4.0);
    lp.add({{0, 1.0}}, Relation::LessEqual, 1.5);
    const LpSolution s = solve_lp(lp);
    ASSERT_EQ(s.status, LpStatus::Optimal);
    EXPECT_NEAR(s.objective, 1.5 + 2.0 * 0.5, 1e-9);
}

TEST(SolveLp, RejectsMalformedInput) {
    LinearProgram lp(2);
    lp.constraints.push_back({{1.0}, Relation::LessEqual, 1.0, ""});
    EXPECT_THROW(solve_lp(lp), LpError);
    LinearProgram nan(1);
    nan.objective[0] = std::nan("");
    EXPECT_THROW(solve_lp(nan), LpError);
}

TEST(SolveLp, MatchesVertexEnumeration) {
    std::mt19937_64 rng(7);
    int optimal = 0;
    for (int t = 0; t < 300; ++t) {
        const LinearProgram lp = random_lp(rng);
        const LpSolution s = solve_lp(lp);
        const std::optional<double> ref = testing::vertex_enumeration_minimum(lp);
        if (!ref) {
            EXPECT_EQ(s.status, LpStatus::Infeasible) << "trial " << t;
            continue;
        }
        ASSERT_EQ(s.status, LpStatus::Optimal) << "trial " << t;
        EXPECT_NEAR(s.objective, *ref, 1e-7) << "trial " << t;
        EXPECT_LE(max_violation(lp, s.x), kFeasibilityTol) << "trial " << t;
        ++optimal;
    }
    EXPECT_GT(optimal, 100);
}

TEST(SolveLp, NoSampledFeasiblePointBeatsOptimum) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (int t = 0; t < 50; ++t) {
        const LinearProgram lp = random_lp(rng);
        const LpSolution s = solve_lp(lp);
        if (s.status != LpStatus::Optimal) continue;
        for (int k = 0; k < 2000; ++k) {
            std::vector<double> x(lp.num_vars());
            for (double& v : x) v = u(rng) / static_cast<double>(lp.num_vars());
            if (max_violation(lp, x) > 0.0) continue;
            double obj = 0.0;
            for (std::size_t v = 0; v < x.size(); ++v) obj += lp.objective[v] * x[v];
            EXPECT_GE(obj, s.objective - 1e-9);
        }
    }
}

TEST(SolveLp, Deterministic) {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 20; ++t) {
        const LinearProgram lp = random_lp(rng);
        const LpSolution a = solve_lp(lp);
        const LpSolution b = solve_lp(lp);
        EXPECT_EQ(a.status, b.status);
        EXPECT_EQ(a.x, b.x);
        EXPECT_EQ(a.objective, b.objective);
        EXPECT_EQ(a.pivots, b.pivots);
    }
}

TEST(WriteLpFormat, ContainsSections) {
    LinearProgram lp(2);
    lp.objective = {1.0, -2.0};
    lp.names = {"x", "y"};
    lp.add({{0, 1.0}, {1, 1.0}}, Relation::LessEqual, 4.0, "cap");
    std::ostringstream os;
    write_lp_format(lp, os);
    const std::string text = os.str();
    EXPECT_NE(text.find("Minimize"), std::string::npos);
    EXPECT_NE(text.find("Subject To"), std::string::npos);
    EXPECT_NE(text.find("cap:"), std::string::npos);
    EXPECT_NE(text.find("End"), std::string::npos);
}

} // namespace
} // namespace getf
