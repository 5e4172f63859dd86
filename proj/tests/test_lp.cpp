#include <doctest.h>

#include <algorithm>
#include <stdexcept>

#include <cmath>
#include <random>

#include "fairband/lp.hpp"
#include "oracles.hpp"

using namespace fairband;
using lp::LinearProgram;
using lp::LpStatus;
using lp::Relation;

TEST_SUITE("lp") {

TEST_CASE("one-variable maximum") {
    LinearProgram prog;
    prog.objective = {1.0};
    prog.constraints.push_back({{1.0}, Relation::LessEq, 3.0});
    lp::LpSolution sol = lp::solve_lp(prog);
    CHECK(sol.status == LpStatus::Optimal);
    CHECK(sol.x[0] == doctest::Approx(3.0));
    CHECK(sol.objective_value == doctest::Approx(3.0));
}

TEST_CASE("infeasible system") {
    LinearProgram prog;
    prog.objective = {1.0, 1.0};
    prog.constraints.push_back({{1.0, 1.0}, Relation::LessEq, 1.0});
    prog.constraints.push_back({{1.0, -1.0}, Relation::GreaterEq, 2.0});
    CHECK(lp::solve_lp(prog).status == LpStatus::Infeasible);
}

TEST_CASE("unbounded objective") {
    LinearProgram prog;
    prog.objective = {1.0, 0.0};
    prog.constraints.push_back({{0.0, 1.0}, Relation::LessEq, 1.0});
    CHECK(lp::solve_lp(prog).status == LpStatus::Unbounded);
}

TEST_CASE("bounds are honored") {
    LinearProgram prog;
    prog.objective = {1.0, -1.0};
    prog.lower_bounds = {0.5, 1.0};
    prog.upper_bounds = {std::optional<double>(2.0), std::optional<double>(4.0)};
    prog.constraints.push_back({{1.0, 1.0}, Relation::LessEq, 5.0});
    lp::LpSolution sol = lp::solve_lp(prog);
    CHECK(sol.status == LpStatus::Optimal);
    CHECK(sol.x[0] == doctest::Approx(2.0));
    CHECK(sol.x[1] == doctest::Approx(1.0));
}

TEST_CASE("the three-agent allocation program evaluates to 5/6") {
    // max y11 + y21 + y32 st y11+y21 <= 1/2 (arm 1), y32 <= 1/2 (arm 2),
    // each agent row <= 1/3.
    LinearProgram prog;
    prog.objective = {1.0, 1.0, 1.0};
    prog.constraints.push_back({{1.0, 0.0, 0.0}, Relation::LessEq, 1.0 / 3});
    prog.constraints.push_back({{0.0, 1.0, 0.0}, Relation::LessEq, 1.0 / 3});
    prog.constraints.push_back({{0.0, 0.0, 1.0}, Relation::LessEq, 1.0 / 3});
    prog.constraints.push_back({{1.0, 1.0, 0.0}, Relation::LessEq, 0.5});
    prog.constraints.push_back({{0.0, 0.0, 1.0}, Relation::LessEq, 0.5});
    lp::LpSolution sol = lp::solve_lp(prog);
    CHECK(sol.status == LpStatus::Optimal);
    CHECK(sol.objective_value == doctest::Approx(5.0 / 6).epsilon(1e-12));
}

TEST_CASE("max_min_margin") {
    lp::LpSolution single = lp::max_min_margin({{1.0, 0.0}}, {0.0});
    CHECK(single.status == LpStatus::Optimal);
    CHECK(single.objective_value == doctest::Approx(1.0));
    CHECK(single.x[0] == doctest::Approx(1.0));

    lp::LpSolution pair = lp::max_min_margin({{1.0, 0.0}, {0.0, 1.0}}, {0.0, 0.0});
    CHECK(pair.objective_value == doctest::Approx(0.5));
    CHECK(pair.x[0] == doctest::Approx(0.5));

    CHECK_THROWS_AS(lp::max_min_margin({}, {}), std::invalid_argument);
}

TEST_CASE("objective scaling preserves the argmax") {
    LinearProgram prog;
    prog.objective = {2.0, 1.0};
    prog.constraints.push_back({{1.0, 1.0}, Relation::LessEq, 1.0});
    lp::LpSolution base = lp::solve_lp(prog);
    for (double lambda : {0.5, 3.0, 17.0}) {
        LinearProgram scaled = prog;
        for (double& c : scaled.objective) c *= lambda;
        lp::LpSolution sol = lp::solve_lp(scaled);
        CHECK(sol.objective_value == doctest::Approx(lambda * base.objective_value).epsilon(1e-9));
        CHECK(sol.x == base.x);
    }
}

TEST_CASE("random LPs agree with vertex enumeration") {
    std::mt19937_64 rng = seeded_rng(29);
    std::uniform_real_distribution<double> coeff(-2.0, 2.0);
    std::uniform_real_distribution<double> rhs_dist(-1.0, 3.0);
    int optimal_count = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        int n = 1 + static_cast<int>(rng() % 5);
        int m = 1 + static_cast<int>(rng() % 5);
        LinearProgram prog;
        prog.objective.resize(n);
        for (double& c : prog.objective) c = coeff(rng);
        for (int r = 0; r < m; ++r) {
            lp::Constraint c;
            c.coeffs.resize(n);
            for (double& v : c.coeffs) v = coeff(rng);
            int kind = static_cast<int>(rng() % 3);
            c.rel = kind == 0 ? Relation::LessEq : kind == 1 ? Relation::GreaterEq : Relation::Equal;
            c.rhs = rhs_dist(rng);
            prog.constraints.push_back(std::move(c));
        }
        // A box keeps the region bounded so the vertex oracle is exhaustive.
        prog.upper_bounds.assign(n, std::optional<double>(10.0));

        lp::LpSolution sol = lp::solve_lp(prog);
        if (sol.status != LpStatus::Optimal) continue;
        ++optimal_count;

        for (const auto& c : prog.constraints) {
            double lhs = 0.0;
            for (int j = 0; j < n; ++j) lhs += c.coeffs[j] * sol.x[j];
            if (c.rel == Relation::LessEq) CHECK(lhs <= c.rhs + 1e-8);
            if (c.rel == Relation::GreaterEq) CHECK(lhs >= c.rhs - 1e-8);
            if (c.rel == Relation::Equal) CHECK(lhs == doctest::Approx(c.rhs).epsilon(1e-8));
        }

        auto oracle = oracles::lp_vertex_oracle(prog);
        REQUIRE(oracle.has_value());
        CHECK(sol.objective_value == doctest::Approx(*oracle).epsilon(1e-6));
    }
    // The generator should produce a healthy share of feasible instances.
    CHECK(optimal_count > 200);
}

} // TEST_SUITE
