#include <doctest.h>

#include <algorithm>
#include <stdexcept>

#include <cmath>
#include <random>

#include "fairband/scores.hpp"
#include "fairband/solvers.hpp"
#include "oracles.hpp"

using namespace fairband;

namespace {

RewardMatrix example_matrix() {
    return RewardMatrix::from_rows({{1, 0}, {1, 0}, {0, 1}});
}

RewardMatrix random_matrix(int n, int k, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.05, 0.95);
    std::vector<std::vector<double>> rows(n, std::vector<double>(k));
    for (auto& row : rows)
        for (double& v : row) v = unif(rng);
    return RewardMatrix::from_rows(rows);
}

// Random matrix where agents may have multi-arm favorite sets.
RewardMatrix random_tied_matrix(int n, int k, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.05, 0.95);
    std::vector<std::vector<double>> rows(n, std::vector<double>(k));
    for (auto& row : rows) {
        for (double& v : row) v = unif(rng);
        int favorites = 1 + static_cast<int>(rng() % k);
        double top = *std::max_element(row.begin(), row.end());
        std::vector<int> arms(k);
        for (int a = 0; a < k; ++a) arms[a] = a;
        std::shuffle(arms.begin(), arms.end(), rng);
        for (int c = 0; c < favorites; ++c) row[arms[c]] = top;
    }
    return RewardMatrix::from_rows(rows);
}

} // namespace

TEST_SUITE("solvers") {

TEST_CASE("pf_optimal on the worked example") {
    PfSolution sol = pf_optimal(example_matrix());
    CHECK(sol.policy.prob(0) == doctest::Approx(2.0 / 3).epsilon(1e-9));
    CHECK(sol.policy.prob(1) == doctest::Approx(1.0 / 3).epsilon(1e-9));
    CHECK(sol.shares.at(0, 0) == doctest::Approx(1.0 / 3));
    CHECK(sol.shares.at(2, 1) == doctest::Approx(1.0 / 3));
}

TEST_CASE("pf_optimal forces one-hot when all agents share a favorite") {
    RewardMatrix m = RewardMatrix::from_rows({{0.2, 0.9}, {0.4, 0.8}, {0.1, 0.5}});
    CHECK(pf_optimal(m).policy.prob(1) == doctest::Approx(1.0));
}

TEST_CASE("pf_optimal returns uniform when everyone is indifferent") {
    RewardMatrix m = RewardMatrix::from_rows({{0.5, 0.5, 0.5}, {0.3, 0.3, 0.3}});
    Policy p = pf_optimal(m).policy;
    for (int a = 0; a < 3; ++a) CHECK(p.prob(a) == doctest::Approx(1.0 / 3));
}

TEST_CASE("pf_optimal matches the transportation grid oracle on 3x3 instances") {
    std::mt19937_64 rng = seeded_rng(31);
    for (int trial = 0; trial < 12; ++trial) {
        RewardMatrix m = random_tied_matrix(3, 3, rng);
        FavoriteSets favorites = favorite_sets(m);
        PfSolution sol = pf_optimal(m);
        double solver_value = oracles::share_nsw_value(favorites, sol.policy.clamped());
        // Grid steps of 1/(200 N) keep the |S|/N facets representable.
        auto grid = oracles::grid_best(
            3, 600, [&](const std::vector<double>& p) { return oracles::pf_feasible_policy(favorites, p); },
            [&](const std::vector<double>& p) { return oracles::share_nsw_value(favorites, p); });
        REQUIRE(grid.has_value());
        CHECK(solver_value >= *grid - 1e-4);
    }
}

TEST_CASE("pf_optimal guarantees every agent 1/N of share and proportional utility") {
    std::mt19937_64 rng = seeded_rng(37);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 2 + static_cast<int>(rng() % 4), k = 2 + static_cast<int>(rng() % 4);
        RewardMatrix m = trial % 2 ? random_tied_matrix(n, k, rng) : random_matrix(n, k, rng);
        PfSolution sol = pf_optimal(m);
        std::vector<double> shares = decision_shares(m, sol.policy);
        std::vector<double> utils = utilities(m, sol.policy);
        for (int i = 0; i < n; ++i) {
            CHECK(shares[i] >= 1.0 / n - 1e-6);
            double top = 0.0;
            for (int a = 0; a < k; ++a) top = std::max(top, m.at(i, a));
            CHECK(utils[i] >= top / n - 1e-6);
        }
        CHECK(pf_score(m, sol.policy).value == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("ef_optimal on the worked examples") {
    Policy p = ef_optimal(example_matrix());
    CHECK(p.prob(0) == doctest::Approx(0.5).epsilon(1e-6));

    RewardMatrix scaled = RewardMatrix::from_rows({{1, 0}, {0, 0.1}});
    Policy q = ef_optimal(scaled);
    CHECK(q.prob(0) == doctest::Approx(1.0 / 11).epsilon(1e-6));
    CHECK(q.prob(1) == doctest::Approx(10.0 / 11).epsilon(1e-6));
}

TEST_CASE("ef_optimal returns uniform for identical agents") {
    RewardMatrix m = RewardMatrix::from_rows({{0.3, 0.7}, {0.3, 0.7}});
    Policy p = ef_optimal(m);
    CHECK(p.prob(0) == doctest::Approx(0.5));
}

TEST_CASE("ef_optimal matches a simplex grid on K<=3 instances") {
    std::mt19937_64 rng = seeded_rng(41);
    for (int trial = 0; trial < 10; ++trial) {
        int n = 2 + static_cast<int>(rng() % 3), k = 2 + static_cast<int>(rng() % 2);
        RewardMatrix m = random_matrix(n, k, rng);
        double solver_d = inequality_d(m, ef_optimal(m));
        auto grid = oracles::grid_best(
            k, 140, [](const std::vector<double>&) { return true; },
            [&](const std::vector<double>& p) { return oracles::inequality_value(m, p); },
            /*maximize=*/false);
        CHECK(solver_d <= *grid + 1e-5);
    }
}

TEST_CASE("ef_optimal rejects a single agent") {
    CHECK_THROWS_AS(ef_optimal(RewardMatrix::from_rows({{0.5, 0.5}})), std::invalid_argument);
}

TEST_CASE("uf_optimal") {
    CHECK(uf_optimal(example_matrix()) == Policy::one_hot(2, 0));
    CHECK(uf_optimal(RewardMatrix::from_rows({{0.4, 1}, {1, 0.6}})) == Policy::one_hot(2, 1));
    // Equal column sums tie toward the lowest index.
    CHECK(uf_optimal(RewardMatrix::from_rows({{0.5, 0.5}, {0.2, 0.2}})) == Policy::one_hot(2, 0));
}

TEST_CASE("nsw_optimal on the counterexample fixtures") {
    Policy b11 = nsw_optimal(RewardMatrix::from_rows({{1, 0.99}, {0, 1}}));
    CHECK(b11.prob(0) == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(b11.prob(1) == doctest::Approx(1.0).epsilon(1e-6));

    Policy b13 = nsw_optimal(RewardMatrix::from_rows({{0.4, 1}, {1, 0.6}}));
    CHECK(b13.prob(0) == doctest::Approx(1.0 / 12).epsilon(1e-5));
    CHECK(b13.prob(1) == doctest::Approx(11.0 / 12).epsilon(1e-5));

    Policy sym = nsw_optimal(RewardMatrix::from_rows({{1, 0}, {0, 1}}));
    CHECK(sym.prob(0) == doctest::Approx(0.5).epsilon(1e-7));
}

TEST_CASE("nsw_optimal satisfies first-order optimality at the returned point") {
    std::mt19937_64 rng = seeded_rng(43);
    SolverSettings settings;
    for (int trial = 0; trial < 15; ++trial) {
        int n = 2 + static_cast<int>(rng() % 4), k = 2 + static_cast<int>(rng() % 4);
        RewardMatrix m = random_matrix(n, k, rng);
        Policy p = nsw_optimal(m, settings);
        std::vector<double> utils = utilities(m, p);
        std::vector<double> grad(k, 0.0);
        for (int a = 0; a < k; ++a)
            for (int i = 0; i < n; ++i) grad[a] += m.at(i, a) / std::max(utils[i], 1e-12);
        double at_p = 0.0;
        for (int a = 0; a < k; ++a) at_p += grad[a] * p.prob(a);
        for (int a = 0; a < k; ++a) CHECK(grad[a] - at_p <= settings.duality_gap_tol + 1e-9);
    }
}

TEST_CASE("nsw_optimal rejects an all-zero agent row") {
    CHECK_THROWS_AS(nsw_optimal(RewardMatrix::from_rows({{0, 0}, {0, 1}})), std::invalid_argument);
}

TEST_CASE("scaling all means leaves uf and nsw argmax policies unchanged") {
    std::mt19937_64 rng = seeded_rng(47);
    for (int trial = 0; trial < 10; ++trial) {
        RewardMatrix m = random_matrix(3, 3, rng);
        double lambda = 0.3 + 0.6 * std::uniform_real_distribution<double>(0, 1)(rng);
        std::vector<std::vector<double>> scaled_rows(3, std::vector<double>(3));
        for (int i = 0; i < 3; ++i)
            for (int a = 0; a < 3; ++a) scaled_rows[i][a] = lambda * m.at(i, a);
        RewardMatrix scaled = RewardMatrix::from_rows(scaled_rows);

        CHECK(uf_optimal(m) == uf_optimal(scaled));
        Policy p1 = nsw_optimal(m), p2 = nsw_optimal(scaled);
        for (int a = 0; a < 3; ++a) CHECK(p1.prob(a) == doctest::Approx(p2.prob(a)).epsilon(1e-5));
    }
}

TEST_CASE("ggi_optimal with equal weights reduces to total utility") {
    std::mt19937_64 rng = seeded_rng(53);
    for (int trial = 0; trial < 8; ++trial) {
        RewardMatrix m = random_matrix(3, 3, rng);
        Policy ggi = ggi_optimal(m, {1.0, 1.0, 1.0});
        Policy uf = uf_optimal(m);
        CHECK(oracles::total_utility(m, ggi.clamped()) ==
              doctest::Approx(oracles::total_utility(m, uf.clamped())).epsilon(1e-7));
    }
}

TEST_CASE("ggi_optimal matches grid oracles") {
    RewardMatrix sym = RewardMatrix::from_rows({{1, 0}, {0, 1}});
    Policy p = ggi_optimal(sym, {2.0, 1.0});
    CHECK(p.prob(0) == doctest::Approx(0.5).epsilon(1e-6));

    RewardMatrix m = example_matrix();
    std::vector<double> weights = {4.0, 2.0, 1.0};
    Policy q = ggi_optimal(m, weights);
    auto grid = oracles::grid_best(
        2, 1000, [](const std::vector<double>&) { return true; },
        [&](const std::vector<double>& point) { return oracles::ggi_value(m, point, weights); });
    CHECK(oracles::ggi_value(m, q.clamped(), weights) >= *grid - 1e-3);
}

TEST_CASE("ggi_optimal validates weights") {
    RewardMatrix m = example_matrix();
    CHECK_THROWS_AS(ggi_optimal(m, {1.0, 2.0, 3.0}), std::invalid_argument);
    CHECK_THROWS_AS(ggi_optimal(m, {1.0, 0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(ggi_optimal(m, {1.0, 0.5}), std::invalid_argument);
    CHECK(default_ggi_weights(3) == std::vector<double>{1.0, 0.5, 0.25});
}

TEST_CASE("all returned policies satisfy the policy invariants") {
    std::mt19937_64 rng = seeded_rng(59);
    for (int trial = 0; trial < 10; ++trial) {
        RewardMatrix m = random_tied_matrix(3, 4, rng);
        for (const Policy& p : {pf_optimal(m).policy, ef_optimal(m), uf_optimal(m), nsw_optimal(m),
                                ggi_optimal(m, default_ggi_weights(3))}) {
            double sum = 0.0;
            for (int a = 0; a < p.n_arms(); ++a) {
                CHECK(p.raw()[a] >= -1e-12);
                sum += p.raw()[a];
            }
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

} // TEST_SUITE
