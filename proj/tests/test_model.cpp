#include <doctest.h>

#include <algorithm>
#include <stdexcept>

#include <cmath>
#include <random>

#include "fairband/model.hpp"

using namespace fairband;

namespace {

// The three-agent, two-arm worked example used throughout.
RewardMatrix example_matrix() {
    return RewardMatrix::from_rows({{1, 0}, {1, 0}, {0, 1}});
}

} // namespace

TEST_SUITE("model") {

TEST_CASE("reward matrix validates entries") {
    CHECK_THROWS_AS(RewardMatrix::from_rows({{1.2, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(RewardMatrix::from_rows({{-0.1, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(RewardMatrix::from_rows({{0.5, std::nan("")}}), std::invalid_argument);
    CHECK_THROWS_AS(RewardMatrix(0, 2, {}), std::invalid_argument);
    RewardMatrix m = example_matrix();
    CHECK(m.n_agents() == 3);
    CHECK(m.n_arms() == 2);
    CHECK(m.at(2, 1) == 1.0);
}

TEST_CASE("policy invariants") {
    CHECK_THROWS_AS(Policy({0.5, 0.4}), std::invalid_argument);
    CHECK_THROWS_AS(Policy({1.5, -0.5}), std::invalid_argument);
    Policy p({1.0 + 5e-13, -5e-13});
    CHECK(p.prob(1) == 0.0); // clamped on read
    CHECK(Policy::uniform(4).prob(0) == doctest::Approx(0.25));
    CHECK(Policy::one_hot(3, 2).prob(2) == 1.0);
}

TEST_CASE("favorite sets") {
    FavoriteSets f = favorite_sets(example_matrix(), 0.0);
    CHECK(f.sets == std::vector<std::vector<int>>{{0}, {0}, {1}});

    FavoriteSets tie = favorite_sets(RewardMatrix::from_rows({{0.5, 0.5}}), 0.0);
    CHECK(tie.sets == std::vector<std::vector<int>>{{0, 1}});

    FavoriteSets close = favorite_sets(RewardMatrix::from_rows({{0.7, 0.7 - 1e-12, 0.1}}), 1e-9);
    CHECK(close.sets == std::vector<std::vector<int>>{{0, 1}});
}

TEST_CASE("favorite sets are singletons under a strict maximum") {
    std::mt19937_64 rng = seeded_rng(7);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        int n = 1 + static_cast<int>(rng() % 4), k = 2 + static_cast<int>(rng() % 4);
        std::vector<std::vector<double>> rows(n, std::vector<double>(k));
        for (auto& row : rows)
            for (double& v : row) v = unif(rng);
        FavoriteSets f = favorite_sets(RewardMatrix::from_rows(rows), 0.0);
        for (const auto& set : f.sets) CHECK(set.size() == 1);
    }
}

TEST_CASE("utilities") {
    RewardMatrix m = example_matrix();
    std::vector<double> u = utilities(m, Policy({0.5, 0.5}));
    CHECK(u[0] == doctest::Approx(0.5));
    CHECK(u[1] == doctest::Approx(0.5));
    CHECK(u[2] == doctest::Approx(0.5));

    std::vector<double> hot = utilities(m, Policy::one_hot(2, 0));
    CHECK(hot == std::vector<double>{1, 1, 0});

    RewardMatrix b13 = RewardMatrix::from_rows({{0.4, 1}, {1, 0.6}});
    std::vector<double> ub = utilities(b13, Policy({1.0 / 12, 11.0 / 12}));
    CHECK(ub[0] == doctest::Approx(0.95).epsilon(1e-12));
    CHECK(ub[1] == doctest::Approx(0.6333333333333333).epsilon(1e-12));

    CHECK_THROWS_AS(utilities(m, Policy({1.0})), std::invalid_argument);
}

TEST_CASE("decision shares") {
    RewardMatrix m = example_matrix();
    std::vector<double> ds = decision_shares(m, Policy({2.0 / 3, 1.0 / 3}));
    CHECK(ds[0] == doctest::Approx(2.0 / 3));
    CHECK(ds[1] == doctest::Approx(2.0 / 3));
    CHECK(ds[2] == doctest::Approx(1.0 / 3));

    RewardMatrix solo = RewardMatrix::from_rows({{0.2, 0.8}});
    CHECK(decision_shares(solo, Policy::one_hot(2, 1))[0] == doctest::Approx(1.0));

    RewardMatrix b13 = RewardMatrix::from_rows({{0.4, 1}, {1, 0.6}});
    std::vector<double> db = decision_shares(b13, Policy({1.0 / 12, 11.0 / 12}));
    CHECK(db[0] == doctest::Approx(11.0 / 12));
    CHECK(db[1] == doctest::Approx(1.0 / 12));
}

TEST_CASE("utilities and decision shares are affine in the policy") {
    std::mt19937_64 rng = seeded_rng(11);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        int n = 2 + static_cast<int>(rng() % 3), k = 2 + static_cast<int>(rng() % 3);
        std::vector<std::vector<double>> rows(n, std::vector<double>(k));
        for (auto& row : rows)
            for (double& v : row) v = unif(rng);
        RewardMatrix m = RewardMatrix::from_rows(rows);

        auto random_policy = [&] {
            std::vector<double> p(k);
            double sum = 0.0;
            for (double& v : p) sum += v = -std::log(unif(rng));
            for (double& v : p) v /= sum;
            return Policy(p);
        };
        Policy a = random_policy(), b = random_policy();
        double lambda = unif(rng);
        std::vector<double> mixed(k);
        for (int j = 0; j < k; ++j) mixed[j] = lambda * a.prob(j) + (1 - lambda) * b.prob(j);
        Policy mix(mixed);

        std::vector<double> ua = utilities(m, a), ub = utilities(m, b), um = utilities(m, mix);
        std::vector<double> da = decision_shares(m, a), db = decision_shares(m, b),
                            dm = decision_shares(m, mix);
        for (int i = 0; i < n; ++i) {
            CHECK(um[i] == doctest::Approx(lambda * ua[i] + (1 - lambda) * ub[i]).epsilon(1e-12));
            CHECK(dm[i] == doctest::Approx(lambda * da[i] + (1 - lambda) * db[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("inequality D") {
    RewardMatrix m = example_matrix();
    CHECK(inequality_d(m, Policy({0.5, 0.5})) == doctest::Approx(0.0));
    CHECK(inequality_d(m, Policy::one_hot(2, 0)) == doctest::Approx(2.0 / 3));

    // [[M,0],[0,1]] scaled into [0,1] as [[1,0],[0,1/M]]; the equalizing
    // policy (1/(M+1), M/(M+1)) zeroes the disparity.
    RewardMatrix scaled = RewardMatrix::from_rows({{1, 0}, {0, 0.1}});
    CHECK(inequality_d(scaled, Policy({1.0 / 11, 10.0 / 11})) == doctest::Approx(0.0).epsilon(1e-12));

    CHECK_THROWS_AS(inequality_d(RewardMatrix::from_rows({{0.5, 0.5}}), Policy({0.5, 0.5})),
                    std::invalid_argument);
}

TEST_CASE("inequality D is permutation invariant and zero iff equal") {
    std::mt19937_64 rng = seeded_rng(13);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        int n = 2 + static_cast<int>(rng() % 4), k = 2 + static_cast<int>(rng() % 3);
        std::vector<std::vector<double>> rows(n, std::vector<double>(k));
        for (auto& row : rows)
            for (double& v : row) v = unif(rng);
        std::vector<double> p(k);
        double sum = 0.0;
        for (double& v : p) sum += v = unif(rng) + 0.01;
        for (double& v : p) v /= sum;

        RewardMatrix m = RewardMatrix::from_rows(rows);
        double d = inequality_d(m, Policy(p));
        std::shuffle(rows.begin(), rows.end(), rng);
        CHECK(inequality_d(RewardMatrix::from_rows(rows), Policy(p)) ==
              doctest::Approx(d).epsilon(1e-12));

        std::vector<double> utils = utilities(m, Policy(p));
        bool all_equal = true;
        for (double u : utils) all_equal = all_equal && std::abs(u - utils[0]) <= 1e-12;
        CHECK((d <= 1e-12) == all_equal);
    }
}

TEST_CASE("nash welfares") {
    CHECK(nash_welfare_utilities(RewardMatrix::from_rows({{1, 0}, {0, 1}}), Policy({0.5, 0.5})) ==
          doctest::Approx(0.25));
    CHECK(nash_welfare_shares(example_matrix(), Policy({2.0 / 3, 1.0 / 3})) ==
          doctest::Approx(4.0 / 27));
    CHECK(nash_welfare_utilities(RewardMatrix::from_rows({{1, 0.99}, {0, 1}}), Policy({0, 1})) ==
          doctest::Approx(0.99));
    // A zero factor collapses the product.
    CHECK(nash_welfare_utilities(RewardMatrix::from_rows({{1, 0}, {0, 1}}), Policy({1, 0})) == 0.0);
}

TEST_CASE("reward models validate their parameters") {
    RewardMatrix boundary = RewardMatrix::from_rows({{0.0, 1.0}});
    CHECK_NOTHROW(RewardModel::point_mass(boundary));
    CHECK_THROWS_AS(RewardModel::bernoulli(boundary), std::invalid_argument);
    CHECK_THROWS_AS(RewardModel::beta_mean_std(RewardMatrix::from_rows({{0.1, 0.5}}), 0.31),
                    std::invalid_argument);
    CHECK_NOTHROW(RewardModel::beta_mean_std(RewardMatrix::from_rows({{0.1, 0.9}}), 0.1));
}

TEST_CASE("sample_reward point mass and bernoulli") {
    std::mt19937_64 rng = seeded_rng(17);
    RewardModel pm = RewardModel::point_mass(RewardMatrix::from_rows({{0.37}}));
    for (int i = 0; i < 5; ++i) CHECK(sample_reward(pm, 0, 0, rng) == 0.37);

    RewardModel bern = RewardModel::bernoulli(RewardMatrix::from_rows({{0.5}}));
    double mean = 0.0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) mean += sample_reward(bern, 0, 0, rng);
    mean /= draws;
    CHECK(mean == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("sampled rewards stay inside the unit interval") {
    std::mt19937_64 rng = seeded_rng(19);
    RewardMatrix means = RewardMatrix::from_rows({{0.9, 0.1, 0.5}});
    std::vector<RewardModel> models = {RewardModel::point_mass(means), RewardModel::bernoulli(means),
                                       RewardModel::beta_mean_std(means, 0.1)};
    for (const auto& model : models) {
        for (int i = 0; i < 1000000; ++i) {
            double r = sample_reward(model, 0, static_cast<int>(rng() % 3), rng);
            if (!(r >= 0.0 && r <= 1.0)) {
                CHECK(r >= 0.0);
                CHECK(r <= 1.0);
                break;
            }
        }
    }
    CHECK(true);
}

TEST_CASE("beta moments match the requested mean and std") {
    std::mt19937_64 rng = seeded_rng(23);
    // mean 0.9, std 0.1 corresponds to Beta(7.2, 0.8); mean 0.5 to Beta(12, 12)
    for (double mean : {0.9, 0.5}) {
        RewardModel model = RewardModel::beta_mean_std(RewardMatrix::from_rows({{mean}}), 0.1);
        double sum = 0.0, sq = 0.0;
        const int draws = 200000;
        for (int i = 0; i < draws; ++i) {
            double r = sample_reward(model, 0, 0, rng);
            sum += r;
            sq += r * r;
        }
        double m = sum / draws;
        double s = std::sqrt(sq / draws - m * m);
        CHECK(m == doctest::Approx(mean).epsilon(0.01));
        CHECK(s == doctest::Approx(0.1).epsilon(0.05));
    }
}

TEST_CASE("estimator state incremental updates") {
    EstimatorState est(2, 2);
    est.step = 1;
    est.record(0, {1.0, 0.0});
    CHECK(est.estimates.at(0, 0) == 1.0);
    est.step = 2;
    est.record(0, {0.0, 1.0});
    CHECK(est.estimates.at(0, 0) == doctest::Approx(0.5));
    CHECK(est.estimates.at(1, 0) == doctest::Approx(0.5));
    CHECK(est.pull_counts[0] == 2);
    CHECK_NOTHROW(est.check());
}

TEST_CASE("share allocation invariants") {
    FavoriteSets favorites = favorite_sets(example_matrix());
    // Mass off the favorite arms is rejected.
    CHECK_THROWS_AS(ShareAllocation(3, 2, {0, 1.0 / 3, 1.0 / 3, 0, 0, 1.0 / 3}, favorites),
                    std::invalid_argument);
    // A row above 1/N is rejected.
    CHECK_THROWS_AS(ShareAllocation(3, 2, {0.5, 0, 1.0 / 3, 0, 0, 1.0 / 3}, favorites),
                    std::invalid_argument);
    ShareAllocation ok(3, 2, {1.0 / 3, 0, 1.0 / 3, 0, 0, 1.0 / 3}, favorites);
    CHECK(ok.arm_totals()[0] == doctest::Approx(2.0 / 3));
}

} // TEST_SUITE
