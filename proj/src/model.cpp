#include "fairband/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace fairband {

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw std::invalid_argument(message);
}

} // namespace

RewardMatrix::RewardMatrix(int n_agents, int n_arms, std::vector<double> means)
    : n_agents_(n_agents), n_arms_(n_arms), means_(std::move(means)) {
    require(n_agents_ >= 1, "reward matrix: need at least one agent");
    require(n_arms_ >= 1, "reward matrix: need at least one arm");
    require(means_.size() == static_cast<std::size_t>(n_agents_) * n_arms_,
            "reward matrix: entry count does not match dimensions");
    for (double v : means_) {
        require(std::isfinite(v) && v >= 0.0 && v <= 1.0,
                "reward matrix: entries must be finite and in [0, 1], got " + std::to_string(v));
    }
}

RewardMatrix RewardMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
    require(!rows.empty(), "reward matrix: no rows");
    std::size_t k = rows.front().size();
    std::vector<double> flat;
    flat.reserve(rows.size() * k);
    for (const auto& row : rows) {
        require(row.size() == k, "reward matrix: ragged rows");
        flat.insert(flat.end(), row.begin(), row.end());
    }
    return RewardMatrix(static_cast<int>(rows.size()), static_cast<int>(k), std::move(flat));
}

RewardMatrix RewardMatrix::zeros(int n_agents, int n_arms) {
    return RewardMatrix(n_agents, n_arms,
                        std::vector<double>(static_cast<std::size_t>(n_agents) * n_arms, 0.0));
}

void RewardMatrix::set(int agent, int arm, double value) {
    require(std::isfinite(value) && value >= 0.0 && value <= 1.0,
            "reward matrix: entries must be finite and in [0, 1]");
    means_[static_cast<std::size_t>(agent) * n_arms_ + arm] = value;
}

std::vector<double> RewardMatrix::row(int agent) const {
    auto begin = means_.begin() + static_cast<std::size_t>(agent) * n_arms_;
    return std::vector<double>(begin, begin + n_arms_);
}

Policy::Policy(std::vector<double> probs) : probs_(std::move(probs)) {
    require(!probs_.empty(), "policy: empty");
    double sum = 0.0;
    for (double p : probs_) {
        require(std::isfinite(p), "policy: non-finite entry");
        require(p >= -kPolicyNegativeSlack,
                "policy: entry " + std::to_string(p) + " below tolerance");
        sum += p;
    }
    require(std::abs(sum - 1.0) <= kPolicySumTolerance,
            "policy: entries sum to " + std::to_string(sum) + ", expected 1");
}

Policy Policy::uniform(int n_arms) {
    require(n_arms >= 1, "policy: need at least one arm");
    return Policy(std::vector<double>(n_arms, 1.0 / n_arms));
}

Policy Policy::one_hot(int n_arms, int arm) {
    require(arm >= 0 && arm < n_arms, "policy: one-hot arm out of range");
    std::vector<double> p(n_arms, 0.0);
    p[arm] = 1.0;
    return Policy(std::move(p));
}

std::vector<double> Policy::clamped() const {
    std::vector<double> out(probs_);
    for (double& p : out)
        if (p < 0) p = 0.0;
    return out;
}

FavoriteSets::FavoriteSets(std::vector<std::vector<int>> s, double tol, int n_arms)
    : sets(std::move(s)), tie_tolerance(tol) {
    require(tie_tolerance >= 0.0, "favorite sets: negative tie tolerance");
    require(!sets.empty(), "favorite sets: no agents");
    for (const auto& set : sets) {
        require(!set.empty(), "favorite sets: empty set for some agent");
        int prev = -1;
        for (int arm : set) {
            require(arm >= 0 && arm < n_arms, "favorite sets: arm index out of range");
            require(arm > prev, "favorite sets: arms must be strictly ascending");
            prev = arm;
        }
    }
}

bool FavoriteSets::operator==(const FavoriteSets& other) const {
    return sets == other.sets;
}

ShareAllocation::ShareAllocation(int n_agents, int n_arms, std::vector<double> shares,
                                 const FavoriteSets& favorites)
    : n_agents_(n_agents), n_arms_(n_arms), shares_(std::move(shares)) {
    require(shares_.size() == static_cast<std::size_t>(n_agents_) * n_arms_,
            "share allocation: entry count does not match dimensions");
    require(favorites.n_agents() == n_agents_, "share allocation: favorite sets size mismatch");
    const double row_cap = 1.0 / n_agents_ + 1e-9;
    for (int i = 0; i < n_agents_; ++i) {
        double row_sum = 0.0;
        const auto& fav = favorites.sets[i];
        for (int j = 0; j < n_arms_; ++j) {
            double v = at(i, j);
            require(std::isfinite(v) && v >= -kPolicyNegativeSlack,
                    "share allocation: negative share");
            bool is_fav = std::binary_search(fav.begin(), fav.end(), j);
            require(is_fav || v <= 1e-12, "share allocation: mass on a non-favorite arm");
            row_sum += v;
        }
        require(row_sum <= row_cap, "share allocation: agent row exceeds 1/N");
    }
}

std::vector<double> ShareAllocation::arm_totals() const {
    std::vector<double> totals(n_arms_, 0.0);
    for (int i = 0; i < n_agents_; ++i)
        for (int j = 0; j < n_arms_; ++j) totals[j] += std::max(0.0, at(i, j));
    return totals;
}

RewardModel::RewardModel(int n_agents, int n_arms, std::vector<RewardSpec> entries)
    : n_agents_(n_agents), n_arms_(n_arms), entries_(std::move(entries)) {}

RewardModel RewardModel::point_mass(const RewardMatrix& means) {
    std::vector<RewardSpec> entries;
    entries.reserve(means.data().size());
    for (double m : means.data()) entries.push_back({RewardKind::PointMass, m});
    return RewardModel(means.n_agents(), means.n_arms(), std::move(entries));
}

RewardModel RewardModel::bernoulli(const RewardMatrix& means) {
    std::vector<RewardSpec> entries;
    entries.reserve(means.data().size());
    for (double m : means.data()) {
        require(m > 0.0 && m < 1.0, "bernoulli model: mean must lie strictly inside (0, 1)");
        entries.push_back({RewardKind::Bernoulli, m});
    }
    return RewardModel(means.n_agents(), means.n_arms(), std::move(entries));
}

RewardModel RewardModel::beta_mean_std(const RewardMatrix& means, double std) {
    require(std > 0.0, "beta model: std must be positive");
    std::string offending;
    for (int i = 0; i < means.n_agents(); ++i) {
        for (int k = 0; k < means.n_arms(); ++k) {
            double m = means.at(i, k);
            if (!(m > 0.0 && m < 1.0) || !(std * std < m * (1.0 - m))) {
                offending += " (" + std::to_string(i + 1) + "," + std::to_string(k + 1) + ")";
            }
        }
    }
    require(offending.empty(), "beta model: std " + std::to_string(std) +
                                   " infeasible for entries" + offending);
    std::vector<RewardSpec> entries;
    entries.reserve(means.data().size());
    for (double m : means.data()) entries.push_back({RewardKind::BetaMeanStd, m, std});
    return RewardModel(means.n_agents(), means.n_arms(), std::move(entries));
}

RewardMatrix RewardModel::means() const {
    std::vector<double> m;
    m.reserve(entries_.size());
    for (const auto& e : entries_) m.push_back(e.mean);
    return RewardMatrix(n_agents_, n_arms_, std::move(m));
}

EstimatorState::EstimatorState(int n_agents, int n_arms)
    : estimates(RewardMatrix::zeros(n_agents, n_arms)),
      pull_counts(static_cast<std::size_t>(n_arms), 0) {}

void EstimatorState::record(int arm, const std::vector<double>& rewards) {
    require(arm >= 0 && arm < n_arms(), "estimator: arm out of range");
    require(static_cast<int>(rewards.size()) == n_agents(), "estimator: reward count mismatch");
    std::int64_t n = pull_counts[arm] + 1;
    for (int i = 0; i < n_agents(); ++i) {
        double prev = estimates.at(i, arm);
        estimates.set(i, arm, prev + (rewards[i] - prev) / static_cast<double>(n));
    }
    pull_counts[arm] = n;
}

void EstimatorState::check() const {
    std::int64_t total = std::accumulate(pull_counts.begin(), pull_counts.end(), std::int64_t{0});
    require(total <= step + n_arms(), "estimator: pull counts exceed step budget");
}

FavoriteSets favorite_sets(const RewardMatrix& means, double tie_tolerance) {
    if (tie_tolerance < 0.0) throw std::invalid_argument("favorite_sets: negative tolerance");
    std::vector<std::vector<int>> sets(means.n_agents());
    for (int i = 0; i < means.n_agents(); ++i) {
        double best = means.at(i, 0);
        for (int k = 1; k < means.n_arms(); ++k) best = std::max(best, means.at(i, k));
        for (int k = 0; k < means.n_arms(); ++k)
            if (means.at(i, k) >= best - tie_tolerance) sets[i].push_back(k);
    }
    return FavoriteSets(std::move(sets), tie_tolerance, means.n_arms());
}

std::vector<double> utilities(const RewardMatrix& means, const Policy& policy) {
    if (policy.n_arms() != means.n_arms())
        throw std::invalid_argument("utilities: policy/matrix dimension mismatch");
    std::vector<double> out(means.n_agents(), 0.0);
    for (int i = 0; i < means.n_agents(); ++i) {
        double u = 0.0;
        for (int k = 0; k < means.n_arms(); ++k) u += policy.prob(k) * means.at(i, k);
        out[i] = u;
    }
    return out;
}

std::vector<double> decision_shares(const FavoriteSets& favorites, const Policy& policy) {
    std::vector<double> out(favorites.n_agents(), 0.0);
    for (int i = 0; i < favorites.n_agents(); ++i) {
        double s = 0.0;
        for (int arm : favorites.sets[i]) {
            if (arm >= policy.n_arms())
                throw std::invalid_argument("decision_shares: favorite arm out of policy range");
            s += policy.prob(arm);
        }
        out[i] = s;
    }
    return out;
}

std::vector<double> decision_shares(const RewardMatrix& means, const Policy& policy,
                                    double tie_tolerance) {
    if (policy.n_arms() != means.n_arms())
        throw std::invalid_argument("decision_shares: policy/matrix dimension mismatch");
    return decision_shares(favorite_sets(means, tie_tolerance), policy);
}

double inequality_d_from_utilities(const std::vector<double>& utils) {
    std::size_t n = utils.size();
    if (n < 2) throw std::invalid_argument("inequality_d: undefined for a single agent");
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) {
            double d = utils[i] - utils[j];
            sum += d * d;
        }
    return 2.0 / (static_cast<double>(n) * (static_cast<double>(n) - 1.0)) * sum;
}

double inequality_d(const RewardMatrix& means, const Policy& policy) {
    if (means.n_agents() < 2)
        throw std::invalid_argument("inequality_d: undefined for a single agent");
    return inequality_d_from_utilities(utilities(means, policy));
}

double nash_welfare_utilities(const RewardMatrix& means, const Policy& policy) {
    double product = 1.0;
    for (double u : utilities(means, policy)) product *= u;
    return product;
}

double nash_welfare_shares(const RewardMatrix& means, const Policy& policy, double tie_tolerance) {
    double product = 1.0;
    for (double s : decision_shares(means, policy, tie_tolerance)) product *= s;
    return product;
}

double sample_reward(const RewardModel& model, int agent, int arm, std::mt19937_64& rng) {
    const RewardSpec& spec = model.at(agent, arm);
    switch (spec.kind) {
        case RewardKind::PointMass:
            return spec.mean;
        case RewardKind::Bernoulli: {
            std::bernoulli_distribution d(spec.mean);
            return d(rng) ? 1.0 : 0.0;
        }
        case RewardKind::BetaMeanStd: {
            // Method-of-moments: nu = m(1-m)/s^2 - 1, a = m nu, b = (1-m) nu.
            double m = spec.mean;
            double nu = m * (1.0 - m) / (spec.std * spec.std) - 1.0;
            if (nu <= 0.0)
                throw std::invalid_argument("sample_reward: infeasible beta std");
            std::gamma_distribution<double> ga(m * nu, 1.0);
            std::gamma_distribution<double> gb((1.0 - m) * nu, 1.0);
            double x = ga(rng);
            double y = gb(rng);
            double draw = (x + y > 0.0) ? x / (x + y) : m;
            return std::clamp(draw, 0.0, 1.0);
        }
    }
    throw std::invalid_argument("sample_reward: unknown reward kind");
}

} // namespace fairband
