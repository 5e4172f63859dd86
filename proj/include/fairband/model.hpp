#ifndef FAIRBAND_MODEL_HPP
#define FAIRBAND_MODEL_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "fairband/common.hpp"

namespace fairband {

/// N x K matrix of mean rewards. Entries must be finite and in [0, 1].
/// Used both for true means and for running estimates.
class RewardMatrix {
  public:
    RewardMatrix(int n_agents, int n_arms, std::vector<double> means);
    static RewardMatrix from_rows(const std::vector<std::vector<double>>& rows);
    static RewardMatrix zeros(int n_agents, int n_arms);

    int n_agents() const { return n_agents_; }
    int n_arms() const { return n_arms_; }
    double at(int agent, int arm) const { return means_[static_cast<std::size_t>(agent) * n_arms_ + arm]; }
    void set(int agent, int arm, double value);
    const std::vector<double>& data() const { return means_; }
    std::vector<double> row(int agent) const;

    bool operator==(const RewardMatrix& other) const = default;

  private:
    int n_agents_;
    int n_arms_;
    std::vector<double> means_;
};

/// Probability vector over arms. Entries may carry tiny negative noise
/// (>= -1e-12) from solvers; prob() clamps those to 0 on read.
class Policy {
  public:
    explicit Policy(std::vector<double> probs);
    static Policy uniform(int n_arms);
    static Policy one_hot(int n_arms, int arm);

    int n_arms() const { return static_cast<int>(probs_.size()); }
    double prob(int arm) const {
        double p = probs_[arm];
        return p < 0 ? 0.0 : p;
    }
    /// Raw entries, negatives clamped.
    std::vector<double> clamped() const;
    const std::vector<double>& raw() const { return probs_; }

    bool operator==(const Policy& other) const = default;

  private:
    std::vector<double> probs_;
};

/// Per-agent sets of favorite arms (0-based, ascending). Also houses the
/// UCB-derived candidate sets used while learning, which need not coincide
/// with any matrix's exact argmax arms.
struct FavoriteSets {
    std::vector<std::vector<int>> sets;
    double tie_tolerance = kDefaultTieTolerance;

    FavoriteSets(std::vector<std::vector<int>> s, double tol, int n_arms);
    int n_agents() const { return static_cast<int>(sets.size()); }
    bool operator==(const FavoriteSets& other) const;
};

/// N x K matrix of decision shares y[i][j]: probability mass agent i
/// contributes to arm j. Supported on favorite arms, row sums <= 1/N.
class ShareAllocation {
  public:
    ShareAllocation(int n_agents, int n_arms, std::vector<double> shares, const FavoriteSets& favorites);

    int n_agents() const { return n_agents_; }
    int n_arms() const { return n_arms_; }
    double at(int agent, int arm) const { return shares_[static_cast<std::size_t>(agent) * n_arms_ + arm]; }
    const std::vector<double>& data() const { return shares_; }
    /// Column sums, i.e. the policy induced by the allocation.
    std::vector<double> arm_totals() const;

  private:
    int n_agents_;
    int n_arms_;
    std::vector<double> shares_;
};

enum class RewardKind { PointMass, Bernoulli, BetaMeanStd };

struct RewardSpec {
    RewardKind kind;
    double mean;
    double std = 0.0; // only meaningful for BetaMeanStd
};

/// Per-(agent, arm) reward distribution grid. Bernoulli and Beta entries
/// need means strictly inside (0, 1); Beta additionally needs
/// std^2 < mean * (1 - mean).
class RewardModel {
  public:
    static RewardModel point_mass(const RewardMatrix& means);
    static RewardModel bernoulli(const RewardMatrix& means);
    static RewardModel beta_mean_std(const RewardMatrix& means, double std);

    int n_agents() const { return n_agents_; }
    int n_arms() const { return n_arms_; }
    const RewardSpec& at(int agent, int arm) const {
        return entries_[static_cast<std::size_t>(agent) * n_arms_ + arm];
    }
    RewardMatrix means() const;

  private:
    RewardModel(int n_agents, int n_arms, std::vector<RewardSpec> entries);
    int n_agents_;
    int n_arms_;
    std::vector<RewardSpec> entries_;
};

/// Running reward estimates plus pull counts, owned by a single learning run.
struct EstimatorState {
    RewardMatrix estimates;
    std::vector<std::int64_t> pull_counts;
    std::int64_t step = 0;

    EstimatorState(int n_agents, int n_arms);
    int n_agents() const { return estimates.n_agents(); }
    int n_arms() const { return estimates.n_arms(); }
    /// Incremental mean update for one pull of `arm` observing rewards[i]
    /// for every agent i. The first observation is written as-is.
    void record(int arm, const std::vector<double>& rewards);
    void check() const;
};

/// Arms within tie_tolerance of each agent's maximum mean, ascending.
FavoriteSets favorite_sets(const RewardMatrix& means, double tie_tolerance = kDefaultTieTolerance);

/// U_i = sum_k p_k * mu[i][k], per agent.
std::vector<double> utilities(const RewardMatrix& means, const Policy& policy);

/// DS_i = sum over agent i's favorite arms of p_k, per agent.
std::vector<double> decision_shares(const RewardMatrix& means, const Policy& policy,
                                    double tie_tolerance = kDefaultTieTolerance);
std::vector<double> decision_shares(const FavoriteSets& favorites, const Policy& policy);

/// Mean squared pairwise utility difference:
/// D(P) = 2 / (N (N-1)) * sum_{i>j} (U_i - U_j)^2. Requires N >= 2.
double inequality_d(const RewardMatrix& means, const Policy& policy);
double inequality_d_from_utilities(const std::vector<double>& utils);

/// Product of agent utilities / decision shares.
double nash_welfare_utilities(const RewardMatrix& means, const Policy& policy);
double nash_welfare_shares(const RewardMatrix& means, const Policy& policy,
                           double tie_tolerance = kDefaultTieTolerance);

/// One draw from the (agent, arm) entry of the model. Always lands in [0, 1].
double sample_reward(const RewardModel& model, int agent, int arm, std::mt19937_64& rng);

} // namespace fairband

#endif
