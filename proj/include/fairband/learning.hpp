#ifndef FAIRBAND_LEARNING_HPP
#define FAIRBAND_LEARNING_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <vector>

#include "fairband/model.hpp"
#include "fairband/solvers.hpp"

namespace fairband {

enum class FairnessMethod { PF, EF, UF };

struct LearnConfig {
    FairnessMethod method = FairnessMethod::PF;
    std::int64_t horizon = 0;          // total pulls T, including the K warmup rounds
    std::optional<double> gamma;       // exploration decay, required for PF
    std::optional<double> alpha;       // confidence scale; defaults 1 (PF), 4 (EF), N (UF)
    std::uint64_t seed = 0;
    std::int64_t trace_every = 1;
    double tie_tolerance = kDefaultTieTolerance; // true favorite sets for mismatch counting
    bool score_trace = true; // compute pf/ef/uf per emitted row (regrets always accumulate)
};

struct BanditInstance {
    RewardMatrix means;
    RewardModel model;
    explicit BanditInstance(RewardModel reward_model)
        : means(reward_model.means()), model(std::move(reward_model)) {}
};

struct RoundTrace {
    std::int64_t t = 0;
    Policy policy = Policy::one_hot(1, 0);
    int arm = -1;
    std::vector<double> rewards; // one observation per agent
    bool forced = false;         // forced-exploration round (PF only)
    double pf = 0.0;
    std::optional<double> ef;
    double uf = 0.0;
    std::int64_t regret_pf = 0; // cumulative mismatch rounds
    double regret_ef = 0.0;     // cumulative D(P_t) - D(P*), NaN when N == 1
    double regret_uf = 0.0;     // cumulative U(P*) - U(P_t)
    std::vector<std::uint64_t> est_favorite_masks; // bit k: arm k in the estimated set
};

struct LearnResult {
    Policy final_policy;
    std::vector<RoundTrace> trace;
};

/// Hoeffding half-width sqrt(2 ln(NKt) / n); +infinity when n == 0.
double ucb_radius(std::int64_t n_pulls, int n_agents, int n_arms, std::int64_t t);

/// Per agent: arms whose upper confidence bound reaches the lower confidence
/// bound of the empirically best arm (ties toward the lowest index).
FavoriteSets estimate_favorite_sets(const EstimatorState& est, double alpha);

/// One policy update per method. step_pf flips the t^{-(1-gamma)} exploration
/// coin and otherwise solves the PF program on the estimated favorite sets;
/// step_ef minimizes D_hat(P) - alpha * sum_k p_k z_k; step_uf plays one-hot
/// on argmax_k sum_i mu_hat[i][k] + alpha * z_k. Infinite radii are capped at
/// 1e6 inside these objectives.
Policy step_pf(const EstimatorState& est, double gamma, double alpha, std::mt19937_64& rng,
               const SolverSettings& settings = {});
Policy step_ef(const EstimatorState& est, double alpha, const SolverSettings& settings = {});
Policy step_uf(const EstimatorState& est, double alpha);

/// Algorithm: pull every arm once, then per round compute the method's
/// policy, sample one arm from it, observe every agent's reward and update
/// the running means. Trace rows are emitted every trace_every rounds (the
/// final round always) and carry scores against the true means plus the
/// cumulative regrets over all rounds so far.
LearnResult learn_policy(const BanditInstance& instance, const LearnConfig& config);

struct RegretSeries {
    std::vector<std::int64_t> pf;
    std::vector<double> ef;
    std::vector<double> uf;
};

/// Recomputes the three cumulative regrets over the given trace rows.
RegretSeries regrets(const std::vector<RoundTrace>& trace, const RewardMatrix& means,
                     double tie_tolerance = kDefaultTieTolerance);

/// CSV schema: t,policy_0..policy_{K-1},arm,forced,pf,ef,uf,regret_pf,regret_ef,regret_uf
void write_trace_csv(std::ostream& out, const std::vector<RoundTrace>& trace);

} // namespace fairband

#endif
