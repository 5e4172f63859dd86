#ifndef FAIRBAND_SCORES_HPP
#define FAIRBAND_SCORES_HPP

#include <optional>

#include "fairband/model.hpp"
#include "fairband/solvers.hpp"

namespace fairband {

struct PfScoreResult {
    double value;
    ShareAllocation shares;
};

/// Value of the linear program
///   max sum_i sum_{j in F_i} y_ij
///   s.t. sum_{j in F_i} y_ij <= 1/N, sum_{i : j in F_i} y_ij <= p_j, y >= 0,
/// together with a maximizing allocation. The same program with a caller
/// supplied favorite structure backs the learning loop.
PfScoreResult pf_score(const RewardMatrix& means, const Policy& policy,
                       double tie_tolerance = kDefaultTieTolerance);
PfScoreResult pf_score_for_sets(const FavoriteSets& favorites, const Policy& policy);

/// EF(mu, P) = 1 - |D(P) - D(P*)|. Requires N >= 2.
double ef_score(const RewardMatrix& means, const Policy& policy);

/// Ratio of achieved total utility to the utilitarian optimum. Requires at
/// least one strictly positive mean.
double uf_score(const RewardMatrix& means, const Policy& policy);

/// Minimum inequality D(P*), memoized per reward matrix. The optimal value is
/// unique even when the minimizing policy is not, so caching is sound. The
/// memo is guarded by a mutex; concurrent callers see consistent values.
double optimal_inequality(const RewardMatrix& means);

struct FairnessReport {
    double pf;
    std::optional<double> ef; // absent when N == 1
    double uf;
    std::optional<double> d_policy;
    std::optional<double> d_optimal;
    double total_utility;
    double optimal_total_utility;
};

FairnessReport score_all(const RewardMatrix& means, const Policy& policy,
                         double tie_tolerance = kDefaultTieTolerance);

} // namespace fairband

#endif
