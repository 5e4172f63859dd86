#ifndef FAIRBAND_COREGAME_HPP
#define FAIRBAND_COREGAME_HPP

#include <optional>
#include <vector>

#include "fairband/model.hpp"

namespace fairband {

struct CoreVerdict {
    bool in_core;
    std::optional<std::vector<int>> blocking_coalition; // 0-based agent ids
    std::optional<Policy> blocking_policy;
    double margin = 0.0;
};

/// Checks whether some coalition A and deviation P' satisfy
/// (|A|/N) * value_i(P') >= value_i(P) for every member with one strict
/// inequality, where value is the decision share (procedural core) or the
/// expected utility (outcome core). Coalitions are enumerated in increasing
/// size, so a reported witness has minimal size. Bounded to N <= 20.
CoreVerdict check_procedural_core(const RewardMatrix& means, const Policy& policy,
                                  double tolerance = 1e-9);
CoreVerdict check_outcome_core(const RewardMatrix& means, const Policy& policy,
                               double tolerance = 1e-9);

/// True iff the PF allocation program is feasible with every agent's full
/// 1/N share placed, i.e. pf_score(means, policy) == 1 within tolerance.
bool is_procedurally_fair(const RewardMatrix& means, const Policy& policy,
                          double tolerance = 1e-6);

} // namespace fairband

#endif
