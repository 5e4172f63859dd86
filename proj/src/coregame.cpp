#include "fairband/coregame.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fairband/lp.hpp"
#include "fairband/scores.hpp"

namespace fairband {

namespace {

// Blocking search for one coalition: maximize the total margin
//   sum_{i in A} [(|A|/N) rows[i] . P' - current[i]]
// subject to each member's margin being nonnegative and P' in the simplex.
// The coalition blocks iff the optimum exceeds the tolerance.
struct BlockResult {
    bool blocks;
    double margin;
    std::vector<double> policy;
};

BlockResult coalition_block(const std::vector<std::vector<double>>& rows,
                            const std::vector<double>& current,
                            const std::vector<int>& coalition, int n_agents, int n_arms,
                            double tolerance) {
    const double ratio = static_cast<double>(coalition.size()) / n_agents;

    lp::LinearProgram prog;
    prog.objective.assign(n_arms, 0.0);
    double offset = 0.0;
    for (int i : coalition) {
        for (int a = 0; a < n_arms; ++a) prog.objective[a] += ratio * rows[i][a];
        offset += current[i];
    }
    std::vector<double> simplex_row(n_arms, 1.0);
    prog.constraints.push_back({std::move(simplex_row), lp::Relation::Equal, 1.0});
    for (int i : coalition) {
        std::vector<double> row(n_arms);
        for (int a = 0; a < n_arms; ++a) row[a] = ratio * rows[i][a];
        prog.constraints.push_back({std::move(row), lp::Relation::GreaterEq, current[i]});
    }

    lp::LpSolution sol = lp::solve_lp(prog);
    if (sol.status == lp::LpStatus::Infeasible) return {false, 0.0, {}};
    if (sol.status != lp::LpStatus::Optimal)
        throw std::runtime_error("core check: blocking LP did not reach optimality");
    double margin = sol.objective_value - offset;
    if (margin <= tolerance) return {false, margin, {}};

    // Verify the witness directly before reporting it.
    for (int i : coalition) {
        double deviated = 0.0;
        for (int a = 0; a < n_arms; ++a) deviated += rows[i][a] * sol.x[a];
        if (ratio * deviated < current[i] - lp::kFeasibilityTolerance)
            throw std::runtime_error("core check: witness failed post-hoc verification");
    }
    return {true, margin, sol.x};
}

CoreVerdict check_core(const std::vector<std::vector<double>>& rows,
                       const std::vector<double>& current, int n_agents, int n_arms,
                       double tolerance) {
    if (n_agents > 20)
        throw std::invalid_argument("core check: coalition enumeration is bounded to N <= 20");

    // All nonempty coalitions ordered by size, then lexicographically.
    std::vector<std::vector<int>> coalitions;
    for (unsigned mask = 1; mask < (1u << n_agents); ++mask) {
        std::vector<int> members;
        for (int i = 0; i < n_agents; ++i)
            if (mask & (1u << i)) members.push_back(i);
        coalitions.push_back(std::move(members));
    }
    std::stable_sort(coalitions.begin(), coalitions.end(),
                     [](const auto& a, const auto& b) { return a.size() < b.size(); });

    double worst_margin = 0.0;
    for (const auto& coalition : coalitions) {
        BlockResult result = coalition_block(rows, current, coalition, n_agents, n_arms, tolerance);
        worst_margin = std::max(worst_margin, result.margin);
        if (result.blocks) {
            CoreVerdict verdict;
            verdict.in_core = false;
            verdict.blocking_coalition = coalition;
            verdict.blocking_policy = Policy(result.policy);
            verdict.margin = result.margin;
            return verdict;
        }
    }
    return {true, std::nullopt, std::nullopt, worst_margin};
}

} // namespace

CoreVerdict check_procedural_core(const RewardMatrix& means, const Policy& policy,
                                  double tolerance) {
    if (means.n_arms() != policy.n_arms())
        throw std::invalid_argument("core check: policy/matrix dimension mismatch");
    FavoriteSets favorites = favorite_sets(means);
    std::vector<std::vector<double>> indicator(means.n_agents(),
                                               std::vector<double>(means.n_arms(), 0.0));
    for (int i = 0; i < means.n_agents(); ++i)
        for (int arm : favorites.sets[i]) indicator[i][arm] = 1.0;
    return check_core(indicator, decision_shares(favorites, policy), means.n_agents(),
                      means.n_arms(), tolerance);
}

CoreVerdict check_outcome_core(const RewardMatrix& means, const Policy& policy, double tolerance) {
    if (means.n_arms() != policy.n_arms())
        throw std::invalid_argument("core check: policy/matrix dimension mismatch");
    std::vector<std::vector<double>> rows(means.n_agents());
    for (int i = 0; i < means.n_agents(); ++i) rows[i] = means.row(i);
    return check_core(rows, utilities(means, policy), means.n_agents(), means.n_arms(), tolerance);
}

bool is_procedurally_fair(const RewardMatrix& means, const Policy& policy, double tolerance) {
    return pf_score(means, policy).value >= 1.0 - tolerance;
}

} // namespace fairband
