#include "fairband/scores.hpp"

#include <cmath>
#include <cstring>
#include <mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "fairband/lp.hpp"

namespace fairband {

namespace {

std::string matrix_key(const RewardMatrix& m) {
    std::string key;
    key.reserve(8 + m.data().size() * sizeof(double));
    int dims[2] = {m.n_agents(), m.n_arms()};
    key.append(reinterpret_cast<const char*>(dims), sizeof(dims));
    key.append(reinterpret_cast<const char*>(m.data().data()), m.data().size() * sizeof(double));
    return key;
}

} // namespace

PfScoreResult pf_score_for_sets(const FavoriteSets& favorites, const Policy& policy) {
    const int n = favorites.n_agents();
    const int k = policy.n_arms();

    // One variable per (agent, favorite arm) pair.
    std::vector<std::pair<int, int>> vars; // (agent, arm)
    std::vector<int> offsets(n + 1, 0);
    for (int i = 0; i < n; ++i) {
        for (int arm : favorites.sets[i]) {
            if (arm >= k) throw std::invalid_argument("pf_score: favorite arm out of policy range");
            vars.emplace_back(i, arm);
        }
        offsets[i + 1] = static_cast<int>(vars.size());
    }

    lp::LinearProgram prog;
    prog.objective.assign(vars.size(), 1.0);
    for (int i = 0; i < n; ++i) {
        std::vector<double> row(vars.size(), 0.0);
        for (int v = offsets[i]; v < offsets[i + 1]; ++v) row[v] = 1.0;
        prog.constraints.push_back({std::move(row), lp::Relation::LessEq, 1.0 / n});
    }
    for (int arm = 0; arm < k; ++arm) {
        std::vector<double> row(vars.size(), 0.0);
        bool any = false;
        for (std::size_t v = 0; v < vars.size(); ++v) {
            if (vars[v].second == arm) {
                row[v] = 1.0;
                any = true;
            }
        }
        if (any) prog.constraints.push_back({std::move(row), lp::Relation::LessEq, policy.prob(arm)});
    }

    lp::LpSolution sol = lp::solve_lp(prog);
    if (sol.status != lp::LpStatus::Optimal)
        throw std::runtime_error("pf_score: allocation LP did not reach optimality");

    std::vector<double> shares(static_cast<std::size_t>(n) * k, 0.0);
    for (std::size_t v = 0; v < vars.size(); ++v)
        shares[static_cast<std::size_t>(vars[v].first) * k + vars[v].second] = std::max(0.0, sol.x[v]);
    double value = std::min(1.0, std::max(0.0, sol.objective_value));
    return {value, ShareAllocation(n, k, std::move(shares), favorites)};
}

PfScoreResult pf_score(const RewardMatrix& means, const Policy& policy, double tie_tolerance) {
    if (means.n_arms() != policy.n_arms())
        throw std::invalid_argument("pf_score: policy/matrix dimension mismatch");
    return pf_score_for_sets(favorite_sets(means, tie_tolerance), policy);
}

double optimal_inequality(const RewardMatrix& means) {
    if (means.n_agents() < 2)
        throw std::invalid_argument("optimal_inequality: undefined for a single agent");
    static std::mutex mutex;
    static std::unordered_map<std::string, double> memo;
    std::string key = matrix_key(means);
    {
        std::lock_guard<std::mutex> lock(mutex);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
    }
    double value = inequality_d(means, ef_optimal(means));
    std::lock_guard<std::mutex> lock(mutex);
    memo.emplace(std::move(key), value);
    return value;
}

double ef_score(const RewardMatrix& means, const Policy& policy) {
    if (means.n_arms() != policy.n_arms())
        throw std::invalid_argument("ef_score: policy/matrix dimension mismatch");
    if (means.n_agents() < 2)
        throw std::invalid_argument("ef_score: undefined for a single agent");
    double d = inequality_d(means, policy);
    double d_star = optimal_inequality(means);
    return 1.0 - std::abs(d - d_star);
}

double uf_score(const RewardMatrix& means, const Policy& policy) {
    if (means.n_arms() != policy.n_arms())
        throw std::invalid_argument("uf_score: policy/matrix dimension mismatch");
    std::vector<double> utils = utilities(means, policy);
    double total = 0.0;
    for (double u : utils) total += u;
    std::vector<double> best_utils = utilities(means, uf_optimal(means));
    double best_total = 0.0;
    for (double u : best_utils) best_total += u;
    if (best_total <= 0.0)
        throw std::invalid_argument("uf_score: undefined for an all-zero reward matrix");
    return total / best_total;
}

FairnessReport score_all(const RewardMatrix& means, const Policy& policy, double tie_tolerance) {
    FairnessReport report{};
    report.pf = pf_score(means, policy, tie_tolerance).value;

    std::vector<double> utils = utilities(means, policy);
    report.total_utility = 0.0;
    for (double u : utils) report.total_utility += u;
    std::vector<double> best_utils = utilities(means, uf_optimal(means));
    report.optimal_total_utility = 0.0;
    for (double u : best_utils) report.optimal_total_utility += u;
    if (report.optimal_total_utility <= 0.0)
        throw std::invalid_argument("score_all: undefined for an all-zero reward matrix");
    report.uf = report.total_utility / report.optimal_total_utility;

    if (means.n_agents() >= 2) {
        report.d_policy = inequality_d_from_utilities(utils);
        report.d_optimal = optimal_inequality(means);
        report.ef = 1.0 - std::abs(*report.d_policy - *report.d_optimal);
    }
    return report;
}

} // namespace fairband
