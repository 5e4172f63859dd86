#ifndef FAIRBAND_SOLVERS_HPP
#define FAIRBAND_SOLVERS_HPP

#include <vector>

#include "fairband/model.hpp"

namespace fairband {

struct SolverSettings {
    enum class StepRule { LineSearch, Diminishing };

    int max_iterations = 20000;
    double duality_gap_tol = 1e-8;
    StepRule step_rule = StepRule::LineSearch;
    int grid_oracle_resolution = 0; // consumed by test oracles only
};

struct PfSolution {
    Policy policy;
    ShareAllocation shares;
};

/// Maximizes the decision-share Nash welfare sum_i log(sum_{j in F_i} p_j)
/// over allocations y with sum_{j in F_i} y_ij = 1/N and supp(y_i) in F_i.
/// Every iterate satisfies the procedural-fairness constraints exactly, so
/// the returned policy is procedurally fair regardless of how tight the
/// Frank-Wolfe gap got.
PfSolution pf_optimal(const RewardMatrix& means, double tie_tolerance = kDefaultTieTolerance,
                      const SolverSettings& settings = {});
PfSolution pf_optimal_for_sets(const FavoriteSets& favorites, int n_arms,
                               const SolverSettings& settings = {});

/// Minimizes the pairwise inequality D(P) over the simplex. Requires N >= 2.
/// Returns the solver's limit point; the attained D value is unique even
/// when the minimizer is not. All agents identical => uniform policy.
Policy ef_optimal(const RewardMatrix& means, const SolverSettings& settings = {});

/// One-hot policy on the arm with the largest utility column sum;
/// ties break toward the lowest arm index.
Policy uf_optimal(const RewardMatrix& means);

/// Maximizes sum_i log(U_i(P)) over the simplex. Every agent needs at least
/// one strictly positive mean.
Policy nsw_optimal(const RewardMatrix& means, const SolverSettings& settings = {});

/// Maximizes the Generalized Gini Index sum_i w_i u_(i) (utilities sorted
/// ascending, weights positive and non-increasing) via the ordered weighted
/// average LP reformulation.
Policy ggi_optimal(const RewardMatrix& means, const std::vector<double>& weights,
                   const SolverSettings& settings = {});

/// w_i = 2^{-(i-1)}.
std::vector<double> default_ggi_weights(int n_agents);

/// Minimizes scale * sum_r (rows[r] . p)^2 + linear . p over the simplex.
/// Shared by ef_optimal and the equality-fairness learning step.
Policy minimize_quadratic_over_simplex(const std::vector<std::vector<double>>& rows, double scale,
                                       const std::vector<double>& linear, int n_arms,
                                       const SolverSettings& settings);

} // namespace fairband

#endif
