#include "fairband/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fairband/lp.hpp"

namespace fairband {

namespace {

Policy make_policy(std::vector<double> probs) {
    double sum = 0.0;
    for (double& p : probs) {
        if (p < 0.0 && p > -1e-9) p = 0.0;
        sum += p;
    }
    if (!(sum > 0.5)) throw std::runtime_error("solver produced a degenerate policy");
    for (double& p : probs) p /= sum;
    return Policy(std::move(probs));
}

// Maximizes phi(t) = sum_i log(base[i] + t * delta[i]) over t in [0, t_max]
// by bisection on the (strictly decreasing) derivative.
double log_sum_line_search(const std::vector<double>& base, const std::vector<double>& delta,
                           double t_max) {
    constexpr double kFloor = 1e-12;
    auto deriv = [&](double t) {
        double d = 0.0;
        for (std::size_t i = 0; i < base.size(); ++i) {
            double v = std::max(base[i] + t * delta[i], kFloor);
            d += delta[i] / v;
        }
        return d;
    };
    if (deriv(0.0) <= 0.0) return 0.0;
    if (deriv(t_max) >= 0.0) return t_max;
    double lo = 0.0, hi = t_max;
    for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        (deriv(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Euclidean projection onto the probability simplex.
std::vector<double> project_simplex(std::vector<double> v) {
    std::vector<double> u(v);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double cumulative = 0.0, theta = 0.0;
    int rho = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        cumulative += u[i];
        double candidate = (cumulative - 1.0) / static_cast<double>(i + 1);
        if (u[i] - candidate > 0.0) {
            rho = static_cast<int>(i + 1);
            theta = candidate;
        }
    }
    for (double& x : v) x = std::max(0.0, x - theta);
    return v;
}

int argmax_lowest(const std::vector<double>& v) {
    int best = 0;
    for (std::size_t k = 1; k < v.size(); ++k)
        if (v[k] > v[best]) best = static_cast<int>(k);
    return best;
}

} // namespace

PfSolution pf_optimal_for_sets(const FavoriteSets& favorites, int n_arms,
                               const SolverSettings& settings) {
    const int n = favorites.n_agents();
    const double share = 1.0 / n;

    // When every agent is indifferent between all arms the welfare is
    // constant over the polytope; return the uniform policy by convention.
    bool all_full = true;
    for (const auto& f : favorites.sets) all_full = all_full && static_cast<int>(f.size()) == n_arms;
    if (all_full) {
        std::vector<double> y(static_cast<std::size_t>(n) * n_arms, share / n_arms);
        return {Policy::uniform(n_arms), ShareAllocation(n, n_arms, std::move(y), favorites)};
    }

    // y[i][c] is agent i's mass on favorites.sets[i][c].
    std::vector<std::vector<double>> y(n);
    for (int i = 0; i < n; ++i)
        y[i].assign(favorites.sets[i].size(), share / static_cast<double>(favorites.sets[i].size()));

    std::vector<std::vector<int>> agents_on_arm(n_arms);
    for (int i = 0; i < n; ++i)
        for (int arm : favorites.sets[i]) agents_on_arm[arm].push_back(i);

    std::vector<double> p(n_arms), s(n), grad(n_arms);
    auto refresh = [&] {
        std::fill(p.begin(), p.end(), 0.0);
        for (int i = 0; i < n; ++i)
            for (std::size_t c = 0; c < y[i].size(); ++c) p[favorites.sets[i][c]] += y[i][c];
        for (int i = 0; i < n; ++i) {
            double sum = 0.0;
            for (int arm : favorites.sets[i]) sum += p[arm];
            s[i] = sum; // >= 1/N on the feasible set
        }
        for (int j = 0; j < n_arms; ++j) {
            double g = 0.0;
            for (int a : agents_on_arm[j]) g += 1.0 / s[a];
            grad[j] = g;
        }
    };

    for (int iter = 0; iter < settings.max_iterations; ++iter) {
        refresh();

        // Frank-Wolfe vertex: each agent moves its 1/N to its best arm.
        double vertex_score = 0.0, current_score = 0.0;
        std::vector<int> best_arm(n);
        for (int i = 0; i < n; ++i) {
            int b = favorites.sets[i][0];
            for (int arm : favorites.sets[i])
                if (grad[arm] > grad[b]) b = arm;
            best_arm[i] = b;
            vertex_score += share * grad[b];
        }
        for (int j = 0; j < n_arms; ++j) current_score += p[j] * grad[j];
        if (vertex_score - current_score <= settings.duality_gap_tol) break;

        // Per-agent swap pass: shift mass from the worst supported arm to the
        // best arm with an exact line search. Keeps iterates feasible and
        // speeds up identification of the optimal face.
        for (int i = 0; i < n; ++i) {
            const auto& fav = favorites.sets[i];
            int best_c = 0, worst_c = -1;
            for (std::size_t c = 0; c < fav.size(); ++c) {
                if (grad[fav[c]] > grad[fav[best_c]]) best_c = static_cast<int>(c);
                if (y[i][c] > 0.0 && (worst_c < 0 || grad[fav[c]] < grad[fav[worst_c]]))
                    worst_c = static_cast<int>(c);
            }
            if (worst_c < 0 || best_c == worst_c) continue;
            int from = fav[worst_c], to = fav[best_c];
            if (grad[to] - grad[from] <= 0.0) continue;
            std::vector<double> delta(n, 0.0);
            for (int a : agents_on_arm[to]) delta[a] += 1.0;
            for (int a : agents_on_arm[from]) delta[a] -= 1.0;
            double m = log_sum_line_search(s, delta, y[i][worst_c]);
            if (m <= 0.0) continue;
            y[i][worst_c] -= m;
            y[i][best_c] += m;
            p[from] -= m;
            p[to] += m;
            for (int a = 0; a < n; ++a) s[a] += m * delta[a];
            for (int j = 0; j < n_arms; ++j) {
                double g = 0.0;
                for (int a : agents_on_arm[j]) g += 1.0 / s[a];
                grad[j] = g;
            }
        }

        // Global Frank-Wolfe step toward the product vertex.
        std::vector<double> dp(n_arms, 0.0);
        for (int i = 0; i < n; ++i) {
            dp[best_arm[i]] += share;
            for (std::size_t c = 0; c < y[i].size(); ++c) dp[favorites.sets[i][c]] -= y[i][c];
        }
        std::vector<double> ds(n, 0.0);
        for (int i = 0; i < n; ++i)
            for (int arm : favorites.sets[i]) ds[i] += dp[arm];
        double tau = log_sum_line_search(s, ds, 1.0);
        if (tau > 0.0) {
            for (int i = 0; i < n; ++i) {
                for (std::size_t c = 0; c < y[i].size(); ++c) {
                    double target = favorites.sets[i][c] == best_arm[i] ? share : 0.0;
                    y[i][c] += tau * (target - y[i][c]);
                }
            }
        }
    }

    refresh();
    std::vector<double> flat(static_cast<std::size_t>(n) * n_arms, 0.0);
    for (int i = 0; i < n; ++i)
        for (std::size_t c = 0; c < y[i].size(); ++c)
            flat[static_cast<std::size_t>(i) * n_arms + favorites.sets[i][c]] = std::max(0.0, y[i][c]);
    return {make_policy(p), ShareAllocation(n, n_arms, std::move(flat), favorites)};
}

PfSolution pf_optimal(const RewardMatrix& means, double tie_tolerance,
                      const SolverSettings& settings) {
    return pf_optimal_for_sets(favorite_sets(means, tie_tolerance), means.n_arms(), settings);
}

Policy minimize_quadratic_over_simplex(const std::vector<std::vector<double>>& rows, double scale,
                                       const std::vector<double>& linear, int n_arms,
                                       const SolverSettings& settings) {
    if (n_arms == 1) return Policy::one_hot(1, 0);
    std::vector<double> lin = linear.empty() ? std::vector<double>(n_arms, 0.0) : linear;

    double curvature = 0.0;
    for (const auto& r : rows) {
        double norm2 = 0.0;
        for (double v : r) norm2 += v * v;
        curvature += norm2;
    }
    curvature *= 2.0 * scale;

    if (curvature <= 1e-15) {
        // Purely linear objective.
        double lo = *std::min_element(lin.begin(), lin.end());
        double hi = *std::max_element(lin.begin(), lin.end());
        if (hi - lo <= 1e-15) return Policy::uniform(n_arms);
        int best = 0;
        for (int k = 1; k < n_arms; ++k)
            if (lin[k] < lin[best]) best = k;
        return Policy::one_hot(n_arms, best);
    }

    std::vector<double> p(n_arms, 1.0 / n_arms);
    std::vector<double> grad(n_arms), dots(rows.size());
    auto compute_grad = [&] {
        for (std::size_t r = 0; r < rows.size(); ++r) {
            double d = 0.0;
            for (int k = 0; k < n_arms; ++k) d += rows[r][k] * p[k];
            dots[r] = d;
        }
        for (int k = 0; k < n_arms; ++k) {
            double g = lin[k];
            for (std::size_t r = 0; r < rows.size(); ++r) g += 2.0 * scale * dots[r] * rows[r][k];
            grad[k] = g;
        }
    };

    const double eta = 1.0 / curvature;
    for (int iter = 0; iter < settings.max_iterations; ++iter) {
        compute_grad();
        double at_p = 0.0, lowest = grad[0];
        for (int k = 0; k < n_arms; ++k) {
            at_p += grad[k] * p[k];
            lowest = std::min(lowest, grad[k]);
        }
        if (at_p - lowest <= settings.duality_gap_tol) break;

        std::vector<double> target(n_arms);
        double step = settings.step_rule == SolverSettings::StepRule::Diminishing
                          ? eta / std::sqrt(static_cast<double>(iter + 1))
                          : eta;
        for (int k = 0; k < n_arms; ++k) target[k] = p[k] - step * grad[k];
        target = project_simplex(std::move(target));

        double tau = 1.0;
        if (settings.step_rule == SolverSettings::StepRule::LineSearch) {
            // Exact minimizer of the quadratic along the segment p -> target.
            std::vector<double> dir(n_arms);
            for (int k = 0; k < n_arms; ++k) dir[k] = target[k] - p[k];
            double gd = 0.0;
            for (int k = 0; k < n_arms; ++k) gd += grad[k] * dir[k];
            double dhd = 0.0;
            for (const auto& r : rows) {
                double rd = 0.0;
                for (int k = 0; k < n_arms; ++k) rd += r[k] * dir[k];
                dhd += rd * rd;
            }
            dhd *= 2.0 * scale;
            if (dhd > 1e-18) tau = std::clamp(-gd / dhd, 0.0, 1.0);
            if (tau <= 0.0) break;
        }
        for (int k = 0; k < n_arms; ++k) p[k] += tau * (target[k] - p[k]);
    }
    return make_policy(p);
}

Policy ef_optimal(const RewardMatrix& means, const SolverSettings& settings) {
    const int n = means.n_agents(), k = means.n_arms();
    if (n < 2) throw std::invalid_argument("ef_optimal: undefined for a single agent");

    std::vector<std::vector<double>> pair_rows;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) {
            std::vector<double> diff(k);
            for (int a = 0; a < k; ++a) diff[a] = means.at(i, a) - means.at(j, a);
            pair_rows.push_back(std::move(diff));
        }
    double scale = 2.0 / (static_cast<double>(n) * (n - 1.0));
    return minimize_quadratic_over_simplex(pair_rows, scale, {}, k, settings);
}

Policy uf_optimal(const RewardMatrix& means) {
    int best = 0;
    double best_sum = -1.0;
    for (int k = 0; k < means.n_arms(); ++k) {
        double sum = 0.0;
        for (int i = 0; i < means.n_agents(); ++i) sum += means.at(i, k);
        if (sum > best_sum) {
            best_sum = sum;
            best = k;
        }
    }
    return Policy::one_hot(means.n_arms(), best);
}

Policy nsw_optimal(const RewardMatrix& means, const SolverSettings& settings) {
    const int n = means.n_agents(), k = means.n_arms();
    constexpr double kUtilityFloor = 1e-12;
    for (int i = 0; i < n; ++i) {
        double row_max = 0.0;
        for (int a = 0; a < k; ++a) row_max = std::max(row_max, means.at(i, a));
        if (row_max <= 0.0)
            throw std::invalid_argument("nsw_optimal: agent with all-zero means makes the log welfare unbounded below");
    }

    std::vector<double> p(k, 1.0 / k), u(n), grad(k);
    auto refresh = [&] {
        for (int i = 0; i < n; ++i) {
            double v = 0.0;
            for (int a = 0; a < k; ++a) v += p[a] * means.at(i, a);
            u[i] = std::max(v, kUtilityFloor);
        }
        for (int a = 0; a < k; ++a) {
            double g = 0.0;
            for (int i = 0; i < n; ++i) g += means.at(i, a) / u[i];
            grad[a] = g;
        }
    };

    for (int iter = 0; iter < settings.max_iterations; ++iter) {
        refresh();
        int b = argmax_lowest(grad);
        double at_p = 0.0;
        for (int a = 0; a < k; ++a) at_p += grad[a] * p[a];
        if (grad[b] - at_p <= settings.duality_gap_tol) break;

        if (iter % 2 == 0) {
            // Swap step: worst supported arm -> best arm.
            int worst = -1;
            for (int a = 0; a < k; ++a)
                if (p[a] > 0.0 && (worst < 0 || grad[a] < grad[worst])) worst = a;
            if (worst >= 0 && worst != b && grad[b] > grad[worst]) {
                std::vector<double> delta(n);
                for (int i = 0; i < n; ++i) delta[i] = means.at(i, b) - means.at(i, worst);
                double m = log_sum_line_search(u, delta, p[worst]);
                if (m > 0.0) {
                    p[worst] -= m;
                    p[b] += m;
                    continue;
                }
            }
        }
        // Frank-Wolfe step toward vertex b.
        std::vector<double> delta(n);
        for (int i = 0; i < n; ++i) delta[i] = means.at(i, b) - u[i];
        double tau = log_sum_line_search(u, delta, 1.0);
        if (tau <= 0.0) break;
        for (int a = 0; a < k; ++a) p[a] *= (1.0 - tau);
        p[b] += tau;
    }
    return make_policy(p);
}

std::vector<double> default_ggi_weights(int n_agents) {
    std::vector<double> w(n_agents);
    double v = 1.0;
    for (int i = 0; i < n_agents; ++i, v *= 0.5) w[i] = v;
    return w;
}

Policy ggi_optimal(const RewardMatrix& means, const std::vector<double>& weights,
                   const SolverSettings&) {
    const int n = means.n_agents(), k = means.n_arms();
    if (static_cast<int>(weights.size()) != n)
        throw std::invalid_argument("ggi_optimal: weight count must equal the agent count");
    for (int i = 0; i < n; ++i) {
        if (!(weights[i] > 0.0)) throw std::invalid_argument("ggi_optimal: weights must be positive");
        if (i > 0 && weights[i] > weights[i - 1] + 1e-15)
            throw std::invalid_argument("ggi_optimal: weights must be non-increasing");
    }

    // GGI(p) = sum_j dw_j * L_j(u(p)) with dw_j = w_j - w_{j+1} and L_j the
    // sum of the j smallest utilities, expressed via L_j = max j*r_j - sum_i b_ji
    // subject to r_j - b_ji <= u_i. Utilities are nonnegative, so r_j >= 0 is
    // without loss of generality.
    std::vector<int> levels;
    std::vector<double> dw;
    for (int j = 1; j <= n; ++j) {
        double d = weights[j - 1] - (j < n ? weights[j] : 0.0);
        if (d > 1e-15) {
            levels.push_back(j);
            dw.push_back(d);
        }
    }
    const int n_levels = static_cast<int>(levels.size());
    // Variables: p (k), r (n_levels), b (n_levels x n).
    const int rv = k, bv = k + n_levels;
    const int n_vars = k + n_levels + n_levels * n;

    lp::LinearProgram prog;
    prog.objective.assign(n_vars, 0.0);
    for (int l = 0; l < n_levels; ++l) {
        prog.objective[rv + l] = dw[l] * levels[l];
        for (int i = 0; i < n; ++i) prog.objective[bv + l * n + i] = -dw[l];
    }
    std::vector<double> simplex_row(n_vars, 0.0);
    for (int a = 0; a < k; ++a) simplex_row[a] = 1.0;
    prog.constraints.push_back({std::move(simplex_row), lp::Relation::Equal, 1.0});
    for (int l = 0; l < n_levels; ++l) {
        for (int i = 0; i < n; ++i) {
            std::vector<double> row(n_vars, 0.0);
            row[rv + l] = 1.0;
            row[bv + l * n + i] = -1.0;
            for (int a = 0; a < k; ++a) row[a] = -means.at(i, a);
            prog.constraints.push_back({std::move(row), lp::Relation::LessEq, 0.0});
        }
    }

    lp::LpSolution sol = lp::solve_lp(prog);
    if (sol.status != lp::LpStatus::Optimal)
        throw std::runtime_error("ggi_optimal: LP did not reach optimality");
    return make_policy(std::vector<double>(sol.x.begin(), sol.x.begin() + k));
}

} // namespace fairband
