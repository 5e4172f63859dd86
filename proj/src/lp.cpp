#include "fairband/lp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace fairband::lp {

namespace {

struct Tableau {
    // rows x (n_cols + 1); last column is the RHS.
    std::vector<std::vector<double>> rows;
    std::vector<int> basis; // basic variable per row
    int n_cols = 0;

    double& at(int r, int c) { return rows[r][c]; }
    double rhs(int r) const { return rows[r][n_cols]; }

    void pivot(int r, int c) {
        double piv = rows[r][c];
        for (int j = 0; j <= n_cols; ++j) rows[r][j] /= piv;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (static_cast<int>(i) == r) continue;
            double factor = rows[i][c];
            if (factor == 0.0) continue;
            for (int j = 0; j <= n_cols; ++j) rows[i][j] -= factor * rows[r][j];
        }
        basis[r] = c;
    }
};

// Runs Bland-rule simplex on the tableau for maximization of the priced-out
// objective `obj` (length n_cols + 1, last entry the negated value). Returns
// false when the objective is unbounded above.
bool simplex_iterate(Tableau& t, std::vector<double>& obj, int max_iters) {
    int m = static_cast<int>(t.rows.size());
    for (int iter = 0; iter < max_iters; ++iter) {
        int entering = -1;
        for (int j = 0; j < t.n_cols; ++j) {
            if (obj[j] > kPivotTolerance) {
                entering = j;
                break;
            }
        }
        if (entering < 0) return true; // optimal

        int leave = -1;
        double best_ratio = std::numeric_limits<double>::infinity();
        bool tiny_only = false;
        for (int i = 0; i < m; ++i) {
            double a = t.rows[i][entering];
            if (a > kPivotTolerance) {
                double ratio = t.rhs(i) / a;
                if (ratio < best_ratio - 1e-12 ||
                    (std::abs(ratio - best_ratio) <= 1e-12 &&
                     (leave < 0 || t.basis[i] < t.basis[leave]))) {
                    best_ratio = ratio;
                    leave = i;
                }
            } else if (a > 0.0) {
                tiny_only = true;
            }
        }
        if (leave < 0) {
            if (tiny_only)
                throw std::runtime_error("lp: forced pivot below tolerance");
            return false; // unbounded
        }

        // Update objective row, then pivot.
        double factor = obj[entering];
        t.pivot(leave, entering);
        for (int j = 0; j <= t.n_cols; ++j) obj[j] -= factor * t.rows[leave][j];
    }
    throw std::runtime_error("lp: iteration limit exceeded (possible numerical instability)");
}

} // namespace

LpSolution solve_lp(const LinearProgram& lp) {
    int n = lp.n_vars();
    if (n < 1) throw std::invalid_argument("lp: no variables");
    for (double c : lp.objective)
        if (!std::isfinite(c)) throw std::invalid_argument("lp: non-finite objective");
    if (!lp.lower_bounds.empty() && static_cast<int>(lp.lower_bounds.size()) != n)
        throw std::invalid_argument("lp: lower bound count mismatch");
    if (!lp.upper_bounds.empty() && static_cast<int>(lp.upper_bounds.size()) != n)
        throw std::invalid_argument("lp: upper bound count mismatch");

    std::vector<double> lb(n, 0.0);
    if (!lp.lower_bounds.empty()) lb = lp.lower_bounds;
    for (double v : lb)
        if (!std::isfinite(v)) throw std::invalid_argument("lp: non-finite lower bound");

    // Shift x = lb + x' and collect rows over x' >= 0.
    struct Row {
        std::vector<double> a;
        Relation rel;
        double b;
    };
    std::vector<Row> rows;
    for (const auto& c : lp.constraints) {
        if (static_cast<int>(c.coeffs.size()) != n)
            throw std::invalid_argument("lp: constraint width mismatch");
        double shift = 0.0;
        for (int j = 0; j < n; ++j) {
            if (!std::isfinite(c.coeffs[j])) throw std::invalid_argument("lp: non-finite coefficient");
            shift += c.coeffs[j] * lb[j];
        }
        if (!std::isfinite(c.rhs)) throw std::invalid_argument("lp: non-finite rhs");
        rows.push_back({c.coeffs, c.rel, c.rhs - shift});
    }
    for (int j = 0; j < n && !lp.upper_bounds.empty(); ++j) {
        if (!lp.upper_bounds[j]) continue;
        double ub = *lp.upper_bounds[j];
        if (ub < lb[j]) return {LpStatus::Infeasible, std::vector<double>(n, 0.0), 0.0};
        std::vector<double> a(n, 0.0);
        a[j] = 1.0;
        rows.push_back({std::move(a), Relation::LessEq, ub - lb[j]});
    }

    // Normalize to nonnegative RHS.
    for (auto& r : rows) {
        if (r.b < 0.0) {
            for (double& v : r.a) v = -v;
            r.b = -r.b;
            r.rel = r.rel == Relation::LessEq   ? Relation::GreaterEq
                    : r.rel == Relation::GreaterEq ? Relation::LessEq
                                                   : Relation::Equal;
        }
    }

    int m = static_cast<int>(rows.size());
    int n_slack = 0, n_art = 0;
    for (const auto& r : rows) {
        if (r.rel != Relation::Equal) ++n_slack;
        if (r.rel != Relation::LessEq) ++n_art;
    }

    Tableau t;
    t.n_cols = n + n_slack + n_art;
    t.rows.assign(m, std::vector<double>(t.n_cols + 1, 0.0));
    t.basis.assign(m, -1);
    int slack_at = n, art_at = n + n_slack;
    std::vector<bool> is_artificial(t.n_cols, false);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) t.at(i, j) = rows[i].a[j];
        t.at(i, t.n_cols) = rows[i].b;
        switch (rows[i].rel) {
            case Relation::LessEq:
                t.at(i, slack_at) = 1.0;
                t.basis[i] = slack_at++;
                break;
            case Relation::GreaterEq:
                t.at(i, slack_at++) = -1.0;
                [[fallthrough]];
            case Relation::Equal:
                t.at(i, art_at) = 1.0;
                is_artificial[art_at] = true;
                t.basis[i] = art_at++;
                break;
        }
    }

    const int max_iters = 20000 + 200 * (m + t.n_cols);

    // Phase 1: maximize -(sum of artificials), priced out over the basis.
    if (n_art > 0) {
        std::vector<double> obj(t.n_cols + 1, 0.0);
        for (int j = 0; j < t.n_cols; ++j)
            if (is_artificial[j]) obj[j] = -1.0;
        for (int i = 0; i < m; ++i)
            if (is_artificial[t.basis[i]])
                for (int j = 0; j <= t.n_cols; ++j) obj[j] += t.rows[i][j];
        simplex_iterate(t, obj, max_iters); // never unbounded (objective <= 0)
        double infeas = obj[t.n_cols];      // equals sum of artificials at optimum
        if (infeas > kFeasibilityTolerance)
            return {LpStatus::Infeasible, std::vector<double>(n, 0.0), 0.0};
        // Drive leftover artificials out of the basis or drop redundant rows.
        for (int i = static_cast<int>(t.rows.size()) - 1; i >= 0; --i) {
            if (!is_artificial[t.basis[i]]) continue;
            int target = -1;
            for (int j = 0; j < t.n_cols; ++j) {
                if (!is_artificial[j] && std::abs(t.rows[i][j]) > kPivotTolerance) {
                    target = j;
                    break;
                }
            }
            if (target >= 0) {
                t.pivot(i, target);
            } else {
                t.rows.erase(t.rows.begin() + i);
                t.basis.erase(t.basis.begin() + i);
            }
        }
        m = static_cast<int>(t.rows.size());
        for (auto& row : t.rows)
            for (int j = 0; j < t.n_cols; ++j)
                if (is_artificial[j]) row[j] = 0.0;
    }

    // Phase 2: maximize the shifted objective.
    std::vector<double> obj(t.n_cols + 1, 0.0);
    for (int j = 0; j < n; ++j) obj[j] = lp.objective[j];
    for (int i = 0; i < m; ++i) {
        double cb = t.basis[i] < n ? lp.objective[t.basis[i]] : 0.0;
        if (cb != 0.0)
            for (int j = 0; j <= t.n_cols; ++j) obj[j] -= cb * t.rows[i][j];
    }
    // Block artificial columns from re-entering.
    for (int j = n; j < t.n_cols; ++j)
        if (is_artificial[j]) obj[j] = -1.0;
    if (!simplex_iterate(t, obj, max_iters))
        return {LpStatus::Unbounded, std::vector<double>(n, 0.0),
                std::numeric_limits<double>::infinity()};

    std::vector<double> x(n, 0.0);
    for (int i = 0; i < m; ++i)
        if (t.basis[i] < n) x[t.basis[i]] = std::max(0.0, t.rhs(i));
    double shift_value = 0.0;
    for (int j = 0; j < n; ++j) {
        x[j] += lb[j];
        shift_value += lp.objective[j] * lb[j];
    }
    double value = 0.0;
    for (int j = 0; j < n; ++j) value += lp.objective[j] * x[j];

    // Certify the solution before reporting Optimal.
    double tableau_value = -obj[t.n_cols] + shift_value;
    if (std::abs(tableau_value - value) > kValueTolerance)
        throw std::runtime_error("lp: objective mismatch after solve");
    for (const auto& c : lp.constraints) {
        double lhs = 0.0;
        for (int j = 0; j < n; ++j) lhs += c.coeffs[j] * x[j];
        bool ok = c.rel == Relation::LessEq   ? lhs <= c.rhs + kFeasibilityTolerance
                  : c.rel == Relation::GreaterEq ? lhs >= c.rhs - kFeasibilityTolerance
                                                 : std::abs(lhs - c.rhs) <= kFeasibilityTolerance;
        if (!ok) throw std::runtime_error("lp: returned point violates a constraint");
    }
    for (int j = 0; j < n; ++j) {
        if (x[j] < lb[j] - kFeasibilityTolerance)
            throw std::runtime_error("lp: returned point violates a lower bound");
        if (!lp.upper_bounds.empty() && lp.upper_bounds[j] &&
            x[j] > *lp.upper_bounds[j] + kFeasibilityTolerance)
            throw std::runtime_error("lp: returned point violates an upper bound");
    }
    return {LpStatus::Optimal, std::move(x), value};
}

LpSolution max_min_margin(const std::vector<std::vector<double>>& rows,
                          const std::vector<double>& offsets) {
    if (rows.empty()) throw std::invalid_argument("max_min_margin: no rows");
    if (rows.size() != offsets.size())
        throw std::invalid_argument("max_min_margin: rows/offsets size mismatch");
    int k = static_cast<int>(rows.front().size());
    if (k < 1) throw std::invalid_argument("max_min_margin: empty row");

    // Variables: p_0..p_{k-1}, t_plus, t_minus (t = t_plus - t_minus).
    LinearProgram lp;
    lp.objective.assign(k + 2, 0.0);
    lp.objective[k] = 1.0;
    lp.objective[k + 1] = -1.0;
    std::vector<double> simplex_row(k + 2, 0.0);
    for (int j = 0; j < k; ++j) simplex_row[j] = 1.0;
    lp.constraints.push_back({simplex_row, Relation::Equal, 1.0});
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (static_cast<int>(rows[i].size()) != k)
            throw std::invalid_argument("max_min_margin: ragged rows");
        std::vector<double> c(k + 2, 0.0);
        for (int j = 0; j < k; ++j) c[j] = rows[i][j];
        c[k] = -1.0;
        c[k + 1] = 1.0;
        lp.constraints.push_back({std::move(c), Relation::GreaterEq, offsets[i]});
    }
    LpSolution sol = solve_lp(lp);
    if (sol.status == LpStatus::Optimal) sol.x.resize(k);
    return sol;
}

} // namespace fairband::lp
