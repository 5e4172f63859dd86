#ifndef FAIRBAND_LP_HPP
#define FAIRBAND_LP_HPP

#include <optional>
#include <vector>

namespace fairband::lp {

// Centralized tolerances.
inline constexpr double kPivotTolerance = 1e-9;
inline constexpr double kFeasibilityTolerance = 1e-8;
inline constexpr double kValueTolerance = 1e-6;

enum class Relation { LessEq, Equal, GreaterEq };

struct Constraint {
    std::vector<double> coeffs;
    Relation rel;
    double rhs;
};

/// Dense LP: maximize objective . x subject to the constraints and bounds.
/// Variables default to lower bound 0 and no upper bound.
struct LinearProgram {
    std::vector<double> objective;
    std::vector<Constraint> constraints;
    std::vector<double> lower_bounds;                 // empty => all zero
    std::vector<std::optional<double>> upper_bounds;  // empty => none

    int n_vars() const { return static_cast<int>(objective.size()); }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
    LpStatus status;
    std::vector<double> x;
    double objective_value = 0.0;
};

/// Two-phase dense tableau simplex with Bland's anti-cycling rule.
/// Throws std::runtime_error when numerics force a pivot below tolerance.
LpSolution solve_lp(const LinearProgram& lp);

/// Maximize t subject to rows[i] . p - offsets[i] >= t over the probability
/// simplex. Returned x holds the simplex point; objective_value holds t.
LpSolution max_min_margin(const std::vector<std::vector<double>>& rows,
                          const std::vector<double>& offsets);

} // namespace fairband::lp

#endif
