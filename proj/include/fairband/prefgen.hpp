#ifndef FAIRBAND_PREFGEN_HPP
#define FAIRBAND_PREFGEN_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fairband/model.hpp"
#include "fairband/solvers.hpp"

namespace fairband {

/// Strict complete rankings, best first, 0-based alternative ids.
struct PreferenceProfile {
    int n_voters = 0;
    int n_alternatives = 0;
    std::vector<std::vector<int>> rankings;
};

enum class PrefDistribution { Uniform, ImpartialCulture, SinglePeaked, Mallows };

struct DistributionSpec {
    PrefDistribution kind = PrefDistribution::Uniform;
    double phi = 0.0; // Mallows dispersion, in (0, 1]
    std::string label() const;
};

/// Uniform and impartial culture draw i.i.d. uniform permutations (the two
/// labels are kept distinct and consume distinct seed streams). Single-peaked
/// rankings are uniform over orders single-peaked w.r.t. the axis
/// 0 < 1 < ... < K-1, built by the ends-inward construction. Mallows uses
/// repeated insertion around the identity reference.
PreferenceProfile sample_profile(const DistributionSpec& dist, int n_voters, int n_alternatives,
                                 std::mt19937_64& rng);

/// Draws K means from Normal(0.5, 0.25) clamped to [1e-6, 1-1e-6], assigns
/// them to arms in ranking order (highest to the top-ranked arm), then copies
/// the top value onto the first n_favorites ranked arms so the voter has
/// exactly that many favorite arms.
std::vector<double> means_from_ranking(const std::vector<int>& ranking, int n_favorites,
                                       std::mt19937_64& rng);

enum class FavoriteMode { Equal, Random };

struct ExperimentConfig {
    std::int64_t cell_id = 0;
    int n_agents = 0;
    int n_arms = 0;
    int max_favorites = 0;
    FavoriteMode mode = FavoriteMode::Equal;
    DistributionSpec dist;
    std::uint64_t master_seed = 42;
};

struct SweepConfig {
    std::vector<int> n_agents_values = {2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::vector<int> n_arms_values = {2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::vector<int> favorite_values = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::vector<FavoriteMode> modes = {FavoriteMode::Equal, FavoriteMode::Random};
    std::vector<DistributionSpec> distributions = default_distributions();
    std::uint64_t master_seed = 42;

    static std::vector<DistributionSpec> default_distributions();
};

/// Cartesian product of the configured ranges filtered to F <= K, in a fixed
/// order; each cell's RNG stream derives from (master seed, cell index).
std::vector<ExperimentConfig> enumerate_sweep(const SweepConfig& config);

/// The reward matrix drawn for one cell (profile + per-agent means).
RewardMatrix matrix_for_cell(const ExperimentConfig& cell);

struct RunRecord {
    ExperimentConfig cell;
    std::string policy_kind; // pf | ef | uf | nsw | ggi
    double pf = 0.0;
    std::optional<double> ef;
    double uf = 0.0;
};

struct SweepFailure {
    std::int64_t cell_id;
    std::string message;
};

struct SweepResult {
    std::vector<RunRecord> records;
    std::vector<SweepFailure> failures;
};

/// Per cell: build the matrix, solve the five benchmark objectives and score
/// each policy with all three fairness scores. Cell failures are recorded,
/// not fatal. `jobs` > 1 fans cells out over a worker pool; output order is
/// independent of scheduling.
SweepResult run_sweep(const std::vector<ExperimentConfig>& cells, const SolverSettings& settings,
                      int jobs = 1);

struct AggregateRow {
    std::string policy_kind;
    double pf_mean, pf_std;
    double ef_mean, ef_std;
    double uf_mean, uf_std;
};

/// Mean and population standard deviation per (policy kind, score), rows in
/// the fixed order pf, ef, uf, nsw, ggi.
std::vector<AggregateRow> aggregate_records(const std::vector<RunRecord>& records);

std::string mode_label(FavoriteMode mode);

} // namespace fairband

#endif
