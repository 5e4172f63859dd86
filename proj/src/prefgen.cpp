#include "fairband/prefgen.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "fairband/scores.hpp"

namespace fairband {

std::string DistributionSpec::label() const {
    switch (kind) {
        case PrefDistribution::Uniform: return "uniform";
        case PrefDistribution::ImpartialCulture: return "impartial_culture";
        case PrefDistribution::SinglePeaked: return "single_peaked";
        case PrefDistribution::Mallows: return "mallows";
    }
    return "?";
}

std::string mode_label(FavoriteMode mode) {
    return mode == FavoriteMode::Equal ? "equal" : "random";
}

namespace {

std::vector<int> uniform_permutation(int k, std::mt19937_64& rng) {
    std::vector<int> perm(k);
    for (int i = 0; i < k; ++i) perm[i] = i;
    for (int i = k - 1; i > 0; --i) {
        int j = std::uniform_int_distribution<int>(0, i)(rng);
        std::swap(perm[i], perm[j]);
    }
    return perm;
}

// Uniform over rankings single-peaked w.r.t. 0 < 1 < ... < K-1: fill the
// ranking from worst to best, at each step taking one end of the remaining
// interval with probability 1/2.
std::vector<int> single_peaked_ranking(int k, std::mt19937_64& rng) {
    std::vector<int> ranking(k);
    int lo = 0, hi = k - 1;
    for (int pos = k - 1; pos > 0; --pos) {
        bool take_low = std::uniform_int_distribution<int>(0, 1)(rng) == 0;
        ranking[pos] = take_low ? lo++ : hi--;
    }
    ranking[0] = lo;
    return ranking;
}

// Repeated-insertion Mallows sample around the identity reference:
// item i goes to position j in {0..i} (0 = top) with weight phi^(i-j).
std::vector<int> mallows_ranking(int k, double phi, std::mt19937_64& rng) {
    std::vector<int> ranking;
    ranking.reserve(k);
    std::vector<double> weights;
    for (int item = 0; item < k; ++item) {
        weights.resize(item + 1);
        double total = 0.0;
        for (int pos = 0; pos <= item; ++pos) {
            weights[pos] = std::pow(phi, static_cast<double>(item - pos));
            total += weights[pos];
        }
        double r = std::uniform_real_distribution<double>(0.0, total)(rng);
        int pos = item;
        double cumulative = 0.0;
        for (int c = 0; c <= item; ++c) {
            cumulative += weights[c];
            if (r <= cumulative) {
                pos = c;
                break;
            }
        }
        ranking.insert(ranking.begin() + pos, item);
    }
    return ranking;
}

} // namespace

PreferenceProfile sample_profile(const DistributionSpec& dist, int n_voters, int n_alternatives,
                                 std::mt19937_64& rng) {
    if (n_voters < 1) throw std::invalid_argument("sample_profile: need at least one voter");
    if (n_alternatives < 1) throw std::invalid_argument("sample_profile: need at least one alternative");
    if (dist.kind == PrefDistribution::Mallows && !(dist.phi > 0.0 && dist.phi <= 1.0))
        throw std::invalid_argument("sample_profile: Mallows phi must lie in (0, 1]");

    PreferenceProfile profile{n_voters, n_alternatives, {}};
    profile.rankings.reserve(n_voters);
    for (int v = 0; v < n_voters; ++v) {
        switch (dist.kind) {
            case PrefDistribution::Uniform:
            case PrefDistribution::ImpartialCulture:
                profile.rankings.push_back(uniform_permutation(n_alternatives, rng));
                break;
            case PrefDistribution::SinglePeaked:
                profile.rankings.push_back(single_peaked_ranking(n_alternatives, rng));
                break;
            case PrefDistribution::Mallows:
                profile.rankings.push_back(mallows_ranking(n_alternatives, dist.phi, rng));
                break;
        }
    }
    return profile;
}

std::vector<double> means_from_ranking(const std::vector<int>& ranking, int n_favorites,
                                       std::mt19937_64& rng) {
    const int k = static_cast<int>(ranking.size());
    if (n_favorites < 1 || n_favorites > k)
        throw std::invalid_argument("means_from_ranking: favorite count must lie in [1, K]");

    std::normal_distribution<double> normal(0.5, 0.25);
    std::vector<double> draws(k);
    for (double& d : draws) d = std::clamp(normal(rng), 1e-6, 1.0 - 1e-6);
    std::sort(draws.begin(), draws.end(), std::greater<double>());
    // Clamping can create duplicates at the boundaries; nudge them apart so
    // each rank carries a distinct value before the favorite tie is applied.
    for (int r = 1; r < k; ++r)
        if (draws[r] >= draws[r - 1]) draws[r] = std::max(draws[r - 1] - 1e-9, 1e-6);
    for (int r = 1; r < n_favorites; ++r) draws[r] = draws[0];

    std::vector<double> means(k, 0.0);
    for (int r = 0; r < k; ++r) means[ranking[r]] = draws[r];
    return means;
}

std::vector<DistributionSpec> SweepConfig::default_distributions() {
    std::vector<DistributionSpec> dists = {
        {PrefDistribution::Uniform},
        {PrefDistribution::ImpartialCulture},
        {PrefDistribution::SinglePeaked},
    };
    for (double phi : {0.01, 0.25, 0.5, 0.75, 0.99})
        dists.push_back({PrefDistribution::Mallows, phi});
    return dists;
}

std::vector<ExperimentConfig> enumerate_sweep(const SweepConfig& config) {
    std::vector<ExperimentConfig> cells;
    std::int64_t cell_id = 0;
    for (int n : config.n_agents_values)
        for (int k : config.n_arms_values)
            for (int f : config.favorite_values) {
                if (f > k) continue;
                for (FavoriteMode mode : config.modes)
                    for (const DistributionSpec& dist : config.distributions) {
                        cells.push_back({cell_id++, n, k, f, mode, dist, config.master_seed});
                    }
            }
    return cells;
}

RewardMatrix matrix_for_cell(const ExperimentConfig& cell) {
    std::mt19937_64 rng = seeded_rng(cell.master_seed, static_cast<std::uint64_t>(cell.cell_id));
    PreferenceProfile profile = sample_profile(cell.dist, cell.n_agents, cell.n_arms, rng);
    std::vector<std::vector<double>> rows;
    rows.reserve(cell.n_agents);
    for (int i = 0; i < cell.n_agents; ++i) {
        int f = cell.max_favorites;
        if (cell.mode == FavoriteMode::Random)
            f = std::uniform_int_distribution<int>(1, cell.max_favorites)(rng);
        rows.push_back(means_from_ranking(profile.rankings[i], f, rng));
    }
    return RewardMatrix::from_rows(rows);
}

namespace {

struct CellOutcome {
    std::vector<RunRecord> records;
    std::optional<SweepFailure> failure;
};

CellOutcome run_one_cell(const ExperimentConfig& cell, const SolverSettings& settings) {
    CellOutcome outcome;
    try {
        RewardMatrix matrix = matrix_for_cell(cell);
        std::vector<std::pair<std::string, Policy>> policies;
        policies.emplace_back("pf", pf_optimal(matrix, kDefaultTieTolerance, settings).policy);
        policies.emplace_back("ef", ef_optimal(matrix, settings));
        policies.emplace_back("uf", uf_optimal(matrix));
        policies.emplace_back("nsw", nsw_optimal(matrix, settings));
        policies.emplace_back("ggi",
                              ggi_optimal(matrix, default_ggi_weights(matrix.n_agents()), settings));
        for (auto& [kind, policy] : policies) {
            FairnessReport report = score_all(matrix, policy);
            outcome.records.push_back({cell, kind, report.pf, report.ef, report.uf});
        }
    } catch (const std::exception& e) {
        outcome.records.clear();
        outcome.failure = SweepFailure{cell.cell_id, e.what()};
    }
    return outcome;
}

} // namespace

SweepResult run_sweep(const std::vector<ExperimentConfig>& cells, const SolverSettings& settings,
                      int jobs) {
    if (cells.empty()) throw std::invalid_argument("run_sweep: no cells");
    jobs = std::max(1, jobs);

    std::vector<CellOutcome> outcomes(cells.size());
    if (jobs == 1) {
        for (std::size_t c = 0; c < cells.size(); ++c) outcomes[c] = run_one_cell(cells[c], settings);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            while (true) {
                std::size_t c = next.fetch_add(1);
                if (c >= cells.size()) return;
                outcomes[c] = run_one_cell(cells[c], settings);
            }
        };
        std::vector<std::thread> pool;
        for (int w = 0; w < jobs; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    SweepResult result;
    for (auto& outcome : outcomes) {
        for (auto& record : outcome.records) result.records.push_back(std::move(record));
        if (outcome.failure) result.failures.push_back(std::move(*outcome.failure));
    }
    return result;
}

std::vector<AggregateRow> aggregate_records(const std::vector<RunRecord>& records) {
    const std::vector<std::string> kinds = {"pf", "ef", "uf", "nsw", "ggi"};
    std::vector<AggregateRow> rows;
    for (const auto& kind : kinds) {
        std::vector<double> pf, ef, uf;
        for (const auto& record : records) {
            if (record.policy_kind != kind) continue;
            pf.push_back(record.pf);
            uf.push_back(record.uf);
            if (record.ef) ef.push_back(*record.ef);
        }
        if (pf.empty()) continue;
        auto mean_std = [](const std::vector<double>& values) {
            double mean = 0.0;
            for (double v : values) mean += v;
            mean /= static_cast<double>(values.size());
            double var = 0.0;
            for (double v : values) var += (v - mean) * (v - mean);
            var /= static_cast<double>(values.size());
            return std::pair<double, double>(mean, std::sqrt(var));
        };
        auto [pf_mean, pf_std] = mean_std(pf);
        auto [uf_mean, uf_std] = mean_std(uf);
        double ef_mean = 0.0, ef_std = 0.0;
        if (!ef.empty()) std::tie(ef_mean, ef_std) = mean_std(ef);
        rows.push_back({kind, pf_mean, pf_std, ef_mean, ef_std, uf_mean, uf_std});
    }
    return rows;
}

} // namespace fairband
