#include "fairband/learning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "fairband/csvio.hpp"
#include "fairband/scores.hpp"

namespace fairband {

namespace {

constexpr double kRadiusSentinel = 1e6; // stands in for +infinity inside objectives

double bonus(double alpha, double z) {
    if (alpha == 0.0) return 0.0;
    return std::isinf(z) ? std::numeric_limits<double>::infinity() : alpha * z;
}

std::vector<double> radii(const EstimatorState& est) {
    std::vector<double> z(est.n_arms());
    for (int k = 0; k < est.n_arms(); ++k)
        z[k] = ucb_radius(est.pull_counts[k], est.n_agents(), est.n_arms(), est.step);
    return z;
}

int sample_index(const std::vector<double>& weights, std::mt19937_64& rng) {
    double total = 0.0;
    for (double w : weights) total += w;
    double r = std::uniform_real_distribution<double>(0.0, total)(rng);
    double cumulative = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        cumulative += weights[k];
        if (r <= cumulative) return static_cast<int>(k);
    }
    return static_cast<int>(weights.size()) - 1;
}

std::string sets_key(const FavoriteSets& favorites) {
    std::string key;
    for (const auto& set : favorites.sets) {
        for (int arm : set) key += static_cast<char>(arm + 1);
        key += '\0';
    }
    return key;
}

std::vector<std::uint64_t> pack_sets(const FavoriteSets& favorites) {
    std::vector<std::uint64_t> masks;
    masks.reserve(favorites.sets.size());
    for (const auto& set : favorites.sets) {
        std::uint64_t m = 0;
        for (int arm : set) {
            if (arm >= 64) throw std::invalid_argument("learning traces support at most 64 arms");
            m |= std::uint64_t{1} << arm;
        }
        masks.push_back(m);
    }
    return masks;
}

} // namespace

double ucb_radius(std::int64_t n_pulls, int n_agents, int n_arms, std::int64_t t) {
    if (t < 1) throw std::invalid_argument("ucb_radius: t must be at least 1");
    if (n_pulls == 0) return std::numeric_limits<double>::infinity();
    double log_term = std::log(static_cast<double>(n_agents) * n_arms * static_cast<double>(t));
    return std::sqrt(2.0 * log_term / static_cast<double>(n_pulls));
}

FavoriteSets estimate_favorite_sets(const EstimatorState& est, double alpha) {
    if (alpha < 0.0) throw std::invalid_argument("estimate_favorite_sets: negative alpha");
    const int n = est.n_agents(), k = est.n_arms();
    std::vector<double> z = radii(est);
    std::vector<std::vector<int>> sets(n);
    for (int i = 0; i < n; ++i) {
        int best = 0;
        for (int a = 1; a < k; ++a)
            if (est.estimates.at(i, a) > est.estimates.at(i, best)) best = a;
        double lcb = est.estimates.at(i, best) - bonus(alpha, z[best]);
        for (int a = 0; a < k; ++a)
            if (est.estimates.at(i, a) + bonus(alpha, z[a]) >= lcb) sets[i].push_back(a);
    }
    return FavoriteSets(std::move(sets), 0.0, k);
}

Policy step_pf(const EstimatorState& est, double gamma, double alpha, std::mt19937_64& rng,
               const SolverSettings& settings) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("step_pf: gamma must lie in (0, 1)");
    double explore_prob = std::pow(static_cast<double>(est.step), -(1.0 - gamma));
    if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) < explore_prob) {
        int arm = std::uniform_int_distribution<int>(0, est.n_arms() - 1)(rng);
        return Policy::one_hot(est.n_arms(), arm);
    }
    return pf_optimal_for_sets(estimate_favorite_sets(est, alpha), est.n_arms(), settings).policy;
}

Policy step_ef(const EstimatorState& est, double alpha, const SolverSettings& settings) {
    const int n = est.n_agents(), k = est.n_arms();
    if (n < 2) throw std::invalid_argument("step_ef: needs at least two agents");
    std::vector<std::vector<double>> pair_rows;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) {
            std::vector<double> diff(k);
            for (int a = 0; a < k; ++a) diff[a] = est.estimates.at(i, a) - est.estimates.at(j, a);
            pair_rows.push_back(std::move(diff));
        }
    std::vector<double> z = radii(est);
    std::vector<double> linear(k);
    for (int a = 0; a < k; ++a) linear[a] = -alpha * std::min(z[a], kRadiusSentinel);
    double scale = 2.0 / (static_cast<double>(n) * (n - 1.0));
    return minimize_quadratic_over_simplex(pair_rows, scale, linear, k, settings);
}

Policy step_uf(const EstimatorState& est, double alpha) {
    const int k = est.n_arms();
    std::vector<double> z = radii(est);
    int best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < k; ++a) {
        double column = 0.0;
        for (int i = 0; i < est.n_agents(); ++i) column += est.estimates.at(i, a);
        double score = column + alpha * std::min(z[a], kRadiusSentinel);
        if (score > best_score) {
            best_score = score;
            best = a;
        }
    }
    return Policy::one_hot(k, best);
}

LearnResult learn_policy(const BanditInstance& instance, const LearnConfig& config) {
    const RewardMatrix& means = instance.means;
    const int n = means.n_agents(), k = means.n_arms();
    const std::int64_t horizon = config.horizon;

    if (horizon < k) throw std::invalid_argument("learn_policy: horizon must be at least K");
    if (config.trace_every < 1) throw std::invalid_argument("learn_policy: trace_every must be positive");
    if (config.method == FairnessMethod::PF &&
        (!config.gamma || !(*config.gamma > 0.0 && *config.gamma < 1.0)))
        throw std::invalid_argument("learn_policy: PF requires gamma in (0, 1)");
    if (config.method == FairnessMethod::EF && n < 2)
        throw std::invalid_argument("learn_policy: EF requires at least two agents");
    double alpha = config.alpha.value_or(config.method == FairnessMethod::PF   ? 1.0
                                         : config.method == FairnessMethod::EF ? 4.0
                                                                               : static_cast<double>(n));
    if (alpha < 0.0) throw std::invalid_argument("learn_policy: alpha must be nonnegative");

    std::mt19937_64 rng = seeded_rng(config.seed, 0);
    SolverSettings step_settings;
    step_settings.max_iterations = 4000;
    step_settings.duality_gap_tol = 1e-7;

    EstimatorState est(n, k);
    std::vector<double> rewards(n);
    for (int arm = 0; arm < k; ++arm) {
        est.step = arm + 1;
        for (int i = 0; i < n; ++i) rewards[i] = sample_reward(instance.model, i, arm, rng);
        est.record(arm, rewards);
    }

    // Ground-truth quantities for scoring and regrets.
    FavoriteSets true_favorites = favorite_sets(means, config.tie_tolerance);
    double d_star = n >= 2 ? optimal_inequality(means) : std::numeric_limits<double>::quiet_NaN();
    std::vector<double> column_sums(k, 0.0);
    for (int a = 0; a < k; ++a)
        for (int i = 0; i < n; ++i) column_sums[a] += means.at(i, a);
    double best_total = *std::max_element(column_sums.begin(), column_sums.end());
    std::vector<std::vector<double>> pair_rows;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) {
            std::vector<double> diff(k);
            for (int a = 0; a < k; ++a) diff[a] = means.at(i, a) - means.at(j, a);
            pair_rows.push_back(std::move(diff));
        }
    double pair_scale = n >= 2 ? 2.0 / (static_cast<double>(n) * (n - 1.0)) : 0.0;
    auto inequality_of = [&](const std::vector<double>& probs) {
        double sum = 0.0;
        for (const auto& row : pair_rows) {
            double d = 0.0;
            for (int a = 0; a < k; ++a) d += row[a] * probs[a];
            sum += d * d;
        }
        return pair_scale * sum;
    };

    std::unordered_map<std::string, Policy> pf_solutions; // keyed by estimated sets
    std::unordered_map<std::string, double> pf_scores;    // keyed by policy bytes

    auto pf_of = [&](const Policy& policy) {
        std::string key(reinterpret_cast<const char*>(policy.raw().data()),
                        policy.raw().size() * sizeof(double));
        auto it = pf_scores.find(key);
        if (it != pf_scores.end()) return it->second;
        double value = pf_score_for_sets(true_favorites, policy).value;
        pf_scores.emplace(std::move(key), value);
        return value;
    };

    LearnResult result{Policy::uniform(k), {}};
    std::int64_t regret_pf = 0;
    double regret_ef = n >= 2 ? 0.0 : std::numeric_limits<double>::quiet_NaN();
    double regret_uf = 0.0;

    for (std::int64_t t = k + 1; t <= horizon; ++t) {
        est.step = t;
        FavoriteSets est_favorites = estimate_favorite_sets(est, alpha);
        bool mismatch = !(est_favorites == true_favorites);

        Policy policy = Policy::uniform(k);
        bool forced = false;
        switch (config.method) {
            case FairnessMethod::PF: {
                double explore_prob = std::pow(static_cast<double>(t), -(1.0 - *config.gamma));
                if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) < explore_prob) {
                    int arm = std::uniform_int_distribution<int>(0, k - 1)(rng);
                    policy = Policy::one_hot(k, arm);
                    forced = true;
                } else {
                    std::string key = sets_key(est_favorites);
                    auto it = pf_solutions.find(key);
                    if (it == pf_solutions.end()) {
                        it = pf_solutions
                                 .emplace(std::move(key),
                                          pf_optimal_for_sets(est_favorites, k, step_settings).policy)
                                 .first;
                    }
                    policy = it->second;
                }
                break;
            }
            case FairnessMethod::EF:
                policy = step_ef(est, alpha, step_settings);
                break;
            case FairnessMethod::UF:
                policy = step_uf(est, alpha);
                break;
        }

        std::vector<double> probs = policy.clamped();
        int arm = sample_index(probs, rng);
        for (int i = 0; i < n; ++i) rewards[i] = sample_reward(instance.model, i, arm, rng);
        est.record(arm, rewards);

        double total = 0.0;
        for (int a = 0; a < k; ++a) total += probs[a] * column_sums[a];
        regret_pf += mismatch ? 1 : 0;
        regret_uf += best_total - total;
        double d_policy = std::numeric_limits<double>::quiet_NaN();
        if (n >= 2) {
            d_policy = inequality_of(probs);
            regret_ef += d_policy - d_star;
        }

        if ((t - k) % config.trace_every == 0 || t == horizon) {
            RoundTrace row;
            row.t = t;
            row.policy = policy;
            row.arm = arm;
            row.rewards = rewards;
            row.forced = forced;
            if (config.score_trace) {
                row.pf = pf_of(policy);
                if (n >= 2) row.ef = 1.0 - std::abs(d_policy - d_star);
                row.uf = total / best_total;
            } else {
                row.pf = std::numeric_limits<double>::quiet_NaN();
                row.uf = std::numeric_limits<double>::quiet_NaN();
            }
            row.regret_pf = regret_pf;
            row.regret_ef = regret_ef;
            row.regret_uf = regret_uf;
            row.est_favorite_masks = pack_sets(est_favorites);
            result.trace.push_back(std::move(row));
        }
        result.final_policy = std::move(policy);
    }
    return result;
}

RegretSeries regrets(const std::vector<RoundTrace>& trace, const RewardMatrix& means,
                     double tie_tolerance) {
    if (trace.empty()) throw std::invalid_argument("regrets: empty trace");
    const int n = means.n_agents();
    FavoriteSets true_favorites = favorite_sets(means, tie_tolerance);
    std::vector<std::uint64_t> true_masks;
    for (const auto& set : true_favorites.sets) {
        std::uint64_t m = 0;
        for (int arm : set) m |= std::uint64_t{1} << arm;
        true_masks.push_back(m);
    }
    double d_star = n >= 2 ? optimal_inequality(means) : std::numeric_limits<double>::quiet_NaN();
    double best_total = 0.0;
    {
        std::vector<double> utils = utilities(means, uf_optimal(means));
        for (double u : utils) best_total += u;
    }

    RegretSeries series;
    std::int64_t pf = 0;
    double ef = n >= 2 ? 0.0 : std::numeric_limits<double>::quiet_NaN();
    double uf = 0.0;
    for (const auto& row : trace) {
        if (row.est_favorite_masks.size() != true_masks.size())
            throw std::invalid_argument("regrets: trace/matrix agent count mismatch");
        pf += row.est_favorite_masks != true_masks ? 1 : 0;
        std::vector<double> utils = utilities(means, row.policy);
        double total = 0.0;
        for (double u : utils) total += u;
        uf += best_total - total;
        if (n >= 2) ef += inequality_d_from_utilities(utils) - d_star;
        series.pf.push_back(pf);
        series.ef.push_back(ef);
        series.uf.push_back(uf);
    }
    return series;
}

void write_trace_csv(std::ostream& out, const std::vector<RoundTrace>& trace) {
    if (trace.empty()) {
        out << "t,arm,forced,pf,ef,uf,regret_pf,regret_ef,regret_uf\n";
        return;
    }
    int k = trace.front().policy.n_arms();
    out << "t";
    for (int a = 0; a < k; ++a) out << ",policy_" << a;
    out << ",arm,forced,pf,ef,uf,regret_pf,regret_ef,regret_uf\n";
    for (const auto& row : trace) {
        out << row.t;
        for (int a = 0; a < k; ++a) out << ',' << csv::format_number(row.policy.prob(a));
        out << ',' << row.arm << ',' << (row.forced ? 1 : 0);
        out << ',' << csv::format_number(row.pf);
        out << ',' << (row.ef ? csv::format_number(*row.ef) : "nan");
        out << ',' << csv::format_number(row.uf);
        out << ',' << row.regret_pf;
        out << ',' << csv::format_number(row.regret_ef);
        out << ',' << csv::format_number(row.regret_uf) << '\n';
    }
}

} // namespace fairband
