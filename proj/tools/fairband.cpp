// Command-line surface for fairness scoring, optimal-policy solving, the
// factorial sweep, bandit learning runs, and core membership checks.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fairband/coregame.hpp"
#include "fairband/csvio.hpp"
#include "fairband/learning.hpp"
#include "fairband/prefgen.hpp"
#include "fairband/preflib.hpp"
#include "fairband/scores.hpp"
#include "fairband/solvers.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fairband;

namespace {

constexpr const char* kVersion = "0.1.0";

std::vector<double> parse_number_list(const std::string& text) {
    std::vector<double> values;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        values.push_back(std::stod(item));
    }
    if (values.empty()) throw std::invalid_argument("expected a comma-separated number list");
    return values;
}

std::optional<std::uint64_t> env_seed_override() {
    const char* env = std::getenv("FAIRBAND_SEED");
    if (!env || !*env) return std::nullopt;
    return static_cast<std::uint64_t>(std::stoull(env));
}

json policy_json(const Policy& policy) {
    json arr = json::array();
    for (int k = 0; k < policy.n_arms(); ++k) arr.push_back(policy.prob(k));
    return arr;
}

json report_json(const FairnessReport& report) {
    json out;
    out["pf"] = report.pf;
    if (report.ef) out["ef"] = *report.ef; else out["ef"] = nullptr;
    out["uf"] = report.uf;
    if (report.d_policy) out["d_policy"] = *report.d_policy; else out["d_policy"] = nullptr;
    if (report.d_optimal) out["d_optimal"] = *report.d_optimal; else out["d_optimal"] = nullptr;
    out["total_utility"] = report.total_utility;
    out["optimal_total_utility"] = report.optimal_total_utility;
    return out;
}

void write_manifest(const fs::path& dir, const std::string& command, const json& config,
                    std::uint64_t master_seed, const std::vector<std::string>& outputs,
                    double duration_seconds) {
    json manifest;
    manifest["command"] = command;
    manifest["config"] = config;
    manifest["master_seed"] = master_seed;
    manifest["version"] = kVersion;
    manifest["outputs"] = outputs;
    manifest["duration_seconds"] = duration_seconds;
    std::ofstream out(dir / "manifest.json");
    out << manifest.dump(2) << '\n';
}

SweepConfig sweep_config_from_json(const json& j) {
    SweepConfig config;
    auto read_ints = [&](const char* key, std::vector<int>& target) {
        if (j.contains(key)) target = j.at(key).get<std::vector<int>>();
    };
    read_ints("n_agents", config.n_agents_values);
    read_ints("n_arms", config.n_arms_values);
    read_ints("favorites", config.favorite_values);
    if (j.contains("modes")) {
        config.modes.clear();
        for (const auto& m : j.at("modes")) {
            std::string label = m.get<std::string>();
            if (label == "equal") config.modes.push_back(FavoriteMode::Equal);
            else if (label == "random") config.modes.push_back(FavoriteMode::Random);
            else throw std::invalid_argument("sweep config: unknown mode '" + label + "'");
        }
    }
    if (j.contains("distributions")) {
        std::vector<double> phis = {0.01, 0.25, 0.5, 0.75, 0.99};
        if (j.contains("mallows_phi")) phis = j.at("mallows_phi").get<std::vector<double>>();
        config.distributions.clear();
        for (const auto& d : j.at("distributions")) {
            std::string label = d.get<std::string>();
            if (label == "uniform") config.distributions.push_back({PrefDistribution::Uniform});
            else if (label == "impartial_culture")
                config.distributions.push_back({PrefDistribution::ImpartialCulture});
            else if (label == "single_peaked")
                config.distributions.push_back({PrefDistribution::SinglePeaked});
            else if (label == "mallows")
                for (double phi : phis) config.distributions.push_back({PrefDistribution::Mallows, phi});
            else throw std::invalid_argument("sweep config: unknown distribution '" + label + "'");
        }
    }
    if (j.contains("seed")) config.master_seed = j.at("seed").get<std::uint64_t>();
    return config;
}

json sweep_config_to_json(const SweepConfig& config) {
    json j;
    j["n_agents"] = config.n_agents_values;
    j["n_arms"] = config.n_arms_values;
    j["favorites"] = config.favorite_values;
    json modes = json::array();
    for (auto m : config.modes) modes.push_back(mode_label(m));
    j["modes"] = modes;
    json dists = json::array();
    for (const auto& d : config.distributions) {
        json entry;
        entry["kind"] = d.label();
        if (d.kind == PrefDistribution::Mallows) entry["phi"] = d.phi;
        dists.push_back(entry);
    }
    j["distributions"] = dists;
    j["seed"] = config.master_seed;
    return j;
}

void write_cells_csv(std::ostream& out, const std::vector<RunRecord>& records) {
    out << "cell_id,N,K,f,mode,distribution,phi,policy_kind,pf,ef,uf\n";
    for (const auto& r : records) {
        out << r.cell.cell_id << ',' << r.cell.n_agents << ',' << r.cell.n_arms << ','
            << r.cell.max_favorites << ',' << mode_label(r.cell.mode) << ',' << r.cell.dist.label()
            << ',' << csv::format_number(r.cell.dist.phi) << ',' << r.policy_kind << ','
            << csv::format_number(r.pf) << ',' << (r.ef ? csv::format_number(*r.ef) : "nan") << ','
            << csv::format_number(r.uf) << '\n';
    }
}

void write_table_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
    out << "policy,pf_mean,pf_std,ef_mean,ef_std,uf_mean,uf_std\n";
    for (const auto& r : rows) {
        out << r.policy_kind << ',' << csv::format_number(r.pf_mean) << ','
            << csv::format_number(r.pf_std) << ',' << csv::format_number(r.ef_mean) << ','
            << csv::format_number(r.ef_std) << ',' << csv::format_number(r.uf_mean) << ','
            << csv::format_number(r.uf_std) << '\n';
    }
}

int run_cli(int argc, char** argv) {
    CLI::App app{"Fairness objectives for multi-agent multi-armed bandits"};
    app.require_subcommand(1);

    // --- score ---------------------------------------------------------
    auto* score = app.add_subcommand("score", "Score a policy against a reward matrix");
    std::string score_matrix, score_policy;
    double score_tie_tol = kDefaultTieTolerance;
    score->add_option("--matrix", score_matrix, "Reward matrix CSV")->required();
    score->add_option("--policy", score_policy, "Policy CSV (one row of K probabilities)")->required();
    score->add_option("--tie-tol", score_tie_tol, "Favorite-set tie tolerance");
    score->callback([&] {
        RewardMatrix matrix = csv::read_matrix_file(score_matrix);
        Policy policy = csv::read_policy_file(score_policy);
        FairnessReport report = score_all(matrix, policy, score_tie_tol);
        std::cout << report_json(report).dump(2) << '\n';
    });

    // --- solve ---------------------------------------------------------
    auto* solve = app.add_subcommand("solve", "Compute an optimal policy for one objective");
    std::string solve_matrix, solve_objective, solve_weights;
    solve->add_option("--matrix", solve_matrix, "Reward matrix CSV")->required();
    solve->add_option("--objective", solve_objective, "pf|ef|uf|nsw|ggi")->required();
    solve->add_option("--weights", solve_weights, "GGI weights, comma separated (default 2^-(i-1))");
    solve->callback([&] {
        RewardMatrix matrix = csv::read_matrix_file(solve_matrix);
        SolverSettings settings;
        Policy policy = Policy::uniform(matrix.n_arms());
        if (solve_objective == "pf") policy = pf_optimal(matrix, kDefaultTieTolerance, settings).policy;
        else if (solve_objective == "ef") policy = ef_optimal(matrix, settings);
        else if (solve_objective == "uf") policy = uf_optimal(matrix);
        else if (solve_objective == "nsw") policy = nsw_optimal(matrix, settings);
        else if (solve_objective == "ggi") {
            std::vector<double> weights = solve_weights.empty()
                                              ? default_ggi_weights(matrix.n_agents())
                                              : parse_number_list(solve_weights);
            policy = ggi_optimal(matrix, weights, settings);
        } else {
            throw std::invalid_argument("unknown objective '" + solve_objective + "'");
        }
        json out;
        out["objective"] = solve_objective;
        out["policy"] = policy_json(policy);
        std::cout << out.dump(2) << '\n';
    });

    // --- sweep ---------------------------------------------------------
    auto* sweep = app.add_subcommand("sweep", "Run the factorial preference sweep");
    std::string sweep_config_path, sweep_out;
    int sweep_jobs = 1;
    std::optional<std::uint64_t> sweep_seed;
    sweep->add_option("--config", sweep_config_path, "Sweep config JSON (defaults to the full sweep)");
    sweep->add_option("--out", sweep_out, "Output directory")->required();
    sweep->add_option("--jobs", sweep_jobs, "Worker threads");
    sweep->add_option_function<std::uint64_t>(
        "--seed", [&](std::uint64_t s) { sweep_seed = s; }, "Master seed override");
    sweep->callback([&] {
        auto started = std::chrono::steady_clock::now();
        SweepConfig config;
        if (!sweep_config_path.empty()) {
            std::ifstream in(sweep_config_path);
            if (!in) throw std::invalid_argument("cannot open sweep config: " + sweep_config_path);
            json j = json::parse(in);
            config = sweep_config_from_json(j);
        }
        if (sweep_seed) config.master_seed = *sweep_seed;
        if (auto env = env_seed_override()) config.master_seed = *env;

        std::vector<ExperimentConfig> cells = enumerate_sweep(config);
        SweepResult result = run_sweep(cells, SolverSettings{}, sweep_jobs);

        fs::create_directories(sweep_out);
        fs::path dir(sweep_out);
        {
            std::ofstream out(dir / "cells.csv");
            write_cells_csv(out, result.records);
        }
        {
            std::ofstream out(dir / "table1.csv");
            write_table_csv(out, aggregate_records(result.records));
        }
        for (const auto& failure : result.failures)
            std::cerr << "cell " << failure.cell_id << " failed: " << failure.message << '\n';
        double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        write_manifest(dir, "sweep", sweep_config_to_json(config), config.master_seed,
                       {"cells.csv", "table1.csv"}, seconds);
        std::cout << "cells: " << cells.size() << ", records: " << result.records.size()
                  << ", failures: " << result.failures.size() << '\n';
    });

    // --- learn ---------------------------------------------------------
    auto* learn = app.add_subcommand("learn", "Run a bandit learning episode");
    std::string learn_soc, learn_matrix, learn_method = "pf", learn_model = "beta";
    std::string learn_rank_means = "0.9,0.63,0.37,0.1", learn_out;
    std::int64_t learn_T = 0, learn_trace_every = 1;
    int learn_sample = 50;
    double learn_gamma = 0.7, learn_std = 0.1;
    std::optional<double> learn_alpha;
    std::uint64_t learn_seed = 0;
    learn->add_option("--soc", learn_soc, "SOC ballot file to build the bandit from");
    learn->add_option("--matrix", learn_matrix, "Reward matrix CSV (alternative to --soc)");
    learn->add_option("--sample", learn_sample, "Voters sampled from the SOC file");
    learn->add_option("--rank-means", learn_rank_means, "Mean reward per preference rank");
    learn->add_option("--model", learn_model, "Reward model: beta|bernoulli|pointmass");
    learn->add_option("--std", learn_std, "Beta reward standard deviation");
    learn->add_option("--method", learn_method, "pf|ef|uf")->required();
    learn->add_option("--T", learn_T, "Horizon (total pulls)")->required();
    learn->add_option("--gamma", learn_gamma, "Exploration decay (PF)");
    learn->add_option_function<double>(
        "--alpha", [&](double a) { learn_alpha = a; }, "Confidence scale");
    learn->add_option("--seed", learn_seed, "RNG seed");
    learn->add_option("--trace-every", learn_trace_every, "Trace row cadence");
    learn->add_option("--out", learn_out, "Output directory")->required();
    learn->callback([&] {
        auto started = std::chrono::steady_clock::now();
        if (auto env = env_seed_override()) learn_seed = *env;
        if (learn_soc.empty() == learn_matrix.empty())
            throw std::invalid_argument("learn: provide exactly one of --soc or --matrix");

        std::optional<RewardMatrix> means;
        if (!learn_soc.empty()) {
            SocFile soc = parse_soc(csv::read_text_file(learn_soc));
            PreferenceProfile profile = soc_to_profile(soc);
            means = bandit_from_profile(profile, parse_number_list(learn_rank_means), learn_sample,
                                        learn_seed);
        } else {
            means = csv::read_matrix_file(learn_matrix);
        }
        RewardModel model = learn_model == "beta"        ? RewardModel::beta_mean_std(*means, learn_std)
                            : learn_model == "bernoulli" ? RewardModel::bernoulli(*means)
                            : learn_model == "pointmass" ? RewardModel::point_mass(*means)
                                                         : throw std::invalid_argument(
                                                               "unknown reward model '" + learn_model + "'");

        LearnConfig config;
        if (learn_method == "pf") config.method = FairnessMethod::PF;
        else if (learn_method == "ef") config.method = FairnessMethod::EF;
        else if (learn_method == "uf") config.method = FairnessMethod::UF;
        else throw std::invalid_argument("unknown method '" + learn_method + "'");
        config.horizon = learn_T;
        config.gamma = learn_gamma;
        config.alpha = learn_alpha;
        config.seed = learn_seed;
        config.trace_every = learn_trace_every;

        BanditInstance instance(std::move(model));
        LearnResult result = learn_policy(instance, config);

        fs::create_directories(learn_out);
        fs::path dir(learn_out);
        {
            std::ofstream out(dir / "trace.csv");
            write_trace_csv(out, result.trace);
        }
        {
            std::ofstream out(dir / "matrix.csv");
            csv::write_matrix_csv(out, instance.means);
        }
        json final_out;
        final_out["policy"] = policy_json(result.final_policy);
        final_out["scores"] = report_json(score_all(instance.means, result.final_policy));
        csv::write_text_file((dir / "final_policy.json").string(), final_out.dump(2) + "\n");

        json config_echo;
        config_echo["method"] = learn_method;
        config_echo["T"] = learn_T;
        config_echo["gamma"] = learn_gamma;
        config_echo["alpha"] = learn_alpha ? json(*learn_alpha) : json(nullptr);
        config_echo["seed"] = learn_seed;
        config_echo["trace_every"] = learn_trace_every;
        config_echo["model"] = learn_model;
        config_echo["std"] = learn_std;
        if (!learn_soc.empty()) {
            config_echo["soc"] = learn_soc;
            config_echo["sample"] = learn_sample;
            config_echo["rank_means"] = learn_rank_means;
        } else {
            config_echo["matrix"] = learn_matrix;
        }
        double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        write_manifest(dir, "learn", config_echo, learn_seed,
                       {"trace.csv", "matrix.csv", "final_policy.json"}, seconds);
        std::cout << "rounds: " << learn_T << ", trace rows: " << result.trace.size() << '\n';
    });

    // --- core-check ------------------------------------------------------
    auto* core = app.add_subcommand("core-check", "Certify core membership of a policy");
    std::string core_matrix, core_policy, core_which = "procedural";
    double core_tol = 1e-9;
    core->add_option("--matrix", core_matrix, "Reward matrix CSV")->required();
    core->add_option("--policy", core_policy, "Policy CSV")->required();
    core->add_option("--which", core_which, "procedural|outcome");
    core->add_option("--tol", core_tol, "Blocking margin tolerance");
    core->callback([&] {
        RewardMatrix matrix = csv::read_matrix_file(core_matrix);
        Policy policy = csv::read_policy_file(core_policy);
        CoreVerdict verdict;
        if (core_which == "procedural") verdict = check_procedural_core(matrix, policy, core_tol);
        else if (core_which == "outcome") verdict = check_outcome_core(matrix, policy, core_tol);
        else throw std::invalid_argument("unknown core kind '" + core_which + "'");
        json out;
        out["in_core"] = verdict.in_core;
        if (verdict.blocking_coalition) {
            json coalition = json::array();
            for (int agent : *verdict.blocking_coalition) coalition.push_back(agent + 1);
            out["coalition"] = coalition;
        } else {
            out["coalition"] = nullptr;
        }
        out["policy"] = verdict.blocking_policy ? policy_json(*verdict.blocking_policy) : json(nullptr);
        out["margin"] = verdict.margin;
        std::cout << out.dump(2) << '\n';
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
