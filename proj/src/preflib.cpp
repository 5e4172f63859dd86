#include "fairband/preflib.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace fairband {

namespace {

std::string trim(const std::string& s) {
    std::size_t begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    std::size_t end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

[[noreturn]] void fail(int line_no, const std::string& message) {
    throw std::invalid_argument("soc line " + std::to_string(line_no) + ": " + message);
}

long parse_long(const std::string& s, int line_no, const std::string& what) {
    try {
        std::size_t used = 0;
        long v = std::stol(s, &used);
        if (used != s.size()) fail(line_no, what + ": trailing characters in '" + s + "'");
        return v;
    } catch (const std::invalid_argument&) {
        fail(line_no, what + ": expected an integer, got '" + s + "'");
    } catch (const std::out_of_range&) {
        fail(line_no, what + ": integer out of range in '" + s + "'");
    }
}

} // namespace

SocFile parse_soc(const std::string& text) {
    SocFile file;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    bool saw_alternatives = false, saw_voters = false;
    long multiplicity_total = 0;

    while (std::getline(in, line)) {
        ++line_no;
        std::string trimmed = trim(line);
        if (trimmed.empty()) continue;

        if (trimmed[0] == '#') {
            std::string body = trim(trimmed.substr(1));
            std::size_t colon = body.find(':');
            if (colon == std::string::npos) {
                file.metadata.emplace_back(body, "");
                continue;
            }
            std::string key = trim(body.substr(0, colon));
            std::string value = trim(body.substr(colon + 1));
            file.metadata.emplace_back(key, value);
            if (key == "NUMBER ALTERNATIVES") {
                file.n_alternatives = static_cast<int>(parse_long(value, line_no, key));
                saw_alternatives = true;
            } else if (key == "NUMBER VOTERS") {
                file.n_voters = parse_long(value, line_no, key);
                saw_voters = true;
            } else if (key == "DATA TYPE" && value != "soc") {
                fail(line_no, "unsupported data type '" + value + "' (only soc is accepted)");
            }
            continue;
        }

        if (!saw_alternatives || !saw_voters)
            fail(line_no, "ballot appears before NUMBER ALTERNATIVES / NUMBER VOTERS metadata");
        if (trimmed.find('{') != std::string::npos)
            fail(line_no, "ties are not allowed in a soc file");

        std::size_t colon = trimmed.find(':');
        if (colon == std::string::npos) fail(line_no, "expected 'count: a,b,c,...'");
        long count = parse_long(trim(trimmed.substr(0, colon)), line_no, "ballot multiplicity");
        if (count <= 0) fail(line_no, "ballot multiplicity must be positive");

        SocBallot ballot;
        ballot.multiplicity = count;
        std::string rest = trimmed.substr(colon + 1);
        std::istringstream items(rest);
        std::string item;
        std::vector<bool> seen(file.n_alternatives, false);
        while (std::getline(items, item, ',')) {
            long alt = parse_long(trim(item), line_no, "alternative");
            if (alt < 1 || alt > file.n_alternatives)
                fail(line_no, "alternative " + std::to_string(alt) + " out of range");
            if (seen[alt - 1])
                fail(line_no, "alternative " + std::to_string(alt) + " listed twice");
            seen[alt - 1] = true;
            ballot.ranking.push_back(static_cast<int>(alt - 1));
        }
        if (static_cast<int>(ballot.ranking.size()) != file.n_alternatives)
            fail(line_no, "incomplete ranking: got " + std::to_string(ballot.ranking.size()) +
                              " of " + std::to_string(file.n_alternatives) + " alternatives");
        multiplicity_total += count;
        file.ballots.push_back(std::move(ballot));
    }

    if (!saw_alternatives) throw std::invalid_argument("soc: missing NUMBER ALTERNATIVES metadata");
    if (!saw_voters) throw std::invalid_argument("soc: missing NUMBER VOTERS metadata");
    if (file.n_alternatives < 1) throw std::invalid_argument("soc: need at least one alternative");
    if (file.ballots.empty()) throw std::invalid_argument("soc: no ballots");
    if (multiplicity_total != file.n_voters)
        throw std::invalid_argument("soc: ballot multiplicities sum to " +
                                    std::to_string(multiplicity_total) + " but the file declares " +
                                    std::to_string(file.n_voters) + " voters");
    return file;
}

std::string serialize_soc(const SocFile& file) {
    std::ostringstream out;
    for (const auto& [key, value] : file.metadata) {
        out << "# " << key;
        if (!value.empty()) out << ": " << value;
        out << '\n';
    }
    for (const auto& ballot : file.ballots) {
        out << ballot.multiplicity << ": ";
        for (std::size_t r = 0; r < ballot.ranking.size(); ++r) {
            if (r) out << ',';
            out << (ballot.ranking[r] + 1);
        }
        out << '\n';
    }
    return out.str();
}

PreferenceProfile soc_to_profile(const SocFile& file) {
    PreferenceProfile profile;
    profile.n_alternatives = file.n_alternatives;
    profile.n_voters = static_cast<int>(file.n_voters);
    profile.rankings.reserve(file.n_voters);
    for (const auto& ballot : file.ballots)
        for (long c = 0; c < ballot.multiplicity; ++c) profile.rankings.push_back(ballot.ranking);
    return profile;
}

RewardMatrix bandit_from_profile(const PreferenceProfile& profile,
                                 const std::vector<double>& rank_means, int n_sample,
                                 std::uint64_t seed) {
    if (static_cast<int>(rank_means.size()) != profile.n_alternatives)
        throw std::invalid_argument("bandit_from_profile: need one mean per rank");
    if (n_sample < 1 || n_sample > profile.n_voters)
        throw std::invalid_argument("bandit_from_profile: sample size " + std::to_string(n_sample) +
                                    " out of range for " + std::to_string(profile.n_voters) +
                                    " voters");

    // Partial Fisher-Yates; std::sample's selection is not pinned by the
    // standard, this is.
    std::mt19937_64 rng = seeded_rng(seed);
    std::vector<int> indices(profile.n_voters);
    for (int i = 0; i < profile.n_voters; ++i) indices[i] = i;
    for (int i = 0; i < n_sample; ++i) {
        int j = std::uniform_int_distribution<int>(i, profile.n_voters - 1)(rng);
        std::swap(indices[i], indices[j]);
    }

    std::vector<std::vector<double>> rows;
    rows.reserve(n_sample);
    for (int s = 0; s < n_sample; ++s) {
        const auto& ranking = profile.rankings[indices[s]];
        std::vector<double> row(profile.n_alternatives, 0.0);
        for (int r = 0; r < profile.n_alternatives; ++r) row[ranking[r]] = rank_means[r];
        rows.push_back(std::move(row));
    }
    return RewardMatrix::from_rows(rows);
}

RewardModel beta_models(const RewardMatrix& matrix, double std) {
    return RewardModel::beta_mean_std(matrix, std);
}

} // namespace fairband
