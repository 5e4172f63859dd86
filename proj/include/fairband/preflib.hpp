#ifndef FAIRBAND_PREFLIB_HPP
#define FAIRBAND_PREFLIB_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fairband/model.hpp"
#include "fairband/prefgen.hpp"

namespace fairband {

struct SocBallot {
    long multiplicity = 0;
    std::vector<int> ranking; // 0-based alternatives, best first

    bool operator==(const SocBallot&) const = default;
};

/// A strict-order-complete ballot file: '#'-prefixed metadata lines followed
/// by `count: a,b,c,...` lines. Every ballot must rank all alternatives
/// exactly once and the multiplicities must add up to the declared voter
/// count. Other ballot layouts (ties, partial orders) are rejected.
struct SocFile {
    std::vector<std::pair<std::string, std::string>> metadata;
    int n_alternatives = 0;
    long n_voters = 0;
    std::vector<SocBallot> ballots;

    bool operator==(const SocFile&) const = default;
};

SocFile parse_soc(const std::string& text);
std::string serialize_soc(const SocFile& file);

/// Expands ballots by multiplicity into one ranking per voter.
PreferenceProfile soc_to_profile(const SocFile& file);

/// Samples n_sample voters without replacement and maps rank r of the
/// sampled ballot to rank_means[r], giving one agent row per sampled voter.
RewardMatrix bandit_from_profile(const PreferenceProfile& profile,
                                 const std::vector<double>& rank_means, int n_sample,
                                 std::uint64_t seed);

/// Beta(mean, std) reward models for every entry; reports entries where the
/// requested std is infeasible.
RewardModel beta_models(const RewardMatrix& matrix, double std);

} // namespace fairband

#endif
