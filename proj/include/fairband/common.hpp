#ifndef FAIRBAND_COMMON_HPP
#define FAIRBAND_COMMON_HPP

#include <cstdint>
#include <random>

namespace fairband {

// Absolute tolerance used when deciding whether two mean rewards tie.
inline constexpr double kDefaultTieTolerance = 1e-9;

// Tolerance for "sums to one" checks on policies.
inline constexpr double kPolicySumTolerance = 1e-9;

// Entries of a policy may dip this far below zero before we reject them;
// reads clamp them back to 0.
inline constexpr double kPolicyNegativeSlack = 1e-12;

// Deterministic engine derived from a master seed and a stream id, so that
// parallel work items can draw independent, reproducible streams.
inline std::mt19937_64 seeded_rng(std::uint64_t master, std::uint64_t stream = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

} // namespace fairband

#endif
