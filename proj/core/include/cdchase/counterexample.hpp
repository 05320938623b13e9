#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cdchase/chase.hpp"
#include "cdchase/model.hpp"

namespace cdchase {

/// The level-growth family: schema {e/1, e'/1, r/2, s/2}, key(s) = {1},
///   r[1] <= e[1], r[2] <= e[1], r[1,2] <= s[1,2], e[1] <= r[1],
///   s[2] <= e'[1], s[1] <= e'[1],
/// and the database {e(1), s(1,2), ..., s(n-1,n)}.
///
/// The constants 1..n are zero-padded to the width of n so that byte-wise
/// order agrees with numeric order.
struct CounterexampleInstance {
    std::uint32_t n = 0;
    Schema schema;
    DependencySet deps;
    Database db;
};

CounterexampleInstance build_counterexample(std::uint32_t n);

/// Rendering of the number i as used by build_counterexample(n).
Constant counterexample_constant(std::uint32_t i, std::uint32_t n);

/// Growth measured over one chase of the family.
struct GrowthReport {
    std::uint32_t n = 0;
    /// Always 2n - 2.
    std::uint32_t probe_level = 0;
    /// i -> level of e(i), for the i whose fact is present.
    std::map<std::uint32_t, std::uint32_t> e_fact_level;
    /// i -> highest level of any fact mentioning constant i.
    std::map<std::uint32_t, std::uint32_t> max_level_of_constant;
    /// i -> lowest level of any fact mentioning constant i.
    std::map<std::uint32_t, std::uint32_t> min_level_of_constant;
    /// Levels of the two occurrences of constant n that witness the gap:
    /// s(n-1,n) at level 0 and e(n) at level 2n-2.
    std::pair<std::uint32_t, std::uint32_t> delta_witness{0, 0};
};

/// Throws std::invalid_argument unless the chase is materialized through
/// level 2n-2.
GrowthReport profile_levels(const ChaseState& chase, std::uint32_t n);

/// Extra levels chased past 2n-2 by refute_constant_bounds.
inline constexpr std::uint32_t kRefutationLevelSlack = 4;

struct RefutationVerdict {
    std::uint32_t n = 0;
    std::uint32_t probe_level = 0;
    /// q(X) <- e(X) over levels < 2n-2 misses <n>.
    bool excluded_below_probe = false;
    /// q(X) <- e(X) over levels < 2n-1 returns <n>.
    bool included_below_probe_plus_one = false;
    /// Level gap between the two witnessed occurrences of constant n.
    std::uint32_t gap = 0;
    std::pair<std::uint32_t, std::uint32_t> delta_witness{0, 0};
    GrowthReport report;
    /// Mismatches against the expected construction; empty on success.
    std::vector<std::string> discrepancies;

    bool holds() const noexcept { return discrepancies.empty(); }
};

/// Builds and chases the family for n, then checks both contradiction
/// arguments: the query answer flips between the two prefixes, and
/// constant n spans levels 0 and 2n-2.
RefutationVerdict refute_constant_bounds(std::uint32_t n);

struct StabilityReport {
    std::uint32_t n = 0;
    /// ID steps taken when e(n) first appeared.
    std::uint64_t step_of_last_e = 0;
    std::uint64_t extra_steps = 0;
    /// Facts at levels < 2n-2, before and after the extra steps.
    std::vector<Fact> before;
    std::vector<Fact> after;

    bool stable() const;
};

/// Chases step by step until e(n) appears, snapshots the facts below level
/// 2n-2, runs `extra_steps` further ID applications (default 4n) and
/// snapshots again.
StabilityReport check_lower_level_stability(std::uint32_t n, std::optional<std::uint64_t> extra_steps = {});

}  // namespace cdchase
