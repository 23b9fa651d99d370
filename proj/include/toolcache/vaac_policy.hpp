#pragma once

#include <span>
#include <string>
#include <vector>

#include "toolcache/cache_store.hpp"
#include "toolcache/grouping.hpp"
#include "toolcache/model.hpp"

namespace toolcache {

struct AdmissionDecision {
    bool admitted = false;
    std::vector<std::string> group_path;
    double ucb_score = 0.0;
    int rank = 1;

    bool operator==(const AdmissionDecision&) const = default;
};

// Group reward from hit ratio H, node level L, average caching value V
// (clamped to >= 0) and admission count C:
//   log(H + d1) * log(L + d2) * log(V + d3) / log(C + d4)
double group_reward(double hit_ratio, int level, double avg_value, std::uint64_t admitted, const PolicyConfig& cfg);
double group_reward(const GroupNode& g, const PolicyConfig& cfg);

// F + c * sqrt(ln t / N); +inf for an arm that was never selected.
double ucb_score(double reward, std::uint64_t selections, std::uint64_t round, double exploration);
double ucb_score(const GroupNode& g, std::uint64_t round, const PolicyConfig& cfg);

struct ArmView {
    double ucb = 0.0;
    double avg_value = 0.0;
    const std::vector<std::string>* path = nullptr;
};

// Strict ranking order: higher UCB, then higher average value, then path.
bool ranks_before(const ArmView& a, const ArmView& b);

// Index of the arm with the best rank.
std::size_t select_arm(std::span<const ArmView> arms);

// One decision round for a cacheable miss landing in `leaf`. Warm-up admits
// everything, as does a miss that fits without eviction when
// cfg.admit_when_free is set; neither touches C or N. Otherwise the leaf must
// rank within the top max(1, ceil(rho * |arms|)) by UCB or be unexplored, and
// admission bumps the leaf's C and N.
AdmissionDecision decide_admission(GroupingState& state, GroupNode& leaf, const PolicyConfig& cfg,
                                   bool space_available = false);

// Removes every entry with expiry_time <= now, earliest expiry first.
std::vector<CacheKey> purge_expired(CacheStore& store, double now);

// Per-entry hit ratio hits / (hits + 1).
double entry_hit_ratio(const CacheEntry& e);

// log(v + h + d5).
double eviction_score(const CacheEntry& e, const PolicyConfig& cfg);

// Lowest eviction score among the ceil(fraction * n) least recently used
// entries; ties go to the oldest insertion, then the smaller key. Throws
// EmptyCache.
CacheKey select_victim(const CacheStore& store, const PolicyConfig& cfg);

}  // namespace toolcache
