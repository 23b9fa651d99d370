#include "toolcache/vaac_policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "toolcache/errors.hpp"

namespace toolcache {

double group_reward(double hit_ratio, int level, double avg_value, std::uint64_t admitted, const PolicyConfig& cfg) {
    const double v = std::max(avg_value, 0.0);
    double numerator = std::log(hit_ratio + cfg.delta1) * std::log(static_cast<double>(level) + cfg.delta2);
    if (cfg.value_reward) numerator *= std::log(v + cfg.delta3);
    return numerator / std::log(static_cast<double>(admitted) + cfg.delta4);
}

double group_reward(const GroupNode& g, const PolicyConfig& cfg) {
    return group_reward(g.hit_ratio(), g.level, g.average_value(), g.admitted_count, cfg);
}

double ucb_score(double reward, std::uint64_t selections, std::uint64_t round, double exploration) {
    if (selections == 0) return std::numeric_limits<double>::infinity();
    return reward + exploration * std::sqrt(std::log(static_cast<double>(round)) / static_cast<double>(selections));
}

double ucb_score(const GroupNode& g, std::uint64_t round, const PolicyConfig& cfg) {
    return ucb_score(group_reward(g, cfg), g.selection_count, round, cfg.exploration);
}

bool ranks_before(const ArmView& a, const ArmView& b) {
    if (a.ucb != b.ucb) return a.ucb > b.ucb;
    if (a.avg_value != b.avg_value) return a.avg_value > b.avg_value;
    return *a.path < *b.path;
}

std::size_t select_arm(std::span<const ArmView> arms) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < arms.size(); ++i) {
        if (ranks_before(arms[i], arms[best])) best = i;
    }
    return best;
}

AdmissionDecision decide_admission(GroupingState& state, GroupNode& leaf, const PolicyConfig& cfg,
                                   bool space_available) {
    ++state.round;
    AdmissionDecision d;
    d.group_path = leaf.path;
    d.ucb_score = ucb_score(leaf, state.round, cfg);
    if (state.warmup_active || (space_available && cfg.admit_when_free)) {
        d.admitted = true;
        d.rank = 1;
        return d;
    }

    auto arms = collect_arms(state.root);
    if (std::find(arms.begin(), arms.end(), &leaf) == arms.end()) arms.push_back(&leaf);

    const ArmView mine{d.ucb_score, leaf.average_value(), &leaf.path};
    int rank = 1;
    for (const GroupNode* g : arms) {
        if (g == &leaf) continue;
        const ArmView other{ucb_score(*g, state.round, cfg), g->average_value(), &g->path};
        if (ranks_before(other, mine)) ++rank;
    }
    const auto k = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(cfg.admit_fraction * static_cast<double>(arms.size()))));
    d.rank = rank;
    d.admitted = static_cast<std::size_t>(rank) <= k || leaf.selection_count == 0;
    if (d.admitted) {
        ++leaf.admitted_count;
        ++leaf.selection_count;
    }
    return d;
}

std::vector<CacheKey> purge_expired(CacheStore& store, double now) {
    auto keys = store.expired_at(now);
    for (const auto& k : keys) store.erase(k);
    return keys;
}

double entry_hit_ratio(const CacheEntry& e) {
    const auto h = static_cast<double>(e.hit_count);
    return h / (h + 1.0);
}

double eviction_score(const CacheEntry& e, const PolicyConfig& cfg) {
    return std::log(e.value_score + entry_hit_ratio(e) + cfg.delta5);
}

CacheKey select_victim(const CacheStore& store, const PolicyConfig& cfg) {
    if (store.empty()) throw EmptyCache();
    const auto n = store.size();
    const auto m = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(cfg.recency_candidate_fraction * static_cast<double>(n) - 1e-9)));
    const auto candidates = store.least_recent(m);
    const CacheEntry* best = nullptr;
    double best_score = 0.0;
    for (const CacheEntry* e : candidates) {
        const double s = eviction_score(*e, cfg);
        if (!best || s < best_score ||
            (s == best_score && (e->insert_seq < best->insert_seq ||
                                 (e->insert_seq == best->insert_seq && e->key < best->key)))) {
            best = e;
            best_score = s;
        }
    }
    return best->key;
}

}  // namespace toolcache
