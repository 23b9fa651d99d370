#include "toolcache/baseline.hpp"

#include "toolcache/errors.hpp"
#include "toolcache/policy.hpp"
#include "toolcache/vaac_policy.hpp"

namespace toolcache {

CacheKey lru_select_victim(const CacheStore& store) {
    const auto oldest = store.least_recent(1);
    if (oldest.empty()) throw EmptyCache();
    return oldest.front()->key;
}

double caca_group_reward(const GroupNode& g, const PolicyConfig& cfg) {
    PolicyConfig plain = cfg;
    plain.value_reward = false;
    return group_reward(g, plain);
}

AdmissionDecision LruPolicy::admit(const GroupFeatures&, double, bool) {
    AdmissionDecision d;
    d.admitted = true;
    return d;
}

CacheKey LruPolicy::select_victim(const CacheStore& store) { return lru_select_victim(store); }

}  // namespace toolcache
