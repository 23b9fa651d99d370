#pragma once

#include "toolcache/cache_store.hpp"
#include "toolcache/model.hpp"

namespace toolcache {

// Plain LRU admits every cacheable request; eviction makes room.
inline bool lru_admit(const ToolCallRequest&) { return true; }

// Least recently used entry. Throws EmptyCache.
CacheKey lru_select_victim(const CacheStore& store);

// The CACA reward: the value-aware reward without its log(V + d3) factor.
double caca_group_reward(const GroupNode& g, const PolicyConfig& cfg);

}  // namespace toolcache
