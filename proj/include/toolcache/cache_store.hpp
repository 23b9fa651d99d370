#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "toolcache/keying.hpp"
#include "toolcache/model.hpp"

namespace toolcache {

struct CacheEntry {
    CacheKey key;
    std::string payload;
    SemanticFeatures semantic;
    SystemFeatures system;
    double value_score = 0.0;
    std::uint64_t hit_count = 0;
    double insert_time = 0.0;
    double last_access_time = 0.0;
    double expiry_time = 0.0;
    // Store-assigned sequence numbers: total orders for insertion and recency.
    std::uint64_t insert_seq = 0;
    std::uint64_t access_seq = 0;
};

// Entry map plus recency and expiry indexes. Capacity counts entries. The
// store never evicts on its own; insert() into a full store is an error.
class CacheStore {
  public:
    explicit CacheStore(std::size_t capacity);

    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    bool full() const { return entries_.size() >= capacity_; }

    double clock() const { return clock_; }
    void advance(double seconds);

    const CacheEntry* find(const CacheKey& key) const;
    bool contains(const CacheKey& key) const { return entries_.count(key) != 0; }

    // Records a hit at the current clock and moves the entry to the MRU end.
    const CacheEntry& touch(const CacheKey& key, const std::string& user);

    // Stamps insert/access times from the clock and expiry from the TTL.
    const CacheEntry& insert(CacheEntry entry);
    CacheEntry erase(const CacheKey& key);

    // Up to `n` entries, least recently used first.
    std::vector<const CacheEntry*> least_recent(std::size_t n) const;

    // Keys with expiry_time <= now, earliest expiry first.
    std::vector<CacheKey> expired_at(double now) const;

    double mean_ttl() const;

    template <typename F>
    void for_each(F&& f) const {
        for (const auto& [k, e] : entries_) f(e);
    }

  private:
    std::size_t capacity_;
    double clock_ = 0.0;
    std::uint64_t next_seq_ = 0;
    double ttl_sum_ = 0.0;
    std::unordered_map<CacheKey, CacheEntry> entries_;
    std::map<std::uint64_t, CacheKey> recency_;
    std::set<std::pair<double, std::uint64_t>> expiry_;
    std::unordered_map<std::uint64_t, CacheKey> by_insert_seq_;
};

}  // namespace toolcache
