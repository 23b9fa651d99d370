#include "toolcache/cache_store.hpp"

#include "toolcache/errors.hpp"

namespace toolcache {

CacheStore::CacheStore(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw ConfigError("cache capacity must be >= 1");
}

void CacheStore::advance(double seconds) {
    if (seconds > 0) clock_ += seconds;
}

const CacheEntry* CacheStore::find(const CacheKey& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
}

const CacheEntry& CacheStore::touch(const CacheKey& key, const std::string& user) {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw Error("touch of non-resident key");
    CacheEntry& e = it->second;
    recency_.erase(e.access_seq);
    e.access_seq = next_seq_++;
    recency_.emplace(e.access_seq, key);
    e.last_access_time = clock_;
    ++e.hit_count;
    ++e.system.access_count;
    e.system.associated_users.insert(user);
    return e;
}

const CacheEntry& CacheStore::insert(CacheEntry entry) {
    if (entries_.count(entry.key)) throw Error("insert of resident key");
    if (full()) throw Error("insert into full cache");
    entry.insert_time = clock_;
    entry.last_access_time = clock_;
    entry.expiry_time = clock_ + entry.semantic.ttl_seconds;
    entry.insert_seq = entry.access_seq = next_seq_++;
    recency_.emplace(entry.access_seq, entry.key);
    expiry_.emplace(entry.expiry_time, entry.insert_seq);
    by_insert_seq_.emplace(entry.insert_seq, entry.key);
    ttl_sum_ += entry.semantic.ttl_seconds;
    auto [it, ok] = entries_.emplace(entry.key, std::move(entry));
    return it->second;
}

CacheEntry CacheStore::erase(const CacheKey& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw Error("erase of non-resident key");
    CacheEntry e = std::move(it->second);
    entries_.erase(it);
    recency_.erase(e.access_seq);
    expiry_.erase({e.expiry_time, e.insert_seq});
    by_insert_seq_.erase(e.insert_seq);
    ttl_sum_ -= e.semantic.ttl_seconds;
    if (entries_.empty()) ttl_sum_ = 0.0;
    return e;
}

std::vector<const CacheEntry*> CacheStore::least_recent(std::size_t n) const {
    std::vector<const CacheEntry*> out;
    out.reserve(std::min(n, entries_.size()));
    for (auto it = recency_.begin(); it != recency_.end() && out.size() < n; ++it)
        out.push_back(&entries_.at(it->second));
    return out;
}

std::vector<CacheKey> CacheStore::expired_at(double now) const {
    std::vector<CacheKey> out;
    for (auto it = expiry_.begin(); it != expiry_.end() && it->first <= now; ++it)
        out.push_back(by_insert_seq_.at(it->second));
    return out;
}

double CacheStore::mean_ttl() const {
    return entries_.empty() ? 0.0 : ttl_sum_ / static_cast<double>(entries_.size());
}

}  // namespace toolcache
