#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "toolcache/annotator.hpp"
#include "toolcache/cache_store.hpp"
#include "toolcache/policy.hpp"
#include "toolcache/value_model.hpp"

namespace toolcache {

struct RequestOutcome {
    bool hit = false;
    bool cacheable = false;
    double served_latency_ms = 0.0;
    bool admitted = false;
    std::vector<CacheKey> evicted_keys;
    double cost_incurred = 0.0;
    std::uint64_t bytes_fetched = 0;
    double value_score = 0.0;
    AdmissionDecision decision;

    bool operator==(const RequestOutcome&) const = default;
};

struct EngineStats {
    std::uint64_t requests = 0;
    std::uint64_t hits = 0;
    double hit_ratio = 0.0;
    double total_latency_ms = 0.0;
    double total_cost = 0.0;
    std::uint64_t total_bytes = 0;
    std::uint64_t evictions = 0;
    std::uint64_t expirations = 0;
    std::uint64_t admissions = 0;
    std::uint64_t rejections = 0;
    std::uint64_t uncacheable = 0;

    bool operator==(const EngineStats&) const = default;
};

// Request pipeline: lookup, then on a miss fulfil (from the trace's ground
// truth), annotate, gate, value, admit and evict. Single-writer; one engine
// per simulated cache.
class CacheEngine {
  public:
    CacheEngine(PolicyConfig cfg, std::unique_ptr<CachePolicy> policy, std::shared_ptr<Annotator> annotator);

    RequestOutcome process(const ToolCallRequest& r);

    EngineStats stats_snapshot() const;
    const CacheStore& store() const { return store_; }
    const CachePolicy& policy() const { return *policy_; }
    const FeatureRange& ranges() const { return ranges_; }
    double tau() const { return value_cfg_.tau_s; }

  private:
    void update_tau();

    PolicyConfig cfg_;
    PolicyConfig value_cfg_;  // cfg_ with the current adaptive tau
    std::unique_ptr<CachePolicy> policy_;
    std::shared_ptr<Annotator> annotator_;
    CacheStore store_;
    FeatureRange ranges_;
    EngineStats stats_;
};

}  // namespace toolcache
