#include "toolcache/engine.hpp"

#include <algorithm>

#include "toolcache/errors.hpp"
#include "toolcache/keying.hpp"
#include "toolcache/vaac_policy.hpp"

namespace toolcache {

CacheEngine::CacheEngine(PolicyConfig cfg, std::unique_ptr<CachePolicy> policy, std::shared_ptr<Annotator> annotator)
    : cfg_(cfg), value_cfg_(cfg), policy_(std::move(policy)), annotator_(std::move(annotator)),
      store_(static_cast<std::size_t>(cfg.capacity)) {
    validate_config(cfg_);
    if (!policy_) throw ConfigError("engine needs a policy");
    if (!annotator_) throw ConfigError("engine needs an annotator");
}

void CacheEngine::update_tau() {
    if (!cfg_.adaptive_tau || store_.empty()) return;
    value_cfg_.tau_s = std::max(cfg_.tau_floor_s, store_.mean_ttl());
}

RequestOutcome CacheEngine::process(const ToolCallRequest& r) {
    validate_request(r);
    store_.advance(r.arrival_gap_s);
    const auto expired = purge_expired(store_, store_.clock());
    if (!expired.empty()) {
        stats_.expirations += expired.size();
        update_tau();
    }

    const CacheKey key = make_key(r);
    RequestOutcome out;
    ++stats_.requests;

    if (store_.contains(key)) {
        const CacheEntry& e = store_.touch(key, r.user_id);
        out.hit = true;
        out.cacheable = true;
        out.value_score = e.value_score;
        ++stats_.hits;
        policy_->record({r.tool_name, e.semantic.parameter_category, r.user_id}, true, e.value_score);
        policy_->tick();
        return out;
    }

    out.served_latency_ms = r.true_latency_ms;
    out.cost_incurred = r.true_cost_units;
    out.bytes_fetched = r.true_size_bytes;
    stats_.total_latency_ms += r.true_latency_ms;
    stats_.total_cost += r.true_cost_units;
    stats_.total_bytes += r.true_size_bytes;

    const SemanticFeatures features = annotator_->annotate(r);
    if (!is_cacheable(features)) {
        ++stats_.uncacheable;
        policy_->tick();
        return out;
    }
    out.cacheable = true;

    ranges_ = observe(ranges_, r.true_latency_ms, r.true_cost_units, static_cast<double>(r.true_size_bytes));
    const double eps = cfg_.epsilon;
    const double value = caching_value(value_cfg_, normalize(ranges_, Feature::Latency, r.true_latency_ms, eps),
                                       normalize(ranges_, Feature::Cost, r.true_cost_units, eps),
                                       normalize(ranges_, Feature::Size, static_cast<double>(r.true_size_bytes), eps),
                                       features.ttl_seconds);
    out.value_score = value;

    const GroupFeatures gf{r.tool_name, features.parameter_category, r.user_id};
    out.decision = policy_->admit(gf, value, !store_.full());
    out.admitted = out.decision.admitted;
    if (out.admitted) {
        ++stats_.admissions;
        while (store_.full()) {
            const CacheKey victim = policy_->select_victim(store_);
            store_.erase(victim);
            out.evicted_keys.push_back(victim);
            ++stats_.evictions;
        }
        CacheEntry entry;
        entry.key = key;
        entry.payload = r.result_payload;
        entry.semantic = features;
        entry.system.associated_users.insert(r.user_id);
        entry.system.result_size_bytes = r.true_size_bytes;
        entry.system.system_latency_ms = r.true_latency_ms;
        entry.system.resource_cost_units = r.true_cost_units;
        entry.value_score = value;
        store_.insert(std::move(entry));
        update_tau();
    } else {
        ++stats_.rejections;
    }

    policy_->record(gf, false, value);
    policy_->tick();
    return out;
}

EngineStats CacheEngine::stats_snapshot() const {
    EngineStats s = stats_;
    s.hit_ratio = s.requests == 0 ? 0.0 : static_cast<double>(s.hits) / static_cast<double>(s.requests);
    return s;
}

}  // namespace toolcache
