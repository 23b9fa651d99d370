#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "toolcache/cache_store.hpp"
#include "toolcache/grouping.hpp"
#include "toolcache/vaac_policy.hpp"

namespace toolcache {

// Admission + eviction strategy plugged into the cache engine.
class CachePolicy {
  public:
    virtual ~CachePolicy() = default;

    virtual std::string_view name() const = 0;
    // One decision per cacheable miss; space_available is true when the
    // entry fits without an eviction.
    virtual AdmissionDecision admit(const GroupFeatures& f, double value, bool space_available) = 0;
    virtual CacheKey select_victim(const CacheStore& store) = 0;
    // Every cacheable request, hit or miss.
    virtual void record(const GroupFeatures&, bool /*hit*/, double /*value*/) {}
    // Every request, cacheable or not.
    virtual void tick() {}
};

class LruPolicy final : public CachePolicy {
  public:
    std::string_view name() const override { return "lru"; }
    AdmissionDecision admit(const GroupFeatures& f, double value, bool space_available) override;
    CacheKey select_victim(const CacheStore& store) override;
};

// Grouping tree + UCB1 admission. With the value factor on and value-aware
// eviction this is VAAC; with both off it is CACA.
class BanditPolicy final : public CachePolicy {
  public:
    BanditPolicy(std::string name, PolicyConfig cfg);

    std::string_view name() const override { return name_; }
    AdmissionDecision admit(const GroupFeatures& f, double value, bool space_available) override;
    CacheKey select_victim(const CacheStore& store) override;
    void record(const GroupFeatures& f, bool hit, double value) override;
    void tick() override;

    const GroupingState& grouping() const { return state_; }
    const PolicyConfig& config() const { return cfg_; }

  private:
    std::string name_;
    PolicyConfig cfg_;
    GroupingState state_;
};

// "vaac" | "caca" | "lru"; throws ConfigError otherwise.
std::unique_ptr<CachePolicy> make_policy(std::string_view name, const PolicyConfig& cfg);

// Configuration a named policy actually runs with (CACA forces the value
// factor off and plain LRU eviction).
PolicyConfig effective_config(std::string_view name, PolicyConfig cfg);

bool is_known_policy(std::string_view name);

}  // namespace toolcache
