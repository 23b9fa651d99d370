#include "toolcache/policy.hpp"

#include "toolcache/baseline.hpp"
#include "toolcache/errors.hpp"

namespace toolcache {

BanditPolicy::BanditPolicy(std::string name, PolicyConfig cfg) : name_(std::move(name)), cfg_(std::move(cfg)) {
    validate_config(cfg_);
}

AdmissionDecision BanditPolicy::admit(const GroupFeatures& f, double, bool space_available) {
    GroupNode& leaf = locate_group(state_, f);
    return decide_admission(state_, leaf, cfg_, space_available);
}

CacheKey BanditPolicy::select_victim(const CacheStore& store) {
    if (cfg_.eviction == EvictionMode::Lru) return lru_select_victim(store);
    return toolcache::select_victim(store, cfg_);
}

void BanditPolicy::record(const GroupFeatures& f, bool hit, double value) {
    record_outcome(state_, f, hit, value, cfg_);
}

void BanditPolicy::tick() { count_request(state_, cfg_); }

bool is_known_policy(std::string_view name) { return name == "vaac" || name == "caca" || name == "lru"; }

PolicyConfig effective_config(std::string_view name, PolicyConfig cfg) {
    if (name == "caca") {
        cfg.value_reward = false;
        cfg.eviction = EvictionMode::Lru;
    }
    return cfg;
}

std::unique_ptr<CachePolicy> make_policy(std::string_view name, const PolicyConfig& cfg) {
    if (name == "lru") return std::make_unique<LruPolicy>();
    if (name == "vaac" || name == "caca")
        return std::make_unique<BanditPolicy>(std::string(name), effective_config(name, cfg));
    throw ConfigError("unknown policy: " + std::string(name));
}

}  // namespace toolcache
