#pragma once

// Shared domain types for the tool-call cache: requests, extracted features,
// cache entries, grouping-tree nodes and policy configuration.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace toolcache {

// Tool-call arguments keep their insertion order: the first parameter is the
// default grouping category.
using ParamValue = nlohmann::ordered_json;

struct Param {
    std::string name;
    ParamValue value;

    bool operator==(const Param&) const = default;
};

using Params = std::vector<Param>;

enum class RequestType { Informational, Command };

std::string_view to_string(RequestType t);
RequestType request_type_from_string(std::string_view s);

struct SemanticFeatures {
    RequestType request_type = RequestType::Informational;
    std::optional<std::string> parameter_category;
    double ttl_seconds = 0.0;

    bool operator==(const SemanticFeatures&) const = default;
};

struct ToolCallRequest {
    std::uint64_t seq = 0;
    std::string user_id;
    std::string tool_name;
    Params params;
    double true_latency_ms = 0.0;
    double true_cost_units = 0.0;
    std::uint64_t true_size_bytes = 0;
    std::string result_payload;
    // Seconds of logical time elapsed since the previous request.
    double arrival_gap_s = 1.0;
    // Present when the trace record was pre-annotated.
    std::optional<SemanticFeatures> annotation;

    bool operator==(const ToolCallRequest&) const = default;
};

// Throws MalformedRequest naming the first violated field.
void validate_request(const ToolCallRequest& r);

// Checks seq ordering across a whole trace on top of per-record validation.
void validate_trace(const std::vector<ToolCallRequest>& trace);

struct SystemFeatures {
    std::set<std::string> associated_users;
    std::uint64_t access_count = 0;
    std::uint64_t result_size_bytes = 0;
    double system_latency_ms = 0.0;
    double resource_cost_units = 0.0;

    bool operator==(const SystemFeatures&) const = default;
};

// Node of the tool -> parameter category -> user grouping tree. A node acts
// as a bandit arm when it is a leaf or when it holds requests that were too
// few to form their own child group.
struct GroupNode {
    std::vector<std::string> path;
    int level = 0;
    std::uint64_t access_count = 0;
    std::uint64_t hit_count = 0;
    std::uint64_t admitted_count = 0;
    std::uint64_t selection_count = 0;
    double value_sum = 0.0;
    std::uint64_t member_count = 0;
    bool absorbs = false;
    std::vector<GroupNode> children;

    double hit_ratio() const {
        return static_cast<double>(hit_count) / static_cast<double>(std::max<std::uint64_t>(access_count, 1));
    }
    double average_value() const {
        return value_sum / static_cast<double>(std::max<std::uint64_t>(member_count, 1));
    }
    bool is_leaf() const { return children.empty(); }
    bool is_arm() const { return level >= 1 && (is_leaf() || absorbs); }

    bool operator==(const GroupNode&) const = default;
};

enum class EvictionMode { ValueLru, Lru };

std::string_view to_string(EvictionMode m);
EvictionMode eviction_mode_from_string(std::string_view s);

struct PolicyConfig {
    double lambda1 = 0.8;
    double lambda2 = 0.2;
    double lambda3 = 0.2;
    double tau_s = 300.0;
    // Lower bound for the adaptive tau (mean TTL of resident entries).
    double tau_floor_s = 60.0;
    bool adaptive_tau = true;
    std::uint64_t split_min_access = 20;      // T1
    double split_max_hit_ratio = 0.5;         // H^r
    std::uint64_t min_group_size = 5;         // S_min
    std::uint64_t regroup_interval = 200;     // B
    double exploration = 1.4142135623730951;  // c
    double admit_fraction = 0.5;              // rho
    double delta1 = 1.0;
    double delta2 = 1.0;
    double delta3 = 1.0;
    double delta4 = 2.718281828459045;
    double delta5 = 1.0;
    double epsilon = 0.01;
    std::uint64_t capacity = 1;
    double recency_candidate_fraction = 0.1;
    int max_group_level = 3;
    bool value_reward = true;
    // Skip the bandit while the cache still has room (no eviction needed).
    bool admit_when_free = true;
    EvictionMode eviction = EvictionMode::ValueLru;

    bool operator==(const PolicyConfig&) const = default;
};

// Throws ConfigError when a field is outside its legal range.
void validate_config(const PolicyConfig& cfg);

// Applies the keys present in `overrides` (named after the fields above) on
// top of `base`. Unknown keys are a ConfigError.
PolicyConfig apply_overrides(PolicyConfig base, const nlohmann::json& overrides);

void to_json(nlohmann::json& j, const SemanticFeatures& f);
void from_json(const nlohmann::json& j, SemanticFeatures& f);
void to_json(nlohmann::json& j, const SystemFeatures& f);
void from_json(const nlohmann::json& j, SystemFeatures& f);
void to_json(nlohmann::json& j, const GroupNode& g);
void from_json(const nlohmann::json& j, GroupNode& g);
void to_json(nlohmann::json& j, const PolicyConfig& c);
void from_json(const nlohmann::json& j, PolicyConfig& c);

// Trace record schema (one JSON object per line).
nlohmann::ordered_json request_to_record(const ToolCallRequest& r);
ToolCallRequest request_from_record(const nlohmann::ordered_json& j);

}  // namespace toolcache
