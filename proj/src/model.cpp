#include "toolcache/model.hpp"

#include <cmath>

#include "toolcache/errors.hpp"

namespace toolcache {

std::string_view to_string(RequestType t) {
    return t == RequestType::Command ? "COMMAND" : "INFORMATIONAL";
}

RequestType request_type_from_string(std::string_view s) {
    if (s == "INFORMATIONAL") return RequestType::Informational;
    if (s == "COMMAND") return RequestType::Command;
    throw ConfigError("unknown request_type: " + std::string(s));
}

std::string_view to_string(EvictionMode m) {
    return m == EvictionMode::Lru ? "lru" : "value_lru";
}

EvictionMode eviction_mode_from_string(std::string_view s) {
    if (s == "value_lru") return EvictionMode::ValueLru;
    if (s == "lru") return EvictionMode::Lru;
    throw ConfigError("unknown eviction mode: " + std::string(s));
}

namespace {

bool finite_non_negative(double x) { return std::isfinite(x) && x >= 0.0; }

}  // namespace

void validate_request(const ToolCallRequest& r) {
    if (r.tool_name.empty()) throw MalformedRequest("tool_name");
    if (!finite_non_negative(r.true_latency_ms)) throw MalformedRequest("true_latency_ms");
    if (!finite_non_negative(r.true_cost_units)) throw MalformedRequest("true_cost_units");
    if (!finite_non_negative(r.arrival_gap_s)) throw MalformedRequest("arrival_gap_s");
    if (r.annotation) {
        const auto& a = *r.annotation;
        if (!finite_non_negative(a.ttl_seconds)) throw MalformedRequest("ttl_seconds");
        if (a.request_type == RequestType::Command && a.ttl_seconds != 0.0) throw MalformedRequest("ttl_seconds");
    }
}

void validate_trace(const std::vector<ToolCallRequest>& trace) {
    for (std::size_t i = 0; i < trace.size(); ++i) {
        validate_request(trace[i]);
        if (i > 0 && trace[i].seq <= trace[i - 1].seq) throw MalformedRequest("seq");
    }
}

void validate_config(const PolicyConfig& c) {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw ConfigError(std::string("invalid policy config: ") + what);
    };
    require(c.lambda1 >= 0 && c.lambda2 >= 0 && c.lambda3 >= 0, "weights must be >= 0");
    require(c.tau_s > 0 && c.tau_floor_s > 0, "tau must be > 0");
    require(c.split_max_hit_ratio >= 0 && c.split_max_hit_ratio <= 1, "hit ratio threshold outside [0,1]");
    require(c.regroup_interval >= 1, "regroup interval must be >= 1");
    require(c.exploration >= 0, "exploration must be >= 0");
    require(c.admit_fraction > 0 && c.admit_fraction <= 1, "admit fraction outside (0,1]");
    require(c.epsilon > 0 && c.epsilon <= 0.1, "epsilon outside (0,0.1]");
    require(c.delta1 > 0 && c.delta2 > 0 && c.delta3 > 0 && c.delta5 > 0, "deltas must be > 0");
    // log(C + delta4) >= 1 for every C >= 0.
    require(c.delta4 >= std::exp(1.0) - 1e-12, "delta4 must be >= e");
    require(c.capacity >= 1, "capacity must be >= 1");
    require(c.recency_candidate_fraction > 0 && c.recency_candidate_fraction <= 1,
            "recency candidate fraction outside (0,1]");
    require(c.max_group_level >= 1 && c.max_group_level <= 3, "max group level outside [1,3]");
}

void to_json(nlohmann::json& j, const SemanticFeatures& f) {
    j = nlohmann::json{{"request_type", to_string(f.request_type)}, {"ttl_s", f.ttl_seconds}};
    if (f.parameter_category) j["param_category"] = *f.parameter_category;
}

void from_json(const nlohmann::json& j, SemanticFeatures& f) {
    f.request_type = request_type_from_string(j.at("request_type").get<std::string>());
    f.ttl_seconds = j.at("ttl_s").get<double>();
    if (auto it = j.find("param_category"); it != j.end() && !it->is_null())
        f.parameter_category = it->get<std::string>();
    else
        f.parameter_category.reset();
}

void to_json(nlohmann::json& j, const SystemFeatures& f) {
    j = nlohmann::json{{"associated_users", f.associated_users},
                       {"access_count", f.access_count},
                       {"result_size_bytes", f.result_size_bytes},
                       {"system_latency_ms", f.system_latency_ms},
                       {"resource_cost_units", f.resource_cost_units}};
}

void from_json(const nlohmann::json& j, SystemFeatures& f) {
    f.associated_users = j.at("associated_users").get<std::set<std::string>>();
    f.access_count = j.at("access_count").get<std::uint64_t>();
    f.result_size_bytes = j.at("result_size_bytes").get<std::uint64_t>();
    f.system_latency_ms = j.at("system_latency_ms").get<double>();
    f.resource_cost_units = j.at("resource_cost_units").get<double>();
}

void to_json(nlohmann::json& j, const GroupNode& g) {
    j = nlohmann::json{{"path", g.path},
                       {"level", g.level},
                       {"access_count", g.access_count},
                       {"hit_count", g.hit_count},
                       {"admitted_count", g.admitted_count},
                       {"selection_count", g.selection_count},
                       {"value_sum", g.value_sum},
                       {"member_count", g.member_count},
                       {"absorbs", g.absorbs},
                       {"children", g.children}};
}

void from_json(const nlohmann::json& j, GroupNode& g) {
    g.path = j.at("path").get<std::vector<std::string>>();
    g.level = j.at("level").get<int>();
    g.access_count = j.at("access_count").get<std::uint64_t>();
    g.hit_count = j.at("hit_count").get<std::uint64_t>();
    g.admitted_count = j.at("admitted_count").get<std::uint64_t>();
    g.selection_count = j.at("selection_count").get<std::uint64_t>();
    g.value_sum = j.at("value_sum").get<double>();
    g.member_count = j.at("member_count").get<std::uint64_t>();
    g.absorbs = j.at("absorbs").get<bool>();
    g.children = j.at("children").get<std::vector<GroupNode>>();
}

void to_json(nlohmann::json& j, const PolicyConfig& c) {
    j = nlohmann::json{{"lambda1", c.lambda1},
                       {"lambda2", c.lambda2},
                       {"lambda3", c.lambda3},
                       {"tau_s", c.tau_s},
                       {"tau_floor_s", c.tau_floor_s},
                       {"adaptive_tau", c.adaptive_tau},
                       {"split_min_access", c.split_min_access},
                       {"split_max_hit_ratio", c.split_max_hit_ratio},
                       {"min_group_size", c.min_group_size},
                       {"regroup_interval", c.regroup_interval},
                       {"exploration", c.exploration},
                       {"admit_fraction", c.admit_fraction},
                       {"delta1", c.delta1},
                       {"delta2", c.delta2},
                       {"delta3", c.delta3},
                       {"delta4", c.delta4},
                       {"delta5", c.delta5},
                       {"epsilon", c.epsilon},
                       {"capacity", c.capacity},
                       {"recency_candidate_fraction", c.recency_candidate_fraction},
                       {"max_group_level", c.max_group_level},
                       {"value_reward", c.value_reward},
                       {"admit_when_free", c.admit_when_free},
                       {"eviction", to_string(c.eviction)}};
}

void from_json(const nlohmann::json& j, PolicyConfig& c) {
    c.lambda1 = j.at("lambda1").get<double>();
    c.lambda2 = j.at("lambda2").get<double>();
    c.lambda3 = j.at("lambda3").get<double>();
    c.tau_s = j.at("tau_s").get<double>();
    c.tau_floor_s = j.at("tau_floor_s").get<double>();
    c.adaptive_tau = j.at("adaptive_tau").get<bool>();
    c.split_min_access = j.at("split_min_access").get<std::uint64_t>();
    c.split_max_hit_ratio = j.at("split_max_hit_ratio").get<double>();
    c.min_group_size = j.at("min_group_size").get<std::uint64_t>();
    c.regroup_interval = j.at("regroup_interval").get<std::uint64_t>();
    c.exploration = j.at("exploration").get<double>();
    c.admit_fraction = j.at("admit_fraction").get<double>();
    c.delta1 = j.at("delta1").get<double>();
    c.delta2 = j.at("delta2").get<double>();
    c.delta3 = j.at("delta3").get<double>();
    c.delta4 = j.at("delta4").get<double>();
    c.delta5 = j.at("delta5").get<double>();
    c.epsilon = j.at("epsilon").get<double>();
    c.capacity = j.at("capacity").get<std::uint64_t>();
    c.recency_candidate_fraction = j.at("recency_candidate_fraction").get<double>();
    c.max_group_level = j.at("max_group_level").get<int>();
    c.value_reward = j.at("value_reward").get<bool>();
    c.admit_when_free = j.value("admit_when_free", true);
    c.eviction = eviction_mode_from_string(j.at("eviction").get<std::string>());
}

PolicyConfig apply_overrides(PolicyConfig base, const nlohmann::json& overrides) {
    if (overrides.is_null()) return base;
    if (!overrides.is_object()) throw ConfigError("policy overrides must be a JSON object");
    nlohmann::json merged = base;
    for (const auto& [k, v] : overrides.items()) {
        if (!merged.contains(k)) throw ConfigError("unknown policy config key: " + k);
        merged[k] = v;
    }
    try {
        return merged.get<PolicyConfig>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad policy config value: ") + e.what());
    }
}

nlohmann::ordered_json request_to_record(const ToolCallRequest& r) {
    nlohmann::ordered_json j;
    j["seq"] = r.seq;
    j["user"] = r.user_id;
    j["tool"] = r.tool_name;
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    for (const auto& p : r.params) params[p.name] = p.value;
    j["params"] = std::move(params);
    j["latency_ms"] = r.true_latency_ms;
    j["cost"] = r.true_cost_units;
    j["size_bytes"] = r.true_size_bytes;
    if (r.arrival_gap_s != 1.0) j["dt_s"] = r.arrival_gap_s;
    if (!r.result_payload.empty()) j["payload"] = r.result_payload;
    if (r.annotation) {
        j["request_type"] = to_string(r.annotation->request_type);
        j["ttl_s"] = r.annotation->ttl_seconds;
        if (r.annotation->parameter_category) j["param_category"] = *r.annotation->parameter_category;
    }
    return j;
}

ToolCallRequest request_from_record(const nlohmann::ordered_json& j) {
    ToolCallRequest r;
    r.seq = j.at("seq").get<std::uint64_t>();
    r.user_id = j.at("user").get<std::string>();
    r.tool_name = j.at("tool").get<std::string>();
    const auto& params = j.at("params");
    if (!params.is_object()) throw MalformedRequest("params");
    for (const auto& [k, v] : params.items()) r.params.push_back({k, v});
    r.true_latency_ms = j.at("latency_ms").get<double>();
    r.true_cost_units = j.at("cost").get<double>();
    const auto& size = j.at("size_bytes");
    if (!size.is_number_unsigned() && !(size.is_number_integer() && size.get<std::int64_t>() >= 0))
        throw MalformedRequest("true_size_bytes");
    r.true_size_bytes = size.get<std::uint64_t>();
    if (auto it = j.find("dt_s"); it != j.end()) r.arrival_gap_s = it->get<double>();
    if (auto it = j.find("payload"); it != j.end()) r.result_payload = it->get<std::string>();
    // request_type and ttl_s must travel together; param_category is optional.
    const bool has_type = j.contains("request_type");
    const bool has_ttl = j.contains("ttl_s");
    if (has_type != has_ttl) throw MalformedRequest(has_type ? "ttl_s" : "request_type");
    if (has_type) {
        SemanticFeatures f;
        f.request_type = request_type_from_string(j.at("request_type").get<std::string>());
        f.ttl_seconds = j.at("ttl_s").get<double>();
        if (auto it = j.find("param_category"); it != j.end() && !it->is_null())
            f.parameter_category = it->get<std::string>();
        r.annotation = std::move(f);
    }
    return r;
}

}  // namespace toolcache
