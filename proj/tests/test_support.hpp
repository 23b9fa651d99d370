#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "toolcache/annotator.hpp"
#include "toolcache/model.hpp"

namespace testing {

using namespace toolcache;

inline SemanticFeatures info(double ttl, std::optional<std::string> category = std::nullopt) {
    SemanticFeatures f;
    f.request_type = RequestType::Informational;
    f.ttl_seconds = ttl;
    f.parameter_category = std::move(category);
    return f;
}

inline SemanticFeatures command() {
    SemanticFeatures f;
    f.request_type = RequestType::Command;
    f.ttl_seconds = 0.0;
    return f;
}

// Pre-annotated request; the category defaults to the first parameter value
// when there are at least two parameters.
inline ToolCallRequest request(std::uint64_t seq, std::string tool, Params params, SemanticFeatures f,
                               std::string user = "u0", double latency_ms = 100.0, double cost = 0.001,
                               std::uint64_t size = 1000) {
    ToolCallRequest r;
    r.seq = seq;
    r.user_id = std::move(user);
    r.tool_name = std::move(tool);
    r.params = std::move(params);
    r.true_latency_ms = latency_ms;
    r.true_cost_units = cost;
    r.true_size_bytes = size;
    r.result_payload = "result";
    if (!f.parameter_category && f.request_type == RequestType::Informational && r.params.size() >= 2 &&
        r.params.front().value.is_string())
        f.parameter_category = r.params.front().value.get<std::string>();
    r.annotation = f;
    return r;
}

// Cacheable single-key request "lookup:{id=<id>}" with a one-hour TTL.
inline ToolCallRequest keyed(std::uint64_t seq, std::uint64_t id, double ttl = 3600.0) {
    return request(seq, "lookup", {{"id", ParamValue(id)}}, info(ttl));
}

inline std::uint64_t draw(std::mt19937_64& rng, std::uint64_t n) { return rng() % n; }

inline double draw_unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace testing
