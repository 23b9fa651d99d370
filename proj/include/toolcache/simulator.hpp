#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "toolcache/annotator.hpp"
#include "toolcache/engine.hpp"
#include "toolcache/model.hpp"
#include "toolcache/workload.hpp"

namespace toolcache {

struct CellMetrics {
    std::string policy;
    double cache_fraction = 0.0;
    std::uint64_t capacity = 0;
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
    double runtime_ms = 0.0;  // wall clock; not part of the deterministic report

    // Everything except runtime_ms.
    bool same_result(const CellMetrics& o) const;
};

struct SweepSpec {
    std::string trace_path;
    std::vector<std::string> policies{"vaac", "caca", "lru"};
    std::vector<double> cache_fractions{0.10, 0.20, 0.35, 0.50, 0.90};
    nlohmann::json overrides;  // PolicyConfig keys
    std::string output_path;
    std::uint64_t seed = 0;
    int threads = 0;  // 0: all available cores
};

struct SimulationReport {
    std::vector<CellMetrics> cells;
    PolicyConfig config;
    std::uint64_t seed = 0;
    std::uint64_t trace_requests = 0;
    std::uint64_t unique_cacheable_keys = 0;
};

// Throws ConfigError for an unknown policy or a fraction outside (0, 1].
void validate_sweep(const SweepSpec& spec);

std::uint64_t count_unique_cacheable(const Trace& trace, Annotator& annotator);

// max(1, ceil(fraction * unique_cacheable)).
std::uint64_t capacity_for(double fraction, std::uint64_t unique_cacheable);

// Fresh engine and policy; requests fed in order.
CellMetrics run_cell(const Trace& trace, const std::string& policy, std::uint64_t capacity, const PolicyConfig& cfg,
                     std::shared_ptr<Annotator> annotator);

// Per-request outcomes of one cell, for decision-level comparisons.
std::vector<RequestOutcome> replay(const Trace& trace, const std::string& policy, const PolicyConfig& cfg,
                                   std::shared_ptr<Annotator> annotator);

// Every (policy, fraction) cell. Cells run on OpenMP worker threads; the
// report lists them in (policy, fraction) order of `spec` regardless of
// completion order.
SimulationReport run_sweep(const Trace& trace, const SweepSpec& spec, std::shared_ptr<Annotator> annotator);

// Single-threaded reference for run_sweep.
SimulationReport run_sweep_serial(const Trace& trace, const SweepSpec& spec, std::shared_ptr<Annotator> annotator);

struct GroupingComparisonRow {
    double cache_fraction = 0.0;
    std::uint64_t capacity = 0;
    double with_user_hit_ratio = 0.0;
    double with_user_mean_latency_ms = 0.0;
    double without_user_hit_ratio = 0.0;
    double without_user_mean_latency_ms = 0.0;
};

// VAAC with the full three-level tree vs the tree capped at the parameter
// category level.
std::vector<GroupingComparisonRow> compare_grouping(const Trace& trace, const std::vector<double>& fractions,
                                                    const PolicyConfig& cfg, std::shared_ptr<Annotator> annotator);

}  // namespace toolcache
