#include "toolcache/simulator.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <unordered_set>

#include <omp.h>

#include "toolcache/errors.hpp"
#include "toolcache/keying.hpp"
#include "toolcache/policy.hpp"

namespace toolcache {

bool CellMetrics::same_result(const CellMetrics& o) const {
    return policy == o.policy && cache_fraction == o.cache_fraction && capacity == o.capacity &&
           requests == o.requests && hits == o.hits && hit_ratio == o.hit_ratio &&
           total_latency_ms == o.total_latency_ms && total_cost == o.total_cost && total_bytes == o.total_bytes &&
           evictions == o.evictions && expirations == o.expirations && admissions == o.admissions &&
           rejections == o.rejections;
}

void validate_sweep(const SweepSpec& spec) {
    if (spec.policies.empty()) throw ConfigError("sweep needs at least one policy");
    for (const auto& p : spec.policies) {
        if (!is_known_policy(p)) throw ConfigError("unknown policy: " + p);
    }
    if (spec.cache_fractions.empty()) throw ConfigError("sweep needs at least one cache fraction");
    for (double f : spec.cache_fractions) {
        if (!(f > 0.0 && f <= 1.0)) throw ConfigError("cache fraction outside (0, 1]: " + std::to_string(f));
    }
}

std::uint64_t count_unique_cacheable(const Trace& trace, Annotator& annotator) {
    std::unordered_set<CacheKey> keys;
    for (const auto& r : trace) {
        if (is_cacheable(annotator.annotate(r))) keys.insert(make_key(r));
    }
    return keys.size();
}

std::uint64_t capacity_for(double fraction, std::uint64_t unique_cacheable) {
    const double raw = std::ceil(fraction * static_cast<double>(unique_cacheable) - 1e-9);
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::max(raw, 0.0)));
}

CellMetrics run_cell(const Trace& trace, const std::string& policy, std::uint64_t capacity, const PolicyConfig& cfg,
                     std::shared_ptr<Annotator> annotator) {
    if (capacity < 1) throw ConfigError("capacity must be >= 1");
    PolicyConfig cell_cfg = cfg;
    cell_cfg.capacity = capacity;
    const auto start = std::chrono::steady_clock::now();
    CacheEngine engine(cell_cfg, make_policy(policy, cell_cfg), std::move(annotator));
    for (const auto& r : trace) engine.process(r);
    const auto stats = engine.stats_snapshot();

    CellMetrics m;
    m.policy = policy;
    m.capacity = capacity;
    m.requests = stats.requests;
    m.hits = stats.hits;
    m.hit_ratio = stats.hit_ratio;
    m.total_latency_ms = stats.total_latency_ms;
    m.total_cost = stats.total_cost;
    m.total_bytes = stats.total_bytes;
    m.evictions = stats.evictions;
    m.expirations = stats.expirations;
    m.admissions = stats.admissions;
    m.rejections = stats.rejections;
    m.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return m;
}

std::vector<RequestOutcome> replay(const Trace& trace, const std::string& policy, const PolicyConfig& cfg,
                                   std::shared_ptr<Annotator> annotator) {
    CacheEngine engine(cfg, make_policy(policy, cfg), std::move(annotator));
    std::vector<RequestOutcome> out;
    out.reserve(trace.size());
    for (const auto& r : trace) out.push_back(engine.process(r));
    return out;
}

namespace {

struct CellTask {
    std::string policy;
    double fraction;
};

std::vector<CellTask> plan(const SweepSpec& spec) {
    std::vector<CellTask> tasks;
    for (const auto& p : spec.policies) {
        for (double f : spec.cache_fractions) tasks.push_back({p, f});
    }
    return tasks;
}

SimulationReport prepare(const Trace& trace, const SweepSpec& spec, Annotator& annotator) {
    validate_sweep(spec);
    SimulationReport report;
    report.config = apply_overrides(PolicyConfig{}, spec.overrides);
    validate_config(report.config);
    report.seed = spec.seed;
    report.trace_requests = trace.size();
    report.unique_cacheable_keys = count_unique_cacheable(trace, annotator);
    return report;
}

CellMetrics run_task(const Trace& trace, const CellTask& task, const SimulationReport& report,
                     const std::shared_ptr<Annotator>& annotator) {
    try {
        CellMetrics m = run_cell(trace, task.policy, capacity_for(task.fraction, report.unique_cacheable_keys),
                                 report.config, annotator);
        m.cache_fraction = task.fraction;
        return m;
    } catch (const Error&) {
        // The original exception stays reachable through std::rethrow_if_nested.
        std::throw_with_nested(Error("cell (" + task.policy + ", " + std::to_string(task.fraction) + ")"));
    }
}

}  // namespace

SimulationReport run_sweep_serial(const Trace& trace, const SweepSpec& spec, std::shared_ptr<Annotator> annotator) {
    SimulationReport report = prepare(trace, spec, *annotator);
    for (const auto& task : plan(spec)) report.cells.push_back(run_task(trace, task, report, annotator));
    return report;
}

SimulationReport run_sweep(const Trace& trace, const SweepSpec& spec, std::shared_ptr<Annotator> annotator) {
    SimulationReport report = prepare(trace, spec, *annotator);
    const auto tasks = plan(spec);
    std::vector<CellMetrics> cells(tasks.size());
    std::vector<std::exception_ptr> errors(tasks.size());
    const int threads = spec.threads > 0 ? spec.threads : omp_get_max_threads();
    const auto n = static_cast<std::ptrdiff_t>(tasks.size());

#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            cells[static_cast<std::size_t>(i)] = run_task(trace, tasks[static_cast<std::size_t>(i)], report, annotator);
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }

    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    report.cells = std::move(cells);
    return report;
}

std::vector<GroupingComparisonRow> compare_grouping(const Trace& trace, const std::vector<double>& fractions,
                                                    const PolicyConfig& cfg, std::shared_ptr<Annotator> annotator) {
    const std::uint64_t unique = count_unique_cacheable(trace, *annotator);
    PolicyConfig with_user = cfg;
    with_user.max_group_level = 3;
    PolicyConfig without_user = cfg;
    without_user.max_group_level = 2;

    std::vector<GroupingComparisonRow> rows(fractions.size());
    std::vector<std::exception_ptr> errors(fractions.size());
    const auto n = static_cast<std::ptrdiff_t>(fractions.size());

#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        try {
            const double f = fractions[idx];
            if (!(f > 0.0 && f <= 1.0)) throw ConfigError("cache fraction outside (0, 1]");
            GroupingComparisonRow row;
            row.cache_fraction = f;
            row.capacity = capacity_for(f, unique);
            const auto a = run_cell(trace, "vaac", row.capacity, with_user, annotator);
            const auto b = run_cell(trace, "vaac", row.capacity, without_user, annotator);
            const double denom = static_cast<double>(std::max<std::size_t>(trace.size(), 1));
            row.with_user_hit_ratio = a.hit_ratio;
            row.with_user_mean_latency_ms = a.total_latency_ms / denom;
            row.without_user_hit_ratio = b.hit_ratio;
            row.without_user_mean_latency_ms = b.total_latency_ms / denom;
            rows[idx] = row;
        } catch (...) {
            errors[idx] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return rows;
}

}  // namespace toolcache
