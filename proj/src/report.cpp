#include "toolcache/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include "toolcache/errors.hpp"

namespace toolcache {

using nlohmann::ordered_json;

namespace {

ordered_json cell_to_json(const CellMetrics& c, RenderOptions opts) {
    ordered_json j;
    j["policy"] = c.policy;
    j["cache_fraction"] = c.cache_fraction;
    j["capacity"] = c.capacity;
    j["requests"] = c.requests;
    j["hits"] = c.hits;
    j["hit_ratio"] = c.hit_ratio;
    j["total_latency_ms"] = c.total_latency_ms;
    j["total_cost"] = c.total_cost;
    j["total_bytes"] = c.total_bytes;
    j["evictions"] = c.evictions;
    j["expirations"] = c.expirations;
    j["admissions"] = c.admissions;
    j["rejections"] = c.rejections;
    if (opts.include_timing) j["runtime_ms"] = c.runtime_ms;
    return j;
}

CellMetrics cell_from_json(const nlohmann::json& j) {
    CellMetrics c;
    c.policy = j.at("policy").get<std::string>();
    c.cache_fraction = j.at("cache_fraction").get<double>();
    c.capacity = j.at("capacity").get<std::uint64_t>();
    c.requests = j.at("requests").get<std::uint64_t>();
    c.hits = j.at("hits").get<std::uint64_t>();
    c.hit_ratio = j.at("hit_ratio").get<double>();
    c.total_latency_ms = j.at("total_latency_ms").get<double>();
    c.total_cost = j.at("total_cost").get<double>();
    c.total_bytes = j.at("total_bytes").get<std::uint64_t>();
    c.evictions = j.at("evictions").get<std::uint64_t>();
    c.expirations = j.at("expirations").get<std::uint64_t>();
    c.admissions = j.value("admissions", std::uint64_t{0});
    c.rejections = j.value("rejections", std::uint64_t{0});
    c.runtime_ms = j.value("runtime_ms", 0.0);
    return c;
}

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

}  // namespace

ordered_json report_to_json(const SimulationReport& r, RenderOptions opts) {
    ordered_json j;
    j["seed"] = r.seed;
    j["trace_requests"] = r.trace_requests;
    j["unique_cacheable_keys"] = r.unique_cacheable_keys;
    nlohmann::json cfg = r.config;
    j["config"] = ordered_json::parse(cfg.dump());
    ordered_json cells = ordered_json::array();
    for (const auto& c : r.cells) cells.push_back(cell_to_json(c, opts));
    j["cells"] = std::move(cells);
    return j;
}

SimulationReport report_from_json(const nlohmann::json& j) {
    try {
        SimulationReport r;
        r.seed = j.at("seed").get<std::uint64_t>();
        r.trace_requests = j.at("trace_requests").get<std::uint64_t>();
        r.unique_cacheable_keys = j.at("unique_cacheable_keys").get<std::uint64_t>();
        r.config = j.at("config").get<PolicyConfig>();
        for (const auto& c : j.at("cells")) r.cells.push_back(cell_from_json(c));
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed report: ") + e.what());
    }
}

SimulationReport read_report_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open report: " + path);
    try {
        return report_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("report is not JSON: " + path + ": " + e.what());
    }
}

std::string render_csv(const SimulationReport& r) {
    std::string out = "policy,fraction,hit_ratio,total_latency_ms,total_cost,total_bytes\n";
    for (const auto& c : r.cells) {
        out += c.policy + ',' + fmt("%.2f", c.cache_fraction) + ',' + fmt("%.6f", c.hit_ratio) + ',' +
               fmt("%.3f", c.total_latency_ms) + ',' + fmt("%.6f", c.total_cost) + ',' +
               std::to_string(c.total_bytes) + '\n';
    }
    return out;
}

ordered_json plot_data(const SimulationReport& r) {
    std::set<double> fraction_set;
    std::vector<std::string> policies;
    for (const auto& c : r.cells) {
        fraction_set.insert(c.cache_fraction);
        if (std::find(policies.begin(), policies.end(), c.policy) == policies.end()) policies.push_back(c.policy);
    }
    const std::vector<double> fractions(fraction_set.begin(), fraction_set.end());
    std::map<std::pair<std::string, double>, const CellMetrics*> by_cell;
    for (const auto& c : r.cells) by_cell[{c.policy, c.cache_fraction}] = &c;

    const std::vector<std::pair<std::string, double CellMetrics::*>> metrics{
        {"hit_ratio", &CellMetrics::hit_ratio},
        {"total_latency_ms", &CellMetrics::total_latency_ms},
        {"total_cost", &CellMetrics::total_cost},
    };

    ordered_json j;
    j["fractions"] = fractions;
    ordered_json series;
    for (const auto& [name, member] : metrics) {
        ordered_json per_policy;
        for (const auto& p : policies) {
            ordered_json values = ordered_json::array();
            for (double f : fractions) {
                auto it = by_cell.find({p, f});
                if (it == by_cell.end()) {
                    values.push_back(nullptr);
                } else {
                    values.push_back(it->second->*member);
                }
            }
            per_policy[p] = std::move(values);
        }
        series[name] = std::move(per_policy);
    }
    ordered_json bytes;
    for (const auto& p : policies) {
        ordered_json values = ordered_json::array();
        for (double f : fractions) {
            auto it = by_cell.find({p, f});
            if (it == by_cell.end()) {
                values.push_back(nullptr);
            } else {
                values.push_back(it->second->total_bytes);
            }
        }
        bytes[p] = std::move(values);
    }
    series["total_bytes"] = std::move(bytes);
    j["series"] = std::move(series);
    return j;
}

std::string render_report(const SimulationReport& r, std::string_view format, RenderOptions opts) {
    if (format == "json") return report_to_json(r, opts).dump(2) + '\n';
    if (format == "csv") return render_csv(r);
    if (format == "plot") return plot_data(r).dump(2) + '\n';
    throw UnsupportedFormat("unsupported report format: " + std::string(format));
}

ordered_json grouping_to_json(const std::vector<GroupingComparisonRow>& rows) {
    ordered_json arr = ordered_json::array();
    for (const auto& row : rows) {
        ordered_json j;
        j["cache_fraction"] = row.cache_fraction;
        j["capacity"] = row.capacity;
        j["with_user_hit_ratio"] = row.with_user_hit_ratio;
        j["with_user_mean_latency_ms"] = row.with_user_mean_latency_ms;
        j["without_user_hit_ratio"] = row.without_user_hit_ratio;
        j["without_user_mean_latency_ms"] = row.without_user_mean_latency_ms;
        arr.push_back(std::move(j));
    }
    return arr;
}

std::string render_grouping_csv(const std::vector<GroupingComparisonRow>& rows) {
    std::string out =
        "fraction,with_user_hit_ratio,with_user_mean_latency_ms,without_user_hit_ratio,without_user_mean_latency_ms\n";
    for (const auto& row : rows) {
        out += fmt("%.2f", row.cache_fraction) + ',' + fmt("%.6f", row.with_user_hit_ratio) + ',' +
               fmt("%.3f", row.with_user_mean_latency_ms) + ',' + fmt("%.6f", row.without_user_hit_ratio) + ',' +
               fmt("%.3f", row.without_user_mean_latency_ms) + '\n';
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write: " + path);
    out << text;
    if (!out) throw ConfigError("write failed: " + path);
}

}  // namespace toolcache
