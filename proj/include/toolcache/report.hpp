#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "toolcache/simulator.hpp"

namespace toolcache {

// Cell runtimes vary between runs, so they are left out unless asked for.
struct RenderOptions {
    bool include_timing = false;
};

nlohmann::ordered_json report_to_json(const SimulationReport& r, RenderOptions opts = {});
SimulationReport report_from_json(const nlohmann::json& j);
SimulationReport read_report_file(const std::string& path);

// Columns: policy,fraction,hit_ratio,total_latency_ms,total_cost,total_bytes.
std::string render_csv(const SimulationReport& r);

// {"fractions": [...], "series": {metric: {policy: [value per fraction]}}}.
nlohmann::ordered_json plot_data(const SimulationReport& r);

// format is "json", "csv" or "plot"; anything else throws UnsupportedFormat.
std::string render_report(const SimulationReport& r, std::string_view format, RenderOptions opts = {});

nlohmann::ordered_json grouping_to_json(const std::vector<GroupingComparisonRow>& rows);
std::string render_grouping_csv(const std::vector<GroupingComparisonRow>& rows);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace toolcache
