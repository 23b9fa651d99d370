#pragma once

#include <istream>
#include <ostream>
#include <string>

#include "json.hpp"
#include "toolcache/workload.hpp"

namespace toolcache {

// JSON Lines trace. An optional first line {"trace_header": {...}} carries the
// generator configuration; every other line is one request record.
struct TraceFile {
    nlohmann::json header;  // null when absent
    Trace requests;
};

// Throws TraceParseError with the 1-based line number of the bad record.
TraceFile read_trace(std::istream& in);
TraceFile read_trace_file(const std::string& path);

void write_trace(std::ostream& out, const Trace& trace, const nlohmann::json& header = nullptr);
void write_trace_file(const std::string& path, const Trace& trace, const nlohmann::json& header = nullptr);

// Header recording how a synthetic trace was produced.
nlohmann::json generator_header(const ToolCatalog& catalog, const WorkloadConfig& cfg);

}  // namespace toolcache
