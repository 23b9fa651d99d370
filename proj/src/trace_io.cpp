#include "toolcache/trace_io.hpp"

#include <fstream>

#include "toolcache/errors.hpp"

namespace toolcache {

TraceFile read_trace(std::istream& in) {
    TraceFile tf;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::ordered_json j;
        try {
            j = nlohmann::ordered_json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw TraceParseError(lineno, e.what());
        }
        if (j.is_object() && j.contains("trace_header")) {
            if (!tf.requests.empty() || !tf.header.is_null()) throw TraceParseError(lineno, "header must be the first line");
            tf.header = nlohmann::json::parse(j.at("trace_header").dump());
            continue;
        }
        try {
            ToolCallRequest r = request_from_record(j);
            validate_request(r);
            if (!tf.requests.empty() && r.seq <= tf.requests.back().seq)
                throw TraceParseError(lineno, "seq must be strictly increasing");
            tf.requests.push_back(std::move(r));
        } catch (const TraceParseError&) {
            throw;
        } catch (const MalformedRequest& e) {
            throw TraceParseError(lineno, e.what());
        } catch (const nlohmann::json::exception& e) {
            throw TraceParseError(lineno, e.what());
        } catch (const ConfigError& e) {
            throw TraceParseError(lineno, e.what());
        }
    }
    return tf;
}

TraceFile read_trace_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw TraceParseError(0, "cannot open trace: " + path);
    return read_trace(in);
}

void write_trace(std::ostream& out, const Trace& trace, const nlohmann::json& header) {
    if (!header.is_null()) out << nlohmann::json{{"trace_header", header}}.dump() << '\n';
    for (const auto& r : trace) out << request_to_record(r).dump() << '\n';
}

void write_trace_file(const std::string& path, const Trace& trace, const nlohmann::json& header) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write trace: " + path);
    write_trace(out, trace, header);
}

nlohmann::json generator_header(const ToolCatalog& catalog, const WorkloadConfig& cfg) {
    return nlohmann::json{{"generator", "toolcache"}, {"workload", cfg}, {"catalog", catalog}};
}

}  // namespace toolcache
