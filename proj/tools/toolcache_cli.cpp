// toolcache: trace generation, cache simulation and report rendering.
//
//   toolcache generate --distribution zipf --out trace.jsonl
//   toolcache sweep --trace trace.jsonl --out report.json
//   toolcache report --in report.json --format csv
//
// Exit codes: 0 ok, 2 configuration error, 3 trace error, 4 remote annotator
// failure with no fallback.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "toolcache/annotator.hpp"
#include "toolcache/errors.hpp"
#include "toolcache/model.hpp"
#include "toolcache/report.hpp"
#include "toolcache/simulator.hpp"
#include "toolcache/trace_io.hpp"
#include "toolcache/workload.hpp"

using namespace toolcache;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kConfig = 2, kTrace = 3, kRemote = 4 };

struct Globals {
    std::optional<std::uint64_t> seed;
    std::string config_path;
    std::string out;
};

// Config file layout (every section optional):
//   {"seed": 7, "catalog": "catalog.json" | [...], "workload": {...},
//    "policy": {...}, "sweep": {"policies": [...], "fractions": [...], "threads": 4},
//    "annotator": {"mode": "trace" | "static" | "remote", "manifest": "m.json",
//                  "fallback": true, "remote": {...}}}
json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path);
    try {
        json j = json::parse(in);
        if (!j.is_object()) throw ConfigError("config must be a JSON object: " + path);
        return j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config is not JSON: " + path + ": " + e.what());
    }
}

// Seed the trace was generated with, when its header records one.
std::uint64_t header_seed(const json& header) {
    if (header.is_object() && header.contains("workload") && header.at("workload").contains("seed"))
        return header.at("workload").at("seed").get<std::uint64_t>();
    return 0;
}

std::uint64_t effective_seed(const Globals& g, const json& cfg, std::uint64_t fallback) {
    if (g.seed) return *g.seed;
    if (cfg.contains("seed")) return cfg.at("seed").get<std::uint64_t>();
    return fallback;
}

ToolCatalog catalog_from(const json& cfg) {
    if (!cfg.contains("catalog")) return default_catalog();
    const json& c = cfg.at("catalog");
    if (c.is_string()) return load_catalog(c.get<std::string>());
    ToolCatalog cat = c.get<ToolCatalog>();
    validate_catalog(cat);
    return cat;
}

PolicyConfig policy_from(const json& cfg) {
    PolicyConfig p = apply_overrides(PolicyConfig{}, cfg.value("policy", json::object()));
    validate_config(p);
    return p;
}

// Manifest precedence: explicit file, catalog in the trace header, config catalog.
ToolManifest manifest_from(const json& cfg, const std::string& manifest_path, const json& header) {
    if (!manifest_path.empty()) return ToolManifest::load(manifest_path);
    const json ann = cfg.value("annotator", json::object());
    if (ann.contains("manifest")) return ToolManifest::load(ann.at("manifest").get<std::string>());
    if (header.is_object() && header.contains("catalog")) {
        ToolCatalog cat = header.at("catalog").get<ToolCatalog>();
        validate_catalog(cat);
        return manifest_for(cat);
    }
    return manifest_for(catalog_from(cfg));
}

std::shared_ptr<Annotator> annotator_from(const json& cfg, const ToolManifest& manifest, const std::string& mode_flag,
                                          bool no_fallback) {
    const json ann = cfg.value("annotator", json::object());
    const std::string mode = !mode_flag.empty() ? mode_flag : ann.value("mode", std::string("trace"));
    const bool fallback = !no_fallback && ann.value("fallback", true);
    if (mode == "trace") return std::make_shared<TraceAnnotator>(manifest);
    if (mode == "static") return std::make_shared<StaticAnnotator>(manifest);
    if (mode == "remote") {
        if (!ann.contains("remote")) throw ConfigError("remote annotator needs an \"annotator.remote\" section");
        RemoteConfig rc = RemoteConfig::from_json(ann.at("remote"));
        return std::make_shared<RemoteAnnotator>(rc, fallback ? std::optional<ToolManifest>(manifest) : std::nullopt);
    }
    throw ConfigError("unknown annotator mode: " + mode);
}

void emit(const Globals& g, const std::string& text) {
    if (g.out.empty() || g.out == "-") {
        std::cout << text;
    } else {
        write_text_file(g.out, text);
    }
}

std::vector<double> parse_fractions(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("bad cache fraction: " + item);
        }
    }
    return out;
}

std::vector<std::string> split(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

// Walks nested exceptions and returns the exit code of the innermost
// recognized error, printing the chain.
int classify(const std::exception& e, std::string& message) {
    message += e.what();
    int code = kConfig;
    if (dynamic_cast<const TraceParseError*>(&e) || dynamic_cast<const MalformedRequest*>(&e) ||
        dynamic_cast<const UnsupportedValue*>(&e) || dynamic_cast<const NonFiniteFeature*>(&e)) {
        code = kTrace;
    } else if (dynamic_cast<const EndpointUnavailable*>(&e) || dynamic_cast<const MalformedLLMResponse*>(&e)) {
        code = kRemote;
    }
    try {
        std::rethrow_if_nested(e);
    } catch (const std::exception& inner) {
        message += ": ";
        return classify(inner, message);
    }
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Value-aware caching of tool-call results: workloads, simulation, reports"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--seed", g.seed, "RNG seed (overrides the config file)");
    app.add_option("--config", g.config_path, "JSON config file");
    app.add_option("--out", g.out, "Output path (default stdout)");

    // generate
    auto* gen = app.add_subcommand("generate", "Synthesize a trace from the tool catalog");
    std::string distribution;
    std::optional<std::uint64_t> n_requests, n_users, n_phases;
    std::optional<double> alpha, overlap;
    gen->add_option("--distribution", distribution, "zipf | hotspot | uniform | multiuser");
    gen->add_option("--requests", n_requests);
    gen->add_option("--alpha", alpha, "Zipf exponent");
    gen->add_option("--users", n_users);
    gen->add_option("--overlap", overlap, "Shared fraction of each user's interests");
    gen->add_option("--phases", n_phases, "Hotspot phases");

    // shared by run / sweep / compare-grouping / annotate
    std::string trace_path, manifest_path, annotator_mode;
    bool no_fallback = false;
    auto add_trace_opts = [&](CLI::App* sub) {
        sub->add_option("--trace", trace_path, "JSONL trace")->required();
        sub->add_option("--manifest", manifest_path, "Tool manifest for records without annotations");
        sub->add_option("--annotator", annotator_mode, "trace | static | remote");
        sub->add_flag("--no-fallback", no_fallback, "Fail instead of using the manifest when the remote annotator fails");
    };

    auto* run = app.add_subcommand("run", "Simulate one (policy, cache size) cell");
    add_trace_opts(run);
    std::string policy = "vaac";
    std::optional<double> fraction;
    std::optional<std::uint64_t> capacity;
    run->add_option("--policy", policy, "vaac | caca | lru");
    auto* frac_opt = run->add_option("--fraction", fraction, "Capacity as a fraction of unique cacheable keys");
    run->add_option("--capacity", capacity, "Absolute capacity")->excludes(frac_opt);

    auto* sweep = app.add_subcommand("sweep", "Every policy at every cache fraction");
    add_trace_opts(sweep);
    std::string policies_csv, fractions_csv, format = "json";
    int threads = -1;
    bool timing = false;
    sweep->add_option("--policies", policies_csv, "Comma-separated policy names");
    sweep->add_option("--fractions", fractions_csv, "Comma-separated cache fractions");
    sweep->add_option("--threads", threads, "Worker threads (0: all cores)");
    sweep->add_option("--format", format, "json | csv | plot");
    sweep->add_flag("--timing", timing, "Include per-cell wall-clock runtime in JSON");

    auto* cmp = app.add_subcommand("compare-grouping", "VAAC with and without the user grouping level");
    add_trace_opts(cmp);
    std::string cmp_fractions = "0.10,0.20,0.30";
    std::string cmp_format = "json";
    cmp->add_option("--fractions", cmp_fractions);
    cmp->add_option("--format", cmp_format, "json | csv");

    auto* ann = app.add_subcommand("annotate", "Attach semantic features to every record of a trace");
    add_trace_opts(ann);

    auto* rep = app.add_subcommand("report", "Re-render a saved sweep report");
    std::string report_in, report_format = "csv";
    rep->add_option("--in", report_in, "Report JSON")->required();
    rep->add_option("--format", report_format, "json | csv | plot");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    try {
        const json cfg = load_config(g.config_path);

        if (*gen) {
            const ToolCatalog catalog = catalog_from(cfg);
            WorkloadConfig wc = cfg.value("workload", json::object()).get<WorkloadConfig>();
            wc.seed = effective_seed(g, cfg, wc.seed);
            if (!distribution.empty()) wc.distribution = distribution_from_string(distribution);
            if (n_requests) wc.n_requests = *n_requests;
            if (alpha) wc.zipf_alpha = *alpha;
            if (n_users) wc.n_users = *n_users;
            if (overlap) wc.user_overlap = *overlap;
            if (n_phases) wc.n_phases = *n_phases;
            std::ostringstream os;
            write_trace(os, generate(catalog, wc), generator_header(catalog, wc));
            emit(g, os.str());
            return kOk;
        }

        if (*rep) {
            const SimulationReport r = read_report_file(report_in);
            emit(g, render_report(r, report_format, RenderOptions{true}));
            return kOk;
        }

        const TraceFile tf = read_trace_file(trace_path);
        const ToolManifest manifest = manifest_from(cfg, manifest_path, tf.header);
        if (*ann && annotator_mode.empty()) {
            // Re-annotation ignores features already in the trace.
            annotator_mode = cfg.value("annotator", json::object()).value("mode", std::string("static"));
            if (annotator_mode == "trace") annotator_mode = "static";
        }
        auto annotator = annotator_from(cfg, manifest, annotator_mode, no_fallback);
        const PolicyConfig pc = policy_from(cfg);

        if (*run) {
            if (!is_known_policy(policy)) throw ConfigError("unknown policy: " + policy);
            std::uint64_t cap = 0;
            double frac = 0.0;
            if (capacity) {
                cap = *capacity;
            } else {
                frac = fraction.value_or(0.10);
                if (!(frac > 0.0 && frac <= 1.0)) throw ConfigError("cache fraction outside (0, 1]");
                cap = capacity_for(frac, count_unique_cacheable(tf.requests, *annotator));
            }
            CellMetrics m = run_cell(tf.requests, policy, cap, pc, annotator);
            m.cache_fraction = frac;
            SimulationReport r;
            r.cells.push_back(m);
            r.config = pc;
            r.seed = effective_seed(g, cfg, header_seed(tf.header));
            r.trace_requests = tf.requests.size();
            r.unique_cacheable_keys = count_unique_cacheable(tf.requests, *annotator);
            emit(g, render_report(r, "json"));
            return kOk;
        }

        if (*sweep) {
            SweepSpec spec;
            spec.trace_path = trace_path;
            spec.output_path = g.out;
            spec.overrides = cfg.value("policy", json::object());
            spec.seed = effective_seed(g, cfg, header_seed(tf.header));
            const json sw = cfg.value("sweep", json::object());
            if (sw.contains("policies")) spec.policies = sw.at("policies").get<std::vector<std::string>>();
            if (sw.contains("fractions")) spec.cache_fractions = sw.at("fractions").get<std::vector<double>>();
            spec.threads = sw.value("threads", 0);
            if (!policies_csv.empty()) spec.policies = split(policies_csv);
            if (!fractions_csv.empty()) spec.cache_fractions = parse_fractions(fractions_csv);
            if (threads >= 0) spec.threads = threads;
            validate_sweep(spec);
            const SimulationReport r = run_sweep(tf.requests, spec, annotator);
            emit(g, render_report(r, format, RenderOptions{timing}));
            return kOk;
        }

        if (*cmp) {
            const auto rows = compare_grouping(tf.requests, parse_fractions(cmp_fractions), pc, annotator);
            if (cmp_format == "json") {
                emit(g, grouping_to_json(rows).dump(2) + '\n');
            } else if (cmp_format == "csv") {
                emit(g, render_grouping_csv(rows));
            } else {
                throw UnsupportedFormat("unsupported format: " + cmp_format);
            }
            return kOk;
        }

        if (*ann) {
            Trace out = tf.requests;
            for (auto& r : out) {
                r.annotation.reset();
                const SemanticFeatures f = annotator->annotate(r);
                r.annotation = f;
            }
            std::ostringstream os;
            write_trace(os, out, tf.header);
            emit(g, os.str());
            if (auto* remote = dynamic_cast<RemoteAnnotator*>(annotator.get())) {
                std::cerr << "remote calls: " << remote->remote_calls() << ", fallbacks: " << remote->fallbacks()
                          << '\n';
            }
            return kOk;
        }
    } catch (const std::exception& e) {
        std::string message;
        const int code = classify(e, message);
        std::cerr << "toolcache: " << message << '\n';
        return code;
    }
    return kOk;
}
