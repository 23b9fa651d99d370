#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "toolcache/annotator.hpp"
#include "toolcache/model.hpp"

namespace toolcache {

struct ToolSpec {
    std::string name;
    RequestType request_type = RequestType::Informational;
    TtlClass ttl_class = TtlClass::Static;
    std::pair<double, double> latency_range_ms{100.0, 100.0};
    double cost_per_call = 0.0;
    std::pair<std::uint64_t, std::uint64_t> size_range_bytes{1024, 1024};
    std::uint64_t param_space = 1;
    // 0 makes the tool single-parameter (no category grouping).
    std::uint64_t secondary_param_space = 0;
    std::string primary_param = "arg0";
    std::string secondary_param = "arg1";

    bool operator==(const ToolSpec&) const = default;
};

using ToolCatalog = std::vector<ToolSpec>;

// Six tools: search, wiki_fetch, map_planning and weather with the latency and
// per-call price of typical public APIs, plus a COMMAND messaging tool and a
// computational recommender.
ToolCatalog default_catalog();

void validate_catalog(const ToolCatalog& c);
ToolManifest manifest_for(const ToolCatalog& c);

void to_json(nlohmann::json& j, const ToolSpec& t);
void from_json(const nlohmann::json& j, ToolSpec& t);
ToolCatalog load_catalog(const std::string& path);

enum class Distribution { Zipf, Hotspot, Uniform, Multiuser };

// How popularity ranks are laid over the population. Shuffled: a uniform
// random permutation, so popularity is independent of tool and category.
// Grouped: product form, rank by (group rank) x (rank within group) where a
// group is one (tool, primary parameter) pair, so popular templates cluster
// in popular groups.
enum class RankOrder { Shuffled, Grouped };

std::string_view to_string(RankOrder o);
RankOrder rank_order_from_string(std::string_view s);

std::string_view to_string(Distribution d);
Distribution distribution_from_string(std::string_view s);

struct WorkloadConfig {
    Distribution distribution = Distribution::Zipf;
    std::uint64_t n_requests = 1000;
    double zipf_alpha = 1.1;
    RankOrder rank_order = RankOrder::Shuffled;
    std::uint64_t n_phases = 2;
    std::uint64_t phase_length = 0;  // 0: n_requests / n_phases
    double hotspot_share = 0.8;
    std::uint64_t n_users = 10;
    double user_overlap = 0.3;
    // Interest-set size of each user in the multiuser workload; 0 derives it
    // from the population size.
    std::uint64_t user_interest_size = 0;
    // Per-user Zipf exponents spread evenly over
    // [zipf_alpha - spread, zipf_alpha + spread]; 0 gives every user zipf_alpha.
    double user_alpha_spread = 0.0;
    double arrival_gap_s = 1.0;
    double latency_jitter = 0.05;
    std::uint64_t seed = 42;

    bool operator==(const WorkloadConfig&) const = default;
};

void to_json(nlohmann::json& j, const WorkloadConfig& c);
void from_json(const nlohmann::json& j, WorkloadConfig& c);

// One unique (tool, primary, secondary) combination with its ground truth.
struct RequestTemplate {
    std::size_t tool_index = 0;
    std::uint64_t primary = 0;
    std::uint64_t secondary = 0;
    double latency_ms = 0.0;
    double cost = 0.0;
    std::uint64_t size_bytes = 0;
};

using Population = std::vector<RequestTemplate>;

Population build_population(const ToolCatalog& catalog, const WorkloadConfig& cfg);

using Trace = std::vector<ToolCallRequest>;

// Population indices from most to least popular.
std::vector<std::size_t> rank_order(const Population& pop, const WorkloadConfig& cfg);

Trace gen_zipf(const ToolCatalog& catalog, const Population& pop, const WorkloadConfig& cfg);
Trace gen_hotspot(const ToolCatalog& catalog, const Population& pop, const WorkloadConfig& cfg);
Trace gen_uniform(const ToolCatalog& catalog, const Population& pop, const WorkloadConfig& cfg);
Trace gen_multiuser(const ToolCatalog& catalog, const Population& pop, const WorkloadConfig& cfg);

// Interest sets (population indices, most popular first) used by
// gen_multiuser; exposed for overlap measurements.
std::vector<std::vector<std::size_t>> multiuser_interests(const Population& pop, const WorkloadConfig& cfg);

double user_alpha(const WorkloadConfig& cfg, std::uint64_t user);

// Builds the population and dispatches on cfg.distribution.
Trace generate(const ToolCatalog& catalog, const WorkloadConfig& cfg);

// Portable [0,1) double from a 64-bit engine.
double unit_double(std::mt19937_64& rng);

// Inverse-CDF sampler over ranks 1..n with P(k) proportional to k^-alpha.
class ZipfSampler {
  public:
    ZipfSampler(std::size_t n, double alpha);
    std::size_t operator()(std::mt19937_64& rng) const;  // 0-based rank
    double probability(std::size_t rank) const;

  private:
    std::vector<double> cdf_;
};

}  // namespace toolcache
