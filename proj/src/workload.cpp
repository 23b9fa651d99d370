#include "toolcache/workload.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

#include "toolcache/errors.hpp"

namespace toolcache {

ToolCatalog default_catalog() {
    ToolCatalog c;
    c.push_back({"search", RequestType::Informational, TtlClass::Static, {700.0, 2000.0}, 0.005, {4096, 32768},
                 4, 10, "domain", "query"});
    c.push_back({"wiki_fetch", RequestType::Informational, TtlClass::Static, {200.0, 1000.0}, 0.0, {8192, 65536},
                 4, 10, "language", "title"});
    c.push_back({"map_planning", RequestType::Informational, TtlClass::Computational, {50.0, 1000.0}, 0.005,
                 {1024, 8192}, 4, 10, "origin", "destination"});
    c.push_back({"weather", RequestType::Informational, TtlClass::Realtime, {180.0, 220.0}, 0.0016, {512, 2048},
                 4, 5, "location", "date"});
    c.push_back({"message", RequestType::Command, TtlClass::Command, {100.0, 300.0}, 0.0, {128, 512}, 2, 5,
                 "action", "recipient"});
    c.push_back({"recommend", RequestType::Informational, TtlClass::Computational, {500.0, 3000.0}, 0.002,
                 {2048, 16384}, 4, 10, "genre", "profile"});
    return c;
}

void validate_catalog(const ToolCatalog& c) {
    for (const auto& t : c) {
        if (t.name.empty()) throw ConfigError("catalog tool without a name");
        if (t.latency_range_ms.first < 0 || t.latency_range_ms.first > t.latency_range_ms.second)
            throw ConfigError("bad latency range for " + t.name);
        if (t.size_range_bytes.first > t.size_range_bytes.second) throw ConfigError("bad size range for " + t.name);
        if (t.cost_per_call < 0) throw ConfigError("negative cost for " + t.name);
        if (t.param_space == 0) throw ConfigError("param_space must be >= 1 for " + t.name);
        if (t.request_type == RequestType::Command && t.ttl_class != TtlClass::Command)
            throw ConfigError("COMMAND tool " + t.name + " must use the command ttl class");
    }
}

ToolManifest manifest_for(const ToolCatalog& c) {
    ToolManifest m;
    for (const auto& t : c) m.add(t.name, ToolRule{t.request_type, ttl_for_class(t.ttl_class), {}});
    return m;
}

void to_json(nlohmann::json& j, const ToolSpec& t) {
    j = nlohmann::json{{"name", t.name},
                       {"request_type", to_string(t.request_type)},
                       {"ttl_class", to_string(t.ttl_class)},
                       {"latency_range_ms", {t.latency_range_ms.first, t.latency_range_ms.second}},
                       {"cost_per_call", t.cost_per_call},
                       {"size_range_bytes", {t.size_range_bytes.first, t.size_range_bytes.second}},
                       {"param_space", t.param_space},
                       {"secondary_param_space", t.secondary_param_space},
                       {"primary_param", t.primary_param},
                       {"secondary_param", t.secondary_param}};
}

void from_json(const nlohmann::json& j, ToolSpec& t) {
    t.name = j.at("name").get<std::string>();
    t.request_type = request_type_from_string(j.at("request_type").get<std::string>());
    t.ttl_class = ttl_class_from_string(j.at("ttl_class").get<std::string>());
    const auto& lat = j.at("latency_range_ms");
    t.latency_range_ms = {lat.at(0).get<double>(), lat.at(1).get<double>()};
    t.cost_per_call = j.at("cost_per_call").get<double>();
    const auto& size = j.at("size_range_bytes");
    t.size_range_bytes = {size.at(0).get<std::uint64_t>(), size.at(1).get<std::uint64_t>()};
    t.param_space = j.at("param_space").get<std::uint64_t>();
    t.secondary_param_space = j.value("secondary_param_space", std::uint64_t{0});
    t.primary_param = j.value("primary_param", std::string("arg0"));
    t.secondary_param = j.value("secondary_param", std::string("arg1"));
}

ToolCatalog load_catalog(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open catalog: " + path);
    try {
        auto c = nlohmann::json::parse(in).get<ToolCatalog>();
        validate_catalog(c);
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("catalog " + path + ": " + e.what());
    }
}

std::string_view to_string(Distribution d) {
    switch (d) {
        case Distribution::Zipf: return "zipf";
        case Distribution::Hotspot: return "hotspot";
        case Distribution::Uniform: return "uniform";
        case Distribution::Multiuser: return "multiuser";
    }
    return "zipf";
}

Distribution distribution_from_string(std::string_view s) {
    if (s == "zipf") return Distribution::Zipf;
    if (s == "hotspot") return Distribution::Hotspot;
    if (s == "uniform") return Distribution::Uniform;
    if (s == "multiuser") return Distribution::Multiuser;
    throw ConfigError("unknown distribution: " + std::string(s));
}

std::string_view to_string(RankOrder o) { return o == RankOrder::Grouped ? "grouped" : "shuffled"; }

RankOrder rank_order_from_string(std::string_view s) {
    if (s == "shuffled") return RankOrder::Shuffled;
    if (s == "grouped") return RankOrder::Grouped;
    throw ConfigError("unknown rank order: " + std::string(s));
}

void to_json(nlohmann::json& j, const WorkloadConfig& c) {
    j = nlohmann::json{{"distribution", to_string(c.distribution)},
                       {"n_requests", c.n_requests},
                       {"zipf_alpha", c.zipf_alpha},
                       {"rank_order", to_string(c.rank_order)},
                       {"n_phases", c.n_phases},
                       {"phase_length", c.phase_length},
                       {"hotspot_share", c.hotspot_share},
                       {"n_users", c.n_users},
                       {"user_overlap", c.user_overlap},
                       {"user_interest_size", c.user_interest_size},
                       {"user_alpha_spread", c.user_alpha_spread},
                       {"arrival_gap_s", c.arrival_gap_s},
                       {"latency_jitter", c.latency_jitter},
                       {"seed", c.seed}};
}

void from_json(const nlohmann::json& j, WorkloadConfig& c) {
    WorkloadConfig d;
    c.distribution = distribution_from_string(j.value("distribution", std::string(to_string(d.distribution))));
    c.n_requests = j.value("n_requests", d.n_requests);
    c.zipf_alpha = j.value("zipf_alpha", d.zipf_alpha);
    c.rank_order = rank_order_from_string(j.value("rank_order", std::string(to_string(d.rank_order))));
    c.n_phases = j.value("n_phases", d.n_phases);
    c.phase_length = j.value("phase_length", d.phase_length);
    c.hotspot_share = j.value("hotspot_share", d.hotspot_share);
    c.n_users = j.value("n_users", d.n_users);
    c.user_overlap = j.value("user_overlap", d.user_overlap);
    c.user_interest_size = j.value("user_interest_size", d.user_interest_size);
    c.user_alpha_spread = j.value("user_alpha_spread", d.user_alpha_spread);
    c.arrival_gap_s = j.value("arrival_gap_s", d.arrival_gap_s);
    c.latency_jitter = j.value("latency_jitter", d.latency_jitter);
    c.seed = j.value("seed", d.seed);
}

double unit_double(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

namespace {

std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
    return std::min<std::uint64_t>(static_cast<std::uint64_t>(unit_double(rng) * static_cast<double>(n)), n - 1);
}

double uniform_between(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * unit_double(rng); }

// Fisher-Yates with the portable index draw (std::shuffle is not specified
// bit-for-bit across standard libraries).
template <typename T>
void portable_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_index(rng, i)]);
}

std::vector<std::size_t> permutation(std::size_t n, std::mt19937_64& rng) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    portable_shuffle(idx, rng);
    return idx;
}

void check_config(const WorkloadConfig& cfg) {
    if (cfg.n_requests < 1) throw ConfigError("n_requests must be >= 1");
    if (!(cfg.zipf_alpha > 0)) throw ConfigError("zipf_alpha must be > 0");
    if (cfg.latency_jitter < 0 || cfg.latency_jitter > 0.05) throw ConfigError("latency_jitter outside [0, 0.05]");
    if (cfg.user_overlap < 0 || cfg.user_overlap > 1) throw ConfigError("user_overlap outside [0,1]");
    if (cfg.user_alpha_spread < 0 || cfg.user_alpha_spread >= cfg.zipf_alpha)
        throw ConfigError("user_alpha_spread must lie in [0, zipf_alpha)");
    if (cfg.hotspot_share < 0 || cfg.hotspot_share > 1) throw ConfigError("hotspot_share outside [0,1]");
    if (!(cfg.arrival_gap_s >= 0)) throw ConfigError("arrival_gap_s must be >= 0");
}

std::string param_value(const std::string& name, std::uint64_t i) { return name + "_" + std::to_string(i); }

// Stream ids so that every generator draws from an independent sequence.
enum Stream : std::uint64_t { kPopulation = 1, kRanking = 2, kSampling = 3, kJitter = 4, kUsers = 5 };

std::mt19937_64 stream(const WorkloadConfig& cfg, Stream s) {
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                      static_cast<std::uint32_t>(s)};
    return std::mt19937_64(seq);
}

class TraceBuilder {
  public:
    TraceBuilder(const ToolCatalog& catalog, const Population& pop, const WorkloadConfig& cfg)
        : catalog_(catalog), pop_(pop), cfg_(cfg), jitter_(stream(cfg, kJitter)) {}

    void emit(std::size_t template_index, std::string user) {
        const RequestTemplate& t = pop_.at(template_index);
        const ToolSpec& tool = catalog_.at(t.tool_index);
        ToolCallRequest r;
        r.seq = trace_.size() + 1;
        r.user_id = std::move(user);
        r.tool_name = tool.name;
        r.params.push_back({tool.primary_param, param_value(tool.primary_param, t.primary)});
        if (tool.secondary_param_space > 0)
            r.params.push_back({tool.secondary_param, param_value(tool.secondary_param, t.secondary)});
        const double jitter = 1.0 + cfg_.latency_jitter * (2.0 * unit_double(jitter_) - 1.0);
        r.true_latency_ms = std::round(t.latency_ms * jitter * 1000.0) / 1000.0;
        r.true_cost_units = t.cost;
        r.true_size_bytes = t.size_bytes;
        r.arrival_gap_s = cfg_.arrival_gap_s;
        SemanticFeatures f;
        f.request_type = tool.request_type;
        f.ttl_seconds = ttl_for_class(tool.ttl_class);
        if (r.params.size() >= 2) f.parameter_category = r.params.front().value.get<std::string>();
        r.annotation = std::move(f);
        trace_.push_back(std::move(r));
    }

    Trace take() { return std::move(trace_); }

  private:
    const ToolCatalog& catalog_;
    const Population& pop_;
    const WorkloadConfig& cfg_;
    std::mt19937_64 jitter_;
    Trace trace_;
};

std::string user_name(std::uint64_t u) { return "user" + std::to_string(u); }

}  // namespace

ZipfSampler::ZipfSampler(std::size_t n, double alpha) : cdf_(n) {
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        total += std::pow(static_cast<double>(k + 1), -alpha);
        cdf_[k] = total;
    }
    for (auto& c : cdf_) c /= total;
}

std::size_t ZipfSampler::operator()(std::mt19937_64& rng) const {
    const double u = unit_double(rng);
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
}

double ZipfSampler::probability(std::size_t rank) const {
    return rank == 0 ? cdf_[0] : cdf_[rank] - cdf_[rank - 1];
}

Population build_population(const ToolCatalog& catalog, const WorkloadConfig& cfg) {
    validate_catalog(catalog);
    auto rng = stream(cfg, kPopulation);
    Population pop;
    for (std::size_t ti = 0; ti < catalog.size(); ++ti) {
        const ToolSpec& tool = catalog[ti];
        const std::uint64_t secondaries = std::max<std::uint64_t>(tool.secondary_param_space, 1);
        for (std::uint64_t p = 0; p < tool.param_space; ++p) {
            for (std::uint64_t s = 0; s < secondaries; ++s) {
                RequestTemplate t;
                t.tool_index = ti;
                t.primary = p;
                t.secondary = s;
                t.latency_ms = uniform_between(rng, tool.latency_range_ms.first, tool.latency_range_ms.second);
                t.cost = tool.cost_per_call;
                const auto span = tool.size_range_bytes.second - tool.size_range_bytes.first + 1;
                t.size_bytes = tool.size_range_bytes.first + uniform_index(rng, span);
                pop.push_back(t);
            }
        }
    }
    return pop;
}

std::vector<std::size_t> rank_order(const Population& pop, const WorkloadConfig& cfg) {
    auto rng = stream(cfg, kRanking);
    if (cfg.rank_order == RankOrder::Shuffled) return permutation(pop.size(), rng);

    // Group rank and within-group rank, both 1-based and seeded.
    std::map<std::pair<std::size_t, std::uint64_t>, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < pop.size(); ++i) groups[{pop[i].tool_index, pop[i].primary}].push_back(i);
    std::vector<const std::vector<std::size_t>*> group_list;
    for (const auto& [_, members] : groups) group_list.push_back(&members);
    portable_shuffle(group_list, rng);

    struct Scored {
        std::uint64_t score;
        std::uint64_t tiebreak;
        std::size_t index;
    };
    std::vector<Scored> scored;
    scored.reserve(pop.size());
    for (std::size_t g = 0; g < group_list.size(); ++g) {
        std::vector<std::size_t> members = *group_list[g];
        portable_shuffle(members, rng);
        for (std::size_t s = 0; s < members.size(); ++s) scored.push_back({(g + 1) * (s + 1), rng(), members[s]});
    }
    std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
        return a.score != b.score ? a.score < b.score : a.tiebreak < b.tiebreak;
    });
    std::vector<std::size_t> order;
    order.reserve(scored.size());
    for (const auto& s : scored) order.push_back(s.index);
    return order;
}

Trace gen_zipf(const ToolCatalog& catalog, const Population& pop, const WorkloadConfig& cfg) {
    check_config(cfg);
    if (pop.empty()) throw ConfigError("empty population");
    const auto order = rank_order(pop, cfg);
    const ZipfSampler zipf(pop.size(), cfg.zipf_alpha);
    auto rng = stream(cfg, kSampling);
    auto user_rng = stream(cfg, kUsers);
    TraceBuilder out(catalog, pop, cfg);
    for (std::uint64_t i = 0; i < cfg.n_requests; ++i) {
        const std::size_t idx = order[zipf(rng)];
        out.emit(idx, user_name(uniform_index(user_rng, std::max<std::uint64_t>(cfg.n_users, 1))));
    }
    return out.take();
}

Trace gen_hotspot(const ToolCatalog& catalog, const Population& pop, const WorkloadConfig& cfg) {
    check_config(cfg);
    if (pop.empty()) throw ConfigError("empty population");
    if (cfg.n_phases < 1) throw InvalidPhasing("n_phases must be >= 1");
    if (cfg.n_phases > pop.size()) throw InvalidPhasing("more phases than population regions");
    auto rank_rng = stream(cfg, kRanking);
    const auto order = permutation(pop.size(), rank_rng);

    // Disjoint regions: contiguous slices of the shuffled population.
    std::vector<std::vector<std::size_t>> regions(cfg.n_phases);
    for (std::size_t i = 0; i < order.size(); ++i) regions[i * cfg.n_phases / order.size()].push_back(order[i]);
    std::vector<std::vector<std::size_t>> rest(cfg.n_phases);
    for (std::size_t p = 0; p < cfg.n_phases; ++p) {
        for (std::size_t q = 0; q < cfg.n_phases; ++q) {
            if (q != p) rest[p].insert(rest[p].end(), regions[q].begin(), regions[q].end());
        }
    }

    const std::uint64_t phase_length =
        cfg.phase_length ? cfg.phase_length : std::max<std::uint64_t>(1, cfg.n_requests / cfg.n_phases);
    std::vector<ZipfSampler> samplers;
    samplers.reserve(regions.size());
    for (const auto& region : regions) samplers.emplace_back(region.size(), cfg.zipf_alpha);
    auto rng = stream(cfg, kSampling);
    auto user_rng = stream(cfg, kUsers);
    TraceBuilder out(catalog, pop, cfg);
    for (std::uint64_t i = 0; i < cfg.n_requests; ++i) {
        const std::size_t phase = (i / phase_length) % cfg.n_phases;
        const auto& region = regions[phase];
        std::size_t idx;
        if (rest[phase].empty() || unit_double(rng) < cfg.hotspot_share) {
            idx = region[samplers[phase](rng)];
        } else {
            idx = rest[phase][uniform_index(rng, rest[phase].size())];
        }
        out.emit(idx, user_name(uniform_index(user_rng, std::max<std::uint64_t>(cfg.n_users, 1))));
    }
    return out.take();
}

Trace gen_uniform(const ToolCatalog& catalog, const Population& pop, const WorkloadConfig& cfg) {
    check_config(cfg);
    if (pop.empty()) throw ConfigError("empty population");
    auto rng = stream(cfg, kSampling);
    auto user_rng = stream(cfg, kUsers);
    TraceBuilder out(catalog, pop, cfg);
    for (std::uint64_t i = 0; i < cfg.n_requests; ++i)
        out.emit(uniform_index(rng, pop.size()),
                 user_name(uniform_index(user_rng, std::max<std::uint64_t>(cfg.n_users, 1))));
    return out.take();
}

std::vector<std::vector<std::size_t>> multiuser_interests(const Population& pop, const WorkloadConfig& cfg) {
    check_config(cfg);
    if (cfg.n_users < 2) throw ConfigError("multiuser workload needs n_users >= 2");
    if (pop.empty()) throw ConfigError("empty population");
    const std::uint64_t users = cfg.n_users;
    // Default set size lets the private parts of all users tile the population
    // once the shared part is set aside.
    std::uint64_t size = cfg.user_interest_size;
    if (size == 0) {
        const double private_share = 1.0 - cfg.user_overlap;
        size = static_cast<std::uint64_t>(
            std::floor(static_cast<double>(pop.size()) / (static_cast<double>(users) * private_share + cfg.user_overlap)));
        size = std::max<std::uint64_t>(size, 1);
    }
    const auto shared = static_cast<std::uint64_t>(std::llround(cfg.user_overlap * static_cast<double>(size)));
    const std::uint64_t priv = size - shared;
    if (shared + users * priv > pop.size()) throw ConfigError("population too small for the multiuser interest sets");

    // Shared pool drawn at random; private parts are contiguous runs of the
    // (tool, category)-ordered remainder so each user concentrates on a few
    // categories.
    auto rng = stream(cfg, kRanking);
    auto order = permutation(pop.size(), rng);
    std::vector<std::size_t> shared_pool(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(shared));
    std::vector<std::size_t> remainder(order.begin() + static_cast<std::ptrdiff_t>(shared), order.end());
    std::sort(remainder.begin(), remainder.end());

    std::vector<std::vector<std::size_t>> interests(users);
    for (std::uint64_t u = 0; u < users; ++u) {
        auto& set = interests[u];
        set = shared_pool;
        set.insert(set.end(), remainder.begin() + static_cast<std::ptrdiff_t>(u * priv),
                   remainder.begin() + static_cast<std::ptrdiff_t>((u + 1) * priv));
        portable_shuffle(set, rng);
    }
    return interests;
}

double user_alpha(const WorkloadConfig& cfg, std::uint64_t user) {
    if (cfg.n_users < 2 || cfg.user_alpha_spread == 0.0) return cfg.zipf_alpha;
    const double pos = static_cast<double>(user) / static_cast<double>(cfg.n_users - 1);
    return cfg.zipf_alpha + cfg.user_alpha_spread * (2.0 * pos - 1.0);
}

Trace gen_multiuser(const ToolCatalog& catalog, const Population& pop, const WorkloadConfig& cfg) {
    const auto interests = multiuser_interests(pop, cfg);
    auto rng = stream(cfg, kSampling);
    TraceBuilder out(catalog, pop, cfg);
    std::vector<ZipfSampler> samplers;
    samplers.reserve(interests.size());
    for (std::size_t u = 0; u < interests.size(); ++u) samplers.emplace_back(interests[u].size(), user_alpha(cfg, u));
    for (std::uint64_t i = 0; i < cfg.n_requests; ++i) {
        const std::size_t u = i % interests.size();
        out.emit(interests[u][samplers[u](rng)], user_name(u));
    }
    return out.take();
}

Trace generate(const ToolCatalog& catalog, const WorkloadConfig& cfg) {
    const Population pop = build_population(catalog, cfg);
    switch (cfg.distribution) {
        case Distribution::Zipf: return gen_zipf(catalog, pop, cfg);
        case Distribution::Hotspot: return gen_hotspot(catalog, pop, cfg);
        case Distribution::Uniform: return gen_uniform(catalog, pop, cfg);
        case Distribution::Multiuser: return gen_multiuser(catalog, pop, cfg);
    }
    return {};
}

}  // namespace toolcache
