#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "doctest.h"
#include "toolcache/errors.hpp"
#include "toolcache/keying.hpp"
#include "toolcache/workload.hpp"

using namespace toolcache;

namespace {

ToolSpec tool(std::string name, std::uint64_t space, std::uint64_t secondary) {
    ToolSpec t;
    t.name = std::move(name);
    t.param_space = space;
    t.secondary_param_space = secondary;
    return t;
}

ToolCatalog six_tools() {
    ToolCatalog c;
    for (int i = 0; i < 6; ++i) c.push_back(tool("t" + std::to_string(i), 10, 2));
    return c;
}

std::map<std::string, int> key_counts(const Trace& t, std::size_t from = 0, std::size_t to = SIZE_MAX) {
    std::map<std::string, int> counts;
    for (std::size_t i = from; i < std::min(to, t.size()); ++i) ++counts[canonicalize(t[i].tool_name, t[i].params)];
    return counts;
}

}  // namespace

TEST_SUITE("workload") {
    TEST_CASE("population is the product of parameter spaces") {
        WorkloadConfig w;
        const auto pop = build_population(six_tools(), w);
        CHECK(pop.size() == 120);
        const auto again = build_population(six_tools(), w);
        for (std::size_t i = 0; i < pop.size(); ++i) {
            CHECK(pop[i].latency_ms == again[i].latency_ms);
            CHECK(pop[i].size_bytes == again[i].size_bytes);
        }
        CHECK(build_population({}, w).empty());
        CHECK(build_population({tool("solo", 7, 0)}, w).size() == 7);
    }

    TEST_CASE("templates respect catalog ranges") {
        WorkloadConfig w;
        const auto cat = default_catalog();
        for (const auto& t : build_population(cat, w)) {
            const auto& spec = cat[t.tool_index];
            CHECK(t.latency_ms >= spec.latency_range_ms.first);
            CHECK(t.latency_ms <= spec.latency_range_ms.second);
            CHECK(t.size_bytes >= spec.size_range_bytes.first);
            CHECK(t.size_bytes <= spec.size_range_bytes.second);
            CHECK(t.cost == spec.cost_per_call);
        }
    }

    TEST_CASE("catalog validation and JSON round trip") {
        auto bad = six_tools();
        bad[0].param_space = 0;
        CHECK_THROWS_AS(validate_catalog(bad), ConfigError);
        bad = six_tools();
        bad[0].request_type = RequestType::Command;
        CHECK_THROWS_AS(validate_catalog(bad), ConfigError);
        const auto cat = default_catalog();
        CHECK(nlohmann::json(cat).get<ToolCatalog>() == cat);
        WorkloadConfig w;
        w.distribution = Distribution::Multiuser;
        w.rank_order = RankOrder::Grouped;
        w.user_alpha_spread = 0.4;
        CHECK(nlohmann::json(w).get<WorkloadConfig>() == w);
    }

    TEST_CASE("manifest derived from the catalog") {
        const auto m = manifest_for(default_catalog());
        CHECK(m.at("weather").ttl_seconds == 60.0);
        CHECK(m.at("message").request_type == RequestType::Command);
        CHECK(m.at("search").ttl_seconds == 3600.0);
        CHECK(m.at("recommend").ttl_seconds == 300.0);
    }

    TEST_CASE("zipf sampler probabilities") {
        const ZipfSampler z(4, 1.0);
        const double h = 1 + 1 / 2.0 + 1 / 3.0 + 1 / 4.0;
        CHECK(z.probability(0) == doctest::Approx(1 / h));
        CHECK(z.probability(3) == doctest::Approx(0.25 / h));
    }

    TEST_CASE("zipf traces are deterministic and skewed") {
        WorkloadConfig w;
        const auto a = generate(default_catalog(), w);
        const auto b = generate(default_catalog(), w);
        CHECK(a == b);
        CHECK(a.size() == 1000);
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].seq == i + 1);
        w.seed = 43;
        CHECK(generate(default_catalog(), w) != a);

        w.zipf_alpha = 20;
        const auto counts = key_counts(generate(default_catalog(), w));
        int top = 0;
        for (const auto& [_, n] : counts) top = std::max(top, n);
        CHECK(top >= 990);
    }

    TEST_CASE("rank 1 outdraws rank 10") {
        WorkloadConfig w;
        const auto cat = six_tools();
        const auto pop = build_population(cat, w);
        const auto order = rank_order(pop, w);
        const auto trace = gen_zipf(cat, pop, w);
        auto key_of = [&](std::size_t idx) {
            const auto& t = pop[idx];
            const auto& spec = cat[t.tool_index];
            return canonicalize(spec.name, Params{{spec.primary_param, spec.primary_param + "_" + std::to_string(t.primary)},
                                                  {spec.secondary_param, spec.secondary_param + "_" + std::to_string(t.secondary)}});
        };
        const auto counts = key_counts(trace);
        const auto top = counts.count(key_of(order[0])) ? counts.at(key_of(order[0])) : 0;
        const auto tenth = counts.count(key_of(order[9])) ? counts.at(key_of(order[9])) : 0;
        CHECK(top > tenth);
        CHECK(top > 50);
    }

    TEST_CASE("rank orders are permutations") {
        WorkloadConfig w;
        const auto pop = build_population(default_catalog(), w);
        for (auto order : {RankOrder::Shuffled, RankOrder::Grouped}) {
            w.rank_order = order;
            auto r = rank_order(pop, w);
            CHECK(r == rank_order(pop, w));
            std::sort(r.begin(), r.end());
            for (std::size_t i = 0; i < r.size(); ++i) CHECK(r[i] == i);
        }
        // Grouped: the leading group holds ranks 1, 2, 4, 6 and 9.
        w.rank_order = RankOrder::Grouped;
        const auto g = rank_order(pop, w);
        const auto& first = pop[g[0]];
        int same_group_in_top10 = 0;
        for (std::size_t i = 0; i < 10; ++i)
            same_group_in_top10 += pop[g[i]].tool_index == first.tool_index && pop[g[i]].primary == first.primary;
        CHECK(same_group_in_top10 >= 3);
    }

    TEST_CASE("hotspot phases concentrate on disjoint regions") {
        const ToolCatalog cat{tool("solo", 10, 0)};
        WorkloadConfig w;
        w.distribution = Distribution::Hotspot;
        w.zipf_alpha = 0.01;
        w.hotspot_share = 1.0;
        const auto pure = generate(cat, w);
        const auto r1 = key_counts(pure, 0, 500);
        const auto r2 = key_counts(pure, 500);
        CHECK(r1.size() == 5);
        CHECK(r2.size() == 5);
        for (const auto& [k, _] : r1) CHECK(r2.count(k) == 0);

        w.hotspot_share = 0.8;
        const auto mixed = generate(cat, w);
        for (auto [from, region] : {std::pair{0, &r1}, std::pair{500, &r2}}) {
            int inside = 0;
            for (const auto& [k, n] : key_counts(mixed, from, from + 500)) inside += region->count(k) ? n : 0;
            // 3 sigma of a 500-draw binomial at p = 0.8.
            CHECK(std::abs(inside / 500.0 - 0.8) <= 3 * std::sqrt(0.8 * 0.2 / 500));
        }

        w.n_phases = 1;
        w.hotspot_share = 0.8;
        CHECK(key_counts(generate(cat, w)).size() <= 10);
        w.n_phases = 11;
        CHECK_THROWS_AS(generate(cat, w), InvalidPhasing);
        w.n_phases = 0;
        CHECK_THROWS_AS(generate(cat, w), InvalidPhasing);
    }

    TEST_CASE("uniform counts stay within three sigma") {
        WorkloadConfig w;
        w.distribution = Distribution::Uniform;
        w.n_requests = 12000;
        const auto counts = key_counts(generate(six_tools(), w));
        CHECK(counts.size() == 120);
        // With 120 templates a few counts land past 3 sigma by chance, so the
        // check bounds how many do (P(more than 3) ~ 3e-4) and adds a
        // chi-square fit at the 99.9% critical value for 119 dof.
        const double sigma = std::sqrt(12000.0 * (1.0 / 120) * (119.0 / 120));
        int outside = 0;
        double chi2 = 0;
        for (const auto& [k, n] : counts) {
            outside += std::abs(n - 100.0) > 3 * sigma;
            chi2 += (n - 100.0) * (n - 100.0) / 100.0;
        }
        CHECK(outside <= 3);
        CHECK(chi2 < 172.418);

        const auto one = key_counts(generate({tool("solo", 1, 0)}, w));
        CHECK(one.size() == 1);
    }

    TEST_CASE("multiuser interest sets overlap by the configured share") {
        WorkloadConfig w;
        w.distribution = Distribution::Multiuser;
        const auto pop = build_population(default_catalog(), w);
        const auto sets = multiuser_interests(pop, w);
        REQUIRE(sets.size() == 10);
        const double size = static_cast<double>(sets[0].size());
        for (std::size_t a = 0; a < sets.size(); ++a) {
            for (std::size_t b = a + 1; b < sets.size(); ++b) {
                std::set<std::size_t> sa(sets[a].begin(), sets[a].end());
                std::size_t common = 0;
                for (auto x : sets[b]) common += sa.count(x);
                CHECK(std::abs(static_cast<double>(common) / size - 0.3) <= 0.5 / size + 1e-12);
            }
        }
        w.user_overlap = 1.0;
        const auto full = multiuser_interests(pop, w);
        CHECK(std::set<std::size_t>(full[0].begin(), full[0].end()) ==
              std::set<std::size_t>(full[9].begin(), full[9].end()));
        w.n_users = 1;
        CHECK_THROWS_AS(multiuser_interests(pop, w), ConfigError);
    }

    TEST_CASE("disjoint users only reuse their own results") {
        WorkloadConfig w;
        w.distribution = Distribution::Multiuser;
        w.user_overlap = 0.0;
        const auto t = generate(default_catalog(), w);
        std::map<std::string, std::set<std::string>> users_of;
        for (const auto& r : t) users_of[canonicalize(r.tool_name, r.params)].insert(r.user_id);
        for (const auto& [_, users] : users_of) CHECK(users.size() == 1);
    }

    TEST_CASE("per-user exponents spread linearly") {
        WorkloadConfig w;
        CHECK(user_alpha(w, 3) == w.zipf_alpha);
        w.user_alpha_spread = 0.5;
        CHECK(user_alpha(w, 0) == doctest::Approx(0.6));
        CHECK(user_alpha(w, 9) == doctest::Approx(1.6));
        w.user_alpha_spread = 1.1;
        w.distribution = Distribution::Multiuser;
        CHECK_THROWS_AS(generate(default_catalog(), w), ConfigError);
    }

    TEST_CASE("generated records carry catalog annotations") {
        WorkloadConfig w;
        for (const auto& r : generate(default_catalog(), w)) {
            REQUIRE(r.annotation);
            if (r.tool_name == "message") CHECK(r.annotation->request_type == RequestType::Command);
            CHECK(r.annotation->parameter_category == r.params.front().value.get<std::string>());
            CHECK(r.arrival_gap_s == 1.0);
        }
    }
}
