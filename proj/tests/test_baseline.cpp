#include "doctest.h"
#include "test_support.hpp"
#include "toolcache/errors.hpp"
#include "toolcache/policy.hpp"

using namespace toolcache;

namespace {

constexpr double kCacaUnit = 0.480453013918201424667102526327;  // (ln 2)^2

CacheEntry entry(std::uint64_t id) {
    CacheEntry e;
    e.key = make_key("lookup", Params{{"id", ParamValue(id)}});
    e.semantic = testing::info(3600);
    return e;
}

}  // namespace

TEST_SUITE("baseline-policies") {
    TEST_CASE("LRU admits every cacheable miss") {
        LruPolicy p;
        const GroupFeatures f{"t", std::nullopt, "u"};
        CHECK(p.admit(f, -5.0, false).admitted);
        CHECK(p.admit(f, 0.0, true).admitted);
    }

    TEST_CASE("LRU evicts the least recently accessed entry") {
        LruPolicy p;
        CacheStore s(3);
        s.insert(entry(1));
        s.insert(entry(5));
        s.insert(entry(3));
        s.touch(entry(1).key, "u");
        s.touch(entry(5).key, "u");
        s.touch(entry(3).key, "u");
        CHECK(p.select_victim(s) == entry(1).key);

        CacheStore ab(2);
        ab.insert(entry(10));
        ab.insert(entry(11));
        ab.touch(entry(10).key, "u");
        CHECK(p.select_victim(ab) == entry(11).key);

        CacheStore single(1);
        single.insert(entry(7));
        CHECK(p.select_victim(single) == entry(7).key);
        CHECK_THROWS_AS(p.select_victim(CacheStore(1)), EmptyCache);
    }

    TEST_CASE("CACA reward ignores value") {
        const auto c = effective_config("caca", PolicyConfig{});
        CHECK_FALSE(c.value_reward);
        CHECK(c.eviction == EvictionMode::Lru);
        CHECK(group_reward(1.0, 1, 1.0, 0, c) == doctest::Approx(kCacaUnit).epsilon(1e-12));
        CHECK(group_reward(1.0, 1, 1.0, 0, c) == doctest::Approx(0.4805).epsilon(1e-4));
        CHECK(group_reward(0.0, 1, 1.0, 0, c) == 0.0);
        CHECK(group_reward(0.4, 2, 0.1, 3, c) == group_reward(0.4, 2, 7.5, 3, c));
    }

    TEST_CASE("CACA evicts in plain LRU order") {
        auto p = make_policy("caca", PolicyConfig{});
        CacheStore s(20);
        for (std::uint64_t i = 0; i < 20; ++i) {
            auto e = entry(i);
            // Value-aware eviction would spare entry 1 for entry 2.
            if (i == 1) e.value_score = 5.0;
            s.insert(e);
        }
        s.touch(entry(0).key, "u");
        CHECK(p->select_victim(s) == entry(1).key);
    }

    TEST_CASE("policy factory") {
        CHECK(make_policy("vaac", PolicyConfig{})->name() == "vaac");
        CHECK(make_policy("caca", PolicyConfig{})->name() == "caca");
        CHECK(make_policy("lru", PolicyConfig{})->name() == "lru");
        CHECK_THROWS_AS(make_policy("fifo", PolicyConfig{}), ConfigError);
        CHECK(is_known_policy("vaac"));
        CHECK_FALSE(is_known_policy("VAAC"));
        CHECK(effective_config("vaac", PolicyConfig{}) == PolicyConfig{});
    }
}
