#include <cmath>
#include <limits>

#include "doctest.h"
#include "test_support.hpp"
#include "toolcache/errors.hpp"
#include "toolcache/grouping.hpp"
#include "toolcache/vaac_policy.hpp"

using namespace toolcache;

namespace {

constexpr double kRewardUnit = 0.333024651988929479718853582612;  // (ln 2)^3
constexpr double kUcbRound10 = 2.4789906782782767193550371529;
constexpr double kLn2 = 0.693147180559945309417232121458;
constexpr double kLn09 = -0.105360515657826301227500980839;

void push(GroupingState& s, const std::string& tool, std::optional<std::string> cat, const std::string& user,
          bool hit, int n, double value = 0.5) {
    for (int i = 0; i < n; ++i) s.buffer.push_back({GroupFeatures{tool, cat, user}, hit, value});
}

const GroupNode* child(const GroupNode& n, const std::string& label) {
    for (const auto& c : n.children)
        if (c.path.back() == label) return &c;
    return nullptr;
}

GroupNode arm(std::string label, std::uint64_t access, std::uint64_t hits, std::uint64_t selections) {
    GroupNode g;
    g.path = {std::move(label)};
    g.level = 1;
    g.access_count = g.member_count = access;
    g.hit_count = hits;
    g.value_sum = 0.5 * static_cast<double>(access);
    g.selection_count = selections;
    return g;
}

// Two level-1 arms after warm-up: "a" always hits, "b" never does.
GroupingState two_arm_state(std::uint64_t n_a = 1, std::uint64_t n_b = 1) {
    GroupingState s;
    s.warmup_active = false;
    s.round = 5;
    s.root.children = {arm("a", 10, 10, n_a), arm("b", 10, 0, n_b)};
    return s;
}

CacheEntry entry(std::uint64_t id, double value, std::uint64_t hits = 0, double ttl = 3600) {
    CacheEntry e;
    e.key = make_key("lookup", Params{{"id", ParamValue(id)}});
    e.semantic = testing::info(ttl);
    e.value_score = value;
    e.hit_count = hits;
    return e;
}

}  // namespace

TEST_SUITE("vaac-policy") {
    TEST_CASE("grouping splits weak nodes down to the user level") {
        GroupingState s;
        PolicyConfig c;
        push(s, "weather", "New York", "UserA", false, 15);
        push(s, "weather", "New York", "UserB", false, 15);
        push(s, "weather", "London", "UserA", false, 10);
        regroup(s, c);
        CHECK_FALSE(s.warmup_active);
        const GroupNode& leaf = locate_group(s, {"weather", "New York", "UserA"});
        CHECK(leaf.path == std::vector<std::string>{"weather", "New York", "UserA"});
        CHECK(leaf.level == 3);
        // London saw only 10 requests: it stays a category-level leaf.
        CHECK(locate_group(s, {"weather", "London", "UserA"}).path ==
              std::vector<std::string>{"weather", "London"});
        // Unknown labels stop at the deepest existing node.
        CHECK(locate_group(s, {"weather", "Paris", "UserA"}).path == std::vector<std::string>{"weather"});
    }

    TEST_CASE("unseen tools get a fresh level-1 leaf") {
        GroupingState s;
        GroupNode& g = locate_group(s, {"maps", std::nullopt, "u"});
        CHECK(g.path == std::vector<std::string>{"maps"});
        CHECK(g.level == 1);
        CHECK(g.is_arm());
        CHECK(s.root.children.size() == 1);
    }

    TEST_CASE("a tool that never split covers all its requests") {
        GroupingState s;
        PolicyConfig c;
        push(s, "weather", "London", "u", true, 30);
        regroup(s, c);
        CHECK(locate_group(s, {"weather", "London", "u"}).path == std::vector<std::string>{"weather"});
        CHECK(locate_group(s, {"weather", "Oslo", "v"}).path == std::vector<std::string>{"weather"});
    }

    TEST_CASE("split condition uses T1 and the hit-ratio ceiling") {
        PolicyConfig c;
        GroupingState low;
        push(low, "w", "x", "u", true, 7);
        push(low, "w", "x", "u", false, 8);
        push(low, "w", "y", "u", false, 10);
        regroup(low, c);
        CHECK(low.root.children.at(0).children.size() == 2);

        GroupingState high;
        push(high, "w", "x", "u", true, 20);
        push(high, "w", "y", "u", false, 5);
        regroup(high, c);
        CHECK(high.root.children.at(0).is_leaf());

        GroupingState few;
        push(few, "w", "x", "u", false, 10);
        push(few, "w", "y", "u", false, 9);
        regroup(few, c);
        CHECK(few.root.children.at(0).is_leaf());
    }

    TEST_CASE("small subgroups are absorbed into the parent") {
        PolicyConfig c;
        GroupingState s;
        push(s, "w", "big", "u", false, 22);
        push(s, "w", "tiny", "u", false, 3);
        push(s, "w", std::nullopt, "u", false, 2);
        regroup(s, c);
        const GroupNode& w = s.root.children.at(0);
        REQUIRE(w.children.size() == 1);
        CHECK(child(w, "big") != nullptr);
        CHECK(w.absorbs);
        CHECK(w.is_arm());
        CHECK(w.member_count == 5);
        CHECK(collect_arms(s.root).size() == 2);
        CHECK(locate_group(s, {"w", "tiny", "u"}).path == std::vector<std::string>{"w"});
    }

    TEST_CASE("regroup resets bandit counters and the window slides") {
        PolicyConfig c;
        c.regroup_interval = 4;
        GroupingState s;
        for (int i = 0; i < 6; ++i) record_outcome(s, {"t", std::nullopt, "u"}, false, 0.1, c);
        CHECK(s.buffer.size() == 4);
        s.root.children.at(0).selection_count = 9;
        bool regrouped = false;
        for (int i = 0; i < 4; ++i) regrouped = count_request(s, c);
        CHECK(regrouped);
        CHECK(s.root.children.at(0).selection_count == 0);
        CHECK(s.root.children.at(0).access_count == 4);
    }

    TEST_CASE("group reward reference points") {
        PolicyConfig c;
        CHECK(group_reward(1.0, 1, 1.0, 0, c) == doctest::Approx(kRewardUnit).epsilon(1e-12));
        CHECK(group_reward(1.0, 1, 1.0, 0, c) == doctest::Approx(0.3330).epsilon(1e-4));
        CHECK(group_reward(0.0, 2, 5.0, 3, c) == 0.0);
        CHECK(group_reward(0.6, 2, 1.0, 10, c) < group_reward(0.6, 2, 1.0, 0, c));
        // Negative average value is clamped to zero.
        CHECK(group_reward(0.6, 2, -3.0, 1, c) == 0.0);
    }

    TEST_CASE("UCB reference points") {
        CHECK(ucb_score(0.5, 0, 10, std::sqrt(2.0)) == std::numeric_limits<double>::infinity());
        CHECK(ucb_score(kRewardUnit, 1, 10, std::sqrt(2.0)) == doctest::Approx(kUcbRound10).epsilon(1e-12));
        CHECK(ucb_score(0.3330, 1, 10, std::sqrt(2.0)) == doctest::Approx(2.4790).epsilon(1e-4));
        CHECK(ucb_score(0.25, 1, 1, std::sqrt(2.0)) == 0.25);
    }

    TEST_CASE("warm-up admits everything without touching counters") {
        GroupingState s;
        PolicyConfig c;
        GroupNode& leaf = locate_group(s, {"t", std::nullopt, "u"});
        const auto d = decide_admission(s, leaf, c);
        CHECK(d.admitted);
        CHECK(d.rank == 1);
        CHECK(leaf.selection_count == 0);
        CHECK(leaf.admitted_count == 0);
        CHECK(s.round == 1);
    }

    TEST_CASE("top-K admission over two arms") {
        PolicyConfig c;
        {
            auto s = two_arm_state();
            const auto d = decide_admission(s, s.root.children[0], c);
            CHECK(d.admitted);
            CHECK(d.rank == 1);
            CHECK(s.root.children[0].selection_count == 2);
            CHECK(s.root.children[0].admitted_count == 1);
        }
        {
            auto s = two_arm_state();
            const auto d = decide_admission(s, s.root.children[1], c);
            CHECK_FALSE(d.admitted);
            CHECK(d.rank == 2);
            CHECK(s.root.children[1].selection_count == 1);
        }
        {
            // An unexplored arm is always admitted.
            auto s = two_arm_state(1, 0);
            s.root.children[1].hit_count = 0;
            CHECK(decide_admission(s, s.root.children[1], c).admitted);
        }
    }

    TEST_CASE("free space bypasses the bandit when enabled") {
        PolicyConfig c;
        auto s = two_arm_state();
        const auto d = decide_admission(s, s.root.children[1], c, true);
        CHECK(d.admitted);
        CHECK(s.root.children[1].selection_count == 1);
        CHECK(s.round == 6);

        c.admit_when_free = false;
        auto s2 = two_arm_state();
        CHECK_FALSE(decide_admission(s2, s2.root.children[1], c, true).admitted);
    }

    TEST_CASE("arm ranking ties break on value then path") {
        const std::vector<std::string> a{"a"}, b{"b"};
        CHECK(ranks_before({1.0, 0.0, &b}, {0.5, 9.0, &a}));
        CHECK(ranks_before({1.0, 0.3, &b}, {1.0, 0.2, &a}));
        CHECK(ranks_before({1.0, 0.2, &a}, {1.0, 0.2, &b}));
        const std::vector<ArmView> arms{{1.0, 0.2, &b}, {1.0, 0.2, &a}, {0.1, 5, &a}};
        CHECK(select_arm(arms) == 1);
    }

    TEST_CASE("purge removes entries at or past expiry") {
        CacheStore store(4);
        CHECK(purge_expired(store, 100).empty());
        const auto e = entry(1, 0.1, 0, 300);
        store.insert(e);
        CHECK(purge_expired(store, 299).empty());
        CHECK(store.size() == 1);
        const auto gone = purge_expired(store, 301);
        REQUIRE(gone.size() == 1);
        CHECK(gone[0] == e.key);
        CHECK(store.empty());
    }

    TEST_CASE("eviction score reference points") {
        PolicyConfig c;
        CHECK(eviction_score(entry(1, 0.0, 0), c) == 0.0);
        CHECK(eviction_score(entry(1, 0.5, 1), c) == doctest::Approx(kLn2).epsilon(1e-12));
        CHECK(eviction_score(entry(1, -0.1, 0), c) == doctest::Approx(kLn09).epsilon(1e-12));
        CHECK(entry_hit_ratio(entry(1, 0, 3)) == 0.75);
    }

    TEST_CASE("victim selection looks only at the least recent candidates") {
        PolicyConfig c;
        CHECK_THROWS_AS(select_victim(CacheStore(2), c), EmptyCache);

        CacheStore one(1);
        one.insert(entry(0, 5.0));
        CHECK(select_victim(one, c) == entry(0, 0).key);

        // Ten entries: one candidate, evicted however valuable.
        CacheStore ten(10);
        ten.insert(entry(0, 5.0, 4));
        for (std::uint64_t i = 1; i < 10; ++i) ten.insert(entry(i, 0.0));
        CHECK(select_victim(ten, c) == entry(0, 0).key);

        // Twenty entries: two candidates scoring 0.7 and 0.2.
        CacheStore twenty(20);
        twenty.insert(entry(0, std::exp(0.7) - 1));
        twenty.insert(entry(1, std::exp(0.2) - 1));
        for (std::uint64_t i = 2; i < 20; ++i) twenty.insert(entry(i, -0.5));
        CHECK(eviction_score(*twenty.find(entry(1, 0).key), c) == doctest::Approx(0.2));
        CHECK(select_victim(twenty, c) == entry(1, 0).key);
    }
}
