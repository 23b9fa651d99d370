#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "toolcache/model.hpp"

namespace toolcache {

// The three grouping dimensions of one request.
struct GroupFeatures {
    std::string tool;
    std::optional<std::string> category;
    std::string user;

    bool operator==(const GroupFeatures&) const = default;
};

struct BufferedRequest {
    GroupFeatures features;
    bool hit = false;
    double value = 0.0;
};

struct GroupingState {
    GroupNode root;
    // Sliding window of the last B cacheable requests.
    std::deque<BufferedRequest> buffer;
    std::uint64_t request_counter = 0;
    std::uint64_t round = 0;  // admission decision rounds (t)
    bool warmup_active = true;
};

// Deepest existing node covering the request. Unseen tools get a fresh
// level-1 node; nothing else is created.
GroupNode& locate_group(GroupingState& state, const GroupFeatures& f);

// Rebuilds the tree from the buffered window. A node splits on the next
// dimension when it saw at least T1 requests with hit ratio at most H^r;
// subgroups smaller than S_min stay with their parent. Bandit counters start
// from zero and warm-up ends.
void regroup(GroupingState& state, const PolicyConfig& cfg);

// Updates the covering node with one cacheable request and appends it to
// the window.
void record_outcome(GroupingState& state, const GroupFeatures& f, bool hit, double value, const PolicyConfig& cfg);

// Counts one incoming request; regroups every B requests. Returns true when
// a regroup happened.
bool count_request(GroupingState& state, const PolicyConfig& cfg);

// Nodes currently acting as bandit arms, in depth-first label order.
std::vector<GroupNode*> collect_arms(GroupNode& root);
std::vector<const GroupNode*> collect_arms(const GroupNode& root);

}  // namespace toolcache
