#include "toolcache/grouping.hpp"

#include <algorithm>
#include <map>

namespace toolcache {

namespace {

GroupNode* find_child(GroupNode& node, const std::string& label) {
    auto it = std::lower_bound(node.children.begin(), node.children.end(), label,
                               [](const GroupNode& c, const std::string& l) { return c.path.back() < l; });
    if (it != node.children.end() && it->path.back() == label) return &*it;
    return nullptr;
}

GroupNode& insert_child(GroupNode& node, const std::string& label) {
    auto it = std::lower_bound(node.children.begin(), node.children.end(), label,
                               [](const GroupNode& c, const std::string& l) { return c.path.back() < l; });
    GroupNode child;
    child.path = node.path;
    child.path.push_back(label);
    child.level = node.level + 1;
    return *node.children.insert(it, std::move(child));
}

// Label of `f` on the dimension that splits nodes at `level` (1-based).
const std::string* dimension_label(const GroupFeatures& f, int level) {
    switch (level) {
        case 1: return &f.tool;
        case 2: return f.category ? &*f.category : nullptr;
        case 3: return &f.user;
        default: return nullptr;
    }
}

void add_stats(GroupNode& node, const BufferedRequest& r) {
    ++node.access_count;
    ++node.member_count;
    if (r.hit) ++node.hit_count;
    node.value_sum += r.value;
}

void build(GroupNode& node, const std::vector<const BufferedRequest*>& members, const PolicyConfig& cfg) {
    std::uint64_t hits = 0;
    for (const auto* m : members) hits += m->hit ? 1 : 0;
    const auto f = static_cast<std::uint64_t>(members.size());
    const double hit_ratio = f == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(f);
    const bool split =
        node.level < cfg.max_group_level && f >= cfg.split_min_access && hit_ratio <= cfg.split_max_hit_ratio;

    if (!split) {
        for (const auto* m : members) add_stats(node, *m);
        return;
    }

    std::map<std::string, std::vector<const BufferedRequest*>> parts;
    for (const auto* m : members) {
        const std::string* label = dimension_label(m->features, node.level + 1);
        if (!label) {
            add_stats(node, *m);
            node.absorbs = true;
            continue;
        }
        parts[*label].push_back(m);
    }
    for (auto& [label, part] : parts) {
        if (part.size() < cfg.min_group_size) {
            for (const auto* m : part) add_stats(node, *m);
            node.absorbs = true;
            continue;
        }
        GroupNode& child = insert_child(node, label);
        build(child, part, cfg);
    }
}

template <typename Node, typename Out>
void collect(Node& node, Out& out) {
    if (node.is_arm()) out.push_back(&node);
    for (auto& c : node.children) collect(c, out);
}

}  // namespace

GroupNode& locate_group(GroupingState& state, const GroupFeatures& f) {
    GroupNode* node = find_child(state.root, f.tool);
    if (!node) return insert_child(state.root, f.tool);
    for (int level = 2; level <= 3 && !node->is_leaf(); ++level) {
        const std::string* label = dimension_label(f, level);
        if (!label) break;
        GroupNode* child = find_child(*node, *label);
        if (!child) break;
        node = child;
    }
    return *node;
}

void regroup(GroupingState& state, const PolicyConfig& cfg) {
    GroupNode root;
    std::map<std::string, std::vector<const BufferedRequest*>> by_tool;
    for (const auto& r : state.buffer) by_tool[r.features.tool].push_back(&r);
    // Every tool keeps its own level-1 group, however small: the root is not
    // an arm.
    for (auto& [tool, members] : by_tool) {
        GroupNode& child = insert_child(root, tool);
        build(child, members, cfg);
    }
    state.root = std::move(root);
    state.warmup_active = false;
}

void record_outcome(GroupingState& state, const GroupFeatures& f, bool hit, double value, const PolicyConfig& cfg) {
    BufferedRequest r{f, hit, value};
    GroupNode& node = locate_group(state, f);
    add_stats(node, r);
    if (!node.is_leaf()) node.absorbs = true;
    state.buffer.push_back(std::move(r));
    while (state.buffer.size() > cfg.regroup_interval) state.buffer.pop_front();
}

bool count_request(GroupingState& state, const PolicyConfig& cfg) {
    ++state.request_counter;
    if (state.request_counter % cfg.regroup_interval != 0) return false;
    regroup(state, cfg);
    return true;
}

std::vector<GroupNode*> collect_arms(GroupNode& root) {
    std::vector<GroupNode*> out;
    collect(root, out);
    return out;
}

std::vector<const GroupNode*> collect_arms(const GroupNode& root) {
    std::vector<const GroupNode*> out;
    collect(root, out);
    return out;
}

}  // namespace toolcache
