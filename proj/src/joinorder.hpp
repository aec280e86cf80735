#pragma once

#include <algorithm>
#include <memory>
#include <string>
#include <vector>

namespace mqp {

// Scope index reserved for a nested sub-plan standing in as a single relation
// during incremental re-planning.  It renders as 'v' in map keys.
inline constexpr int kViewIndex = 100;

inline char index_char(int index) {
    if (index == kViewIndex) return 'v';
    return static_cast<char>('0' + index);
}

// A binary join tree.  Leaves carry a table index; internal nodes join their
// children.  Nodes are immutable and shared between plan-map entries.
struct JoinOrderNode {
    int table = -1;  // >= 0 for leaves
    std::shared_ptr<const JoinOrderNode> left;
    std::shared_ptr<const JoinOrderNode> right;
    std::vector<int> tables;  // sorted indices covered by this subtree
    bool wrapped = false;     // render parenthesized even at top level (views)

    bool is_leaf() const { return table >= 0; }
};

using JoinOrderPtr = std::shared_ptr<const JoinOrderNode>;

inline JoinOrderPtr make_leaf(int index) {
    auto n = std::make_shared<JoinOrderNode>();
    n->table = index;
    n->tables = {index};
    return n;
}

// A sub-plan standing in as one relation: same tree, but it renders inside
// its own parentheses wherever it appears.
inline JoinOrderPtr make_view(const JoinOrderPtr& subtree) {
    auto n = std::make_shared<JoinOrderNode>(*subtree);
    n->wrapped = true;
    return n;
}

inline JoinOrderPtr make_join(JoinOrderPtr left, JoinOrderPtr right) {
    auto n = std::make_shared<JoinOrderNode>();
    n->left = std::move(left);
    n->right = std::move(right);
    n->tables = n->left->tables;
    n->tables.insert(n->tables.end(), n->right->tables.begin(), n->right->tables.end());
    std::sort(n->tables.begin(), n->tables.end());
    return n;
}

// Renders "0(((12)3)4)"-style order strings: a leaf is its index character
// and a child is parenthesized exactly when it is itself a join.  A wrapped
// node carries its own parentheses everywhere, including top level.
inline std::string render_order(const JoinOrderNode& node) {
    std::string s;
    if (node.is_leaf()) {
        s = std::string(1, index_char(node.table));
    } else {
        auto side = [](const JoinOrderNode& child) {
            std::string part = render_order(child);
            if (!child.is_leaf() && !child.wrapped) part = "(" + part + ")";
            return part;
        };
        s = side(*node.left) + side(*node.right);
    }
    if (node.wrapped) s = "(" + s + ")";
    return s;
}

inline std::string render_order(const JoinOrderPtr& node) { return render_order(*node); }

// Map key for a set of scope indices: index characters in ascending order.
inline std::string key_of(std::vector<int> indices) {
    std::string key;
    std::sort(indices.begin(), indices.end());
    for (int i : indices) key.push_back(index_char(i));
    return key;
}

}  // namespace mqp
