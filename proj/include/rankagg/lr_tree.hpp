#pragma once

// Per-element presence counters over dyadic rank intervals.
//
// Each element owns a complete binary tree with one leaf per rank position.
// A node covering [a, b] counts how many absorbed rankings placed the element
// inside [a, b]; absorbing a ranking increments the root-to-leaf path of the
// element's rank, log2(N) + 1 counters per element. Trees are flat arrays in
// heap order (node u has children 2u+1 and 2u+2), one contiguous buffer for
// the whole forest.

#include <span>
#include <string>
#include <vector>

#include "rankagg/core.hpp"

namespace rankagg {

class LrForest {
public:
    LrForest(std::int32_t element_count, std::int32_t leaf_count)
        : elements_(element_count),
          leaves_(leaf_count),
          nodes_per_tree_(2 * leaf_count - 1),
          presence_(static_cast<std::size_t>(element_count) * static_cast<std::size_t>(nodes_per_tree_), 0) {
        assert(leaf_count >= 2 && (leaf_count & (leaf_count - 1)) == 0);
    }

    static constexpr std::int32_t root() { return 0; }
    static constexpr std::int32_t left_child(std::int32_t u) { return 2 * u + 1; }
    static constexpr std::int32_t right_child(std::int32_t u) { return 2 * u + 2; }
    bool is_leaf(std::int32_t u) const { return u >= leaves_ - 1; }

    void update(ElementId e, Rank rank) {
        if (rank < 1 || rank > leaves_)
            fail(Errc::RankOutOfRange, "rank " + std::to_string(rank) + " outside [1, " + std::to_string(leaves_) + "]");
        std::int64_t* tree = presence_.data() + tree_offset(e);
        std::int32_t u = 0;
        Rank lo = 1, hi = leaves_;
        ++tree[u];
        while (lo < hi) {
            const Rank mid = (lo + hi) >> 1;
            if (rank <= mid) {
                u = left_child(u);
                hi = mid;
            } else {
                u = right_child(u);
                lo = mid + 1;
            }
            ++tree[u];
        }
    }

    void absorb(const Ranking& pi) {
        for (ElementId e = 0; e < elements_; ++e) update(e, pi.rank_of(e));
    }

    std::int64_t presence(ElementId e, std::int32_t node) const {
        assert(node >= 0 && node < nodes_per_tree_);
        return presence_[tree_offset(e) + static_cast<std::size_t>(node)];
    }

    std::int64_t root_presence(ElementId e) const { return presence(e, root()); }

    // lp(e): how often e landed in the left half, the score at the root.
    std::int64_t root_score(ElementId e) const { return presence(e, left_child(root())); }

    std::int32_t element_count() const { return elements_; }
    std::int32_t leaf_count() const { return leaves_; }
    std::int32_t node_count() const { return nodes_per_tree_; }

    std::span<const std::int64_t> counters() const { return presence_; }
    std::span<std::int64_t> counters() { return presence_; }

private:
    std::size_t tree_offset(ElementId e) const {
        assert(e >= 0 && e < elements_);
        return static_cast<std::size_t>(e) * static_cast<std::size_t>(nodes_per_tree_);
    }

    std::int32_t elements_;
    std::int32_t leaves_;
    std::int32_t nodes_per_tree_;
    std::vector<std::int64_t> presence_;
};

// Score of the node just stepped to, from its parent's score. The score of a
// node u is the element's presence in [1, right end of u's left subtree], so
// stepping left removes the new right child's interval and stepping right
// adds the new left child's. `child` must be an internal node.
inline std::int64_t child_score(const LrForest& forest, ElementId e, std::int64_t parent_score,
                                std::int32_t child, bool went_left) {
    assert(!forest.is_leaf(child));
    if (went_left) return parent_score - forest.presence(e, LrForest::right_child(child));
    return parent_score + forest.presence(e, LrForest::left_child(child));
}

}  // namespace rankagg
