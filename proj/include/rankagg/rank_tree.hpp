#pragma once

// Per-element value-indexed counter trees answering "sum of |j - p| over all
// positions p the element has occupied" in O(log n).
//
// Each element gets an implicit balanced BST over the values 1..N: the node
// for interval [a, b] holds value floor((a+b)/2) and its children cover
// [a, value-1] and [value+1, b]. A node stores how often its own value was
// seen (repetition) plus subtree totals (size, sum). Storage is one flat
// buffer indexed by value; navigation is interval arithmetic.

#include <string>
#include <vector>

#include "rankagg/core.hpp"

namespace rankagg {

class RankForest {
public:
    struct Node {
        std::int64_t repetition = 0;
        std::int64_t size = 0;
        std::int64_t sum = 0;
    };

    RankForest(std::int32_t element_count, std::int32_t value_count)
        : elements_(element_count),
          values_(value_count),
          nodes_(static_cast<std::size_t>(element_count) * static_cast<std::size_t>(value_count)) {}

    void update(ElementId e, Rank j) {
        check_rank(j);
        Node* tree = nodes_.data() + tree_offset(e);
        Rank lo = 1, hi = values_;
        for (;;) {
            const Rank v = (lo + hi) >> 1;
            Node& node = tree[v - 1];
            node.size += 1;
            node.sum += j;
            if (v == j) {
                node.repetition += 1;
                return;
            }
            if (j < v) hi = v - 1;
            else lo = v + 1;
        }
    }

    void absorb(const Ranking& pi) {
        for (ElementId e = 0; e < elements_; ++e) update(e, pi.rank_of(e));
    }

    // Sum over all stored occurrences p of |j - p|. Along the search path the
    // four running terms collect the positions above j (c11 their sum, c12
    // their count) and below j (c21, c22); occurrences at j itself cost zero.
    std::int64_t cost(ElementId e, Rank j) const {
        check_rank(j);
        const Node* tree = nodes_.data() + tree_offset(e);
        std::int64_t c11 = 0, c12 = 0, c21 = 0, c22 = 0;
        Rank lo = 1, hi = values_;
        for (;;) {
            const Rank v = (lo + hi) >> 1;
            const Node& node = tree[v - 1];
            if (v == j) {
                if (v + 1 <= hi) {
                    const Node& rc = tree[child_index(v + 1, hi)];
                    c11 += rc.sum;
                    c12 += rc.size;
                }
                if (lo <= v - 1) {
                    const Node& lc = tree[child_index(lo, v - 1)];
                    c21 += lc.sum;
                    c22 += lc.size;
                }
                break;
            }
            if (v < j) {
                c21 += node.repetition * static_cast<std::int64_t>(v);
                c22 += node.repetition;
                if (lo <= v - 1) {
                    const Node& lc = tree[child_index(lo, v - 1)];
                    c21 += lc.sum;
                    c22 += lc.size;
                }
                lo = v + 1;
            } else {
                c11 += node.repetition * static_cast<std::int64_t>(v);
                c12 += node.repetition;
                if (v + 1 <= hi) {
                    const Node& rc = tree[child_index(v + 1, hi)];
                    c11 += rc.sum;
                    c12 += rc.size;
                }
                hi = v - 1;
            }
        }
        const std::int64_t out = (c11 - c21) + static_cast<std::int64_t>(j) * (c22 - c12);
        assert(out >= 0);  // a negative value means corrupted counters
        return out;
    }

    // Footrule distance from pi to every absorbed ranking, O(n log n).
    std::int64_t distance(const Ranking& pi) const {
        if (pi.size() != values_) fail(Errc::UniverseMismatch, "ranking size does not match forest");
        std::int64_t total = 0;
        for (ElementId e = 0; e < elements_; ++e)
            total = checked_add(total, cost(e, pi.rank_of(e)));
        return total;
    }

    std::int64_t repetition_at(ElementId e, Rank v) const { return node_at(e, v).repetition; }
    std::int64_t size_at(ElementId e, Rank v) const { return node_at(e, v).size; }
    std::int64_t sum_at(ElementId e, Rank v) const { return node_at(e, v).sum; }

    // Value held by the subtree root of [1, N].
    Rank root_value() const { return (1 + values_) >> 1; }

    std::int32_t element_count() const { return elements_; }
    std::int32_t value_count() const { return values_; }

    std::vector<Node>& nodes() { return nodes_; }
    const std::vector<Node>& nodes() const { return nodes_; }

private:
    static std::size_t child_index(Rank a, Rank b) { return static_cast<std::size_t>(((a + b) >> 1) - 1); }

    const Node& node_at(ElementId e, Rank v) const {
        check_rank(v);
        return nodes_[tree_offset(e) + static_cast<std::size_t>(v - 1)];
    }

    void check_rank(Rank j) const {
        if (j < 1 || j > values_)
            fail(Errc::RankOutOfRange, "rank " + std::to_string(j) + " outside [1, " + std::to_string(values_) + "]");
    }

    std::size_t tree_offset(ElementId e) const {
        assert(e >= 0 && e < elements_);
        return static_cast<std::size_t>(e) * static_cast<std::size_t>(values_);
    }

    std::int32_t elements_;
    std::int32_t values_;
    std::vector<Node> nodes_;
};

}  // namespace rankagg
