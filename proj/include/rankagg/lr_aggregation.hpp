#pragma once

// Recursive median-score reordering of the aggregation array.
//
// After absorbing a new ranking into the presence forest, every element's
// score starts at the root (its left-half presence) and the array is refined
// level by level: each power-of-two block moves its top half of scores to the
// front, then cursors step one level down and scores are patched in O(1) per
// entry. Blocks at one level never exchange entries afterwards, so iterating
// levels over the whole array is equivalent to the per-block recursion.

#include <algorithm>
#include <span>
#include <vector>

#include "rankagg/core.hpp"
#include "rankagg/lr_tree.hpp"

namespace rankagg {

// How a block is rearranged around its median score. Both policies move the
// same set of entries to the front half (ties filled in current order).
//   Select: order-preserving selection, both halves keep their previous
//           relative order. O(len) per block.
//   Sort:   stable sort by descending score, so each half is additionally
//           ordered by score. Costs an extra log factor and resolves later
//           ties differently.
enum class TiePolicy { Select, Sort };

struct AggEntry {
    ElementId element = 0;
    std::int32_t cursor = 0;  // current node in this element's tree
    std::int64_t score = 0;
};

// Moves the ceil(len/2) highest-scoring entries to the front of the block.
// Entries tied at the threshold are taken in current order until the front
// half is full; under Select both halves keep current relative order.
inline void partition_by_score(std::span<AggEntry> block, TiePolicy policy,
                               std::vector<AggEntry>& scratch, std::vector<std::int64_t>& keys) {
    const std::size_t len = block.size();
    const std::size_t half = len / 2;
    if (policy == TiePolicy::Sort) {
        std::stable_sort(block.begin(), block.end(),
                         [](const AggEntry& a, const AggEntry& b) { return a.score > b.score; });
        return;
    }
    keys.resize(len);
    for (std::size_t i = 0; i < len; ++i) keys[i] = block[i].score;
    std::nth_element(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(half - 1), keys.end(),
                     std::greater<>());
    const std::int64_t threshold = keys[half - 1];

    std::size_t strictly_greater = 0;
    for (const AggEntry& entry : block)
        if (entry.score > threshold) ++strictly_greater;
    std::size_t equal_quota = half - strictly_greater;

    scratch.resize(len);
    std::size_t front = 0, back = half;
    for (const AggEntry& entry : block) {
        bool take = entry.score > threshold;
        if (!take && entry.score == threshold && equal_quota > 0) {
            take = true;
            --equal_quota;
        }
        scratch[take ? front++ : back++] = entry;
    }
    std::copy(scratch.begin(), scratch.end(), block.begin());
}

class LrAggregation {
public:
    explicit LrAggregation(std::int32_t padded_count) : entries_(static_cast<std::size_t>(padded_count)) {
        for (std::size_t i = 0; i < entries_.size(); ++i)
            entries_[i].element = static_cast<ElementId>(i);  // id order before any ranking
    }

    // Absorb pi into the forest, then recompute the aggregated order.
    void step(LrForest& forest, const Ranking& pi, TiePolicy policy) {
        forest.absorb(pi);
        reorder(forest, policy);
    }

    void reorder(const LrForest& forest, TiePolicy policy) {
        const std::int32_t n = static_cast<std::int32_t>(entries_.size());
        for (AggEntry& entry : entries_) {
            entry.cursor = LrForest::root();
            entry.score = forest.root_score(entry.element);
        }
        for (std::int32_t len = n; len >= 2; len >>= 1) {
            for (std::int32_t lo = 0; lo < n; lo += len) {
                partition_by_score(std::span<AggEntry>(entries_.data() + lo, static_cast<std::size_t>(len)),
                                   policy, scratch_, keys_);
                if (len > 2) descend(forest, lo, len);
            }
        }
    }

    Ranking ranking(std::shared_ptr<const SymbolTable> table) const {
        std::vector<ElementId> order(entries_.size());
        for (std::size_t i = 0; i < entries_.size(); ++i) order[i] = entries_[i].element;
        return Ranking::from_padded_order(std::move(table), order);
    }

    std::span<const AggEntry> entries() const { return entries_; }

    void set_order(std::span<const ElementId> order) {
        assert(order.size() == entries_.size());
        for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] = AggEntry{order[i], 0, 0};
    }

private:
    void descend(const LrForest& forest, std::int32_t lo, std::int32_t len) {
        const std::int32_t half = len / 2;
        for (std::int32_t i = lo; i < lo + half; ++i) {
            AggEntry& entry = entries_[static_cast<std::size_t>(i)];
            entry.cursor = LrForest::left_child(entry.cursor);
            entry.score = child_score(forest, entry.element, entry.score, entry.cursor, true);
            assert(entry.score >= 0);
        }
        for (std::int32_t i = lo + half; i < lo + len; ++i) {
            AggEntry& entry = entries_[static_cast<std::size_t>(i)];
            entry.cursor = LrForest::right_child(entry.cursor);
            entry.score = child_score(forest, entry.element, entry.score, entry.cursor, false);
        }
    }

    std::vector<AggEntry> entries_;
    std::vector<AggEntry> scratch_;
    std::vector<std::int64_t> keys_;
};

}  // namespace rankagg
