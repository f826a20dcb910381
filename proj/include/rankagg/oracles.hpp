#pragma once

// Exact reference computations. These are deliberately direct: they exist to
// check the streaming structures, so they never share code with them.

#include <algorithm>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "rankagg/core.hpp"

namespace rankagg {

// The multiset of rankings received so far, all over one universe.
struct Domain {
    std::shared_ptr<const SymbolTable> table;
    std::vector<Ranking> rankings;

    explicit Domain(std::shared_ptr<const SymbolTable> t) : table(std::move(t)) {}

    void add(Ranking r) {
        if (r.table() != table) fail(Errc::UniverseMismatch, "ranking belongs to a different universe");
        rankings.push_back(std::move(r));
    }

    std::int64_t size() const { return static_cast<std::int64_t>(rankings.size()); }
};

// Spearman's footrule: total absolute rank displacement. Linear time.
inline std::int64_t footrule(const Ranking& a, const Ranking& b) {
    require_same_universe(a, b);
    std::int64_t total = 0;
    const auto& pa = a.positions();
    const auto& pb = b.positions();
    for (std::size_t e = 0; e < pa.size(); ++e)
        total += std::abs(static_cast<std::int64_t>(pa[e]) - static_cast<std::int64_t>(pb[e]));
    return total;
}

namespace detail {

inline std::int64_t count_inversions(std::vector<Rank>& v, std::vector<Rank>& tmp,
                                     std::size_t lo, std::size_t hi) {
    if (hi - lo <= 1) return 0;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::int64_t inv = count_inversions(v, tmp, lo, mid) + count_inversions(v, tmp, mid, hi);
    std::size_t i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
        if (v[i] <= v[j]) tmp[k++] = v[i++];
        else {
            inv += static_cast<std::int64_t>(mid - i);
            tmp[k++] = v[j++];
        }
    }
    while (i < mid) tmp[k++] = v[i++];
    while (j < hi) tmp[k++] = v[j++];
    std::copy(tmp.begin() + static_cast<std::ptrdiff_t>(lo), tmp.begin() + static_cast<std::ptrdiff_t>(hi),
              v.begin() + static_cast<std::ptrdiff_t>(lo));
    return inv;
}

}  // namespace detail

// Kendall-tau: discordant pairs, counted as inversions in O(n log n).
inline std::int64_t kendall_tau(const Ranking& a, const Ranking& b) {
    require_same_universe(a, b);
    std::vector<Rank> seq(a.order().size());
    for (std::size_t i = 0; i < seq.size(); ++i) seq[i] = b.rank_of(a.order()[i]);
    std::vector<Rank> tmp(seq.size());
    return detail::count_inversions(seq, tmp, 0, seq.size());
}

// The recursive two-sided count evaluated literally: at each dyadic split of
// a's positions, count a's elements from [1, mid] that b places in [mid+1, N]
// and vice versa, then recurse into both halves. Equals footrule on complete
// rankings; kept naive as an independent cross-check of that identity.
inline std::int64_t lr_distance_reference(const Ranking& a, const Ranking& b) {
    require_same_universe(a, b);
    const std::int32_t n = a.size();
    assert((n & (n - 1)) == 0);
    const auto& order_a = a.order();
    const auto& pos_b = b.positions();

    struct Rec {
        const std::vector<ElementId>& order_a;
        const std::vector<Rank>& pos_b;
        std::int32_t n;
        std::int64_t run(Rank lo, Rank hi) const {
            if (lo >= hi) return 0;
            const Rank mid = (lo + hi) >> 1;
            std::int64_t cross = 0;
            for (Rank i = 1; i <= mid; ++i)
                if (pos_b[static_cast<std::size_t>(order_a[static_cast<std::size_t>(i - 1)])] > mid) ++cross;
            for (Rank i = mid + 1; i <= n; ++i)
                if (pos_b[static_cast<std::size_t>(order_a[static_cast<std::size_t>(i - 1)])] <= mid) ++cross;
            return cross + run(lo, mid) + run(mid + 1, hi);
        }
    };
    return Rec{order_a, pos_b, n}.run(1, n);
}

inline std::int64_t footrule_to_domain(const Ranking& pi, const Domain& d) {
    std::int64_t total = 0;
    for (const Ranking& r : d.rankings) total = checked_add(total, footrule(pi, r));
    return total;
}

// Kept for reporting only; nothing in here optimizes it.
inline std::int64_t kendall_to_domain(const Ranking& pi, const Domain& d) {
    std::int64_t total = 0;
    for (const Ranking& r : d.rankings) total = checked_add(total, kendall_tau(pi, r));
    return total;
}

// Ranking induced by the per-element lower median position, when those
// medians are pairwise distinct. Placing every element at its median position
// is optimal, so a distinct-medians domain is solved outright.
inline std::optional<Ranking> median_position_aggregation(const Domain& d) {
    assert(d.size() >= 1);
    const ElementId padded = d.table->padded_count();
    const std::size_t m = d.rankings.size();
    std::vector<Rank> medians(static_cast<std::size_t>(padded));
    std::vector<Rank> scratch(m);
    for (ElementId e = 0; e < padded; ++e) {
        for (std::size_t i = 0; i < m; ++i) scratch[i] = d.rankings[i].rank_of(e);
        const std::size_t t = (m - 1) / 2;  // lower median
        std::nth_element(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(t), scratch.end());
        medians[static_cast<std::size_t>(e)] = scratch[t];
    }
    std::vector<bool> used(static_cast<std::size_t>(padded) + 1, false);
    for (ElementId e = 0; e < padded; ++e) {
        if (used[static_cast<std::size_t>(medians[static_cast<std::size_t>(e)])]) return std::nullopt;
        used[static_cast<std::size_t>(medians[static_cast<std::size_t>(e)])] = true;
    }
    std::vector<ElementId> by_median(static_cast<std::size_t>(padded));
    for (ElementId e = 0; e < padded; ++e) by_median[static_cast<std::size_t>(e)] = e;
    std::sort(by_median.begin(), by_median.end(), [&](ElementId x, ElementId y) {
        return medians[static_cast<std::size_t>(x)] < medians[static_cast<std::size_t>(y)];
    });
    return Ranking::from_padded_order(d.table, by_median);
}

// c[e][j-1] = summed displacement of element e if placed at rank j.
inline std::vector<std::vector<std::int64_t>> footrule_cost_matrix(const Domain& d) {
    const ElementId padded = d.table->padded_count();
    const std::int64_t m = d.size();
    std::vector<std::vector<std::int64_t>> cost(static_cast<std::size_t>(padded));
    std::vector<std::int64_t> count_le(static_cast<std::size_t>(padded) + 1);
    for (ElementId e = 0; e < padded; ++e) {
        std::fill(count_le.begin(), count_le.end(), 0);
        std::int64_t at_one = 0;
        for (const Ranking& r : d.rankings) {
            const Rank p = r.rank_of(e);
            ++count_le[static_cast<std::size_t>(p)];
            at_one = checked_add(at_one, p - 1);
        }
        for (std::size_t j = 1; j <= static_cast<std::size_t>(padded); ++j)
            count_le[j] += count_le[j - 1];
        auto& row = cost[static_cast<std::size_t>(e)];
        row.resize(static_cast<std::size_t>(padded));
        row[0] = at_one;
        for (std::size_t j = 1; j < static_cast<std::size_t>(padded); ++j)
            row[j] = checked_add(row[j - 1], 2 * count_le[j] - m);
    }
    return cost;
}

namespace detail {

// Minimum-cost perfect matching on a square integer matrix via shortest
// augmenting paths with potentials, cubic time. Returns column per row.
inline std::vector<std::int32_t> solve_assignment(const std::vector<std::vector<std::int64_t>>& cost) {
    const std::int32_t n = static_cast<std::int32_t>(cost.size());
    constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
    std::vector<std::int64_t> u(static_cast<std::size_t>(n) + 1, 0), v(static_cast<std::size_t>(n) + 1, 0);
    std::vector<std::int32_t> match(static_cast<std::size_t>(n) + 1, 0), way(static_cast<std::size_t>(n) + 1, 0);
    for (std::int32_t i = 1; i <= n; ++i) {
        match[0] = i;
        std::int32_t j0 = 0;
        std::vector<std::int64_t> minv(static_cast<std::size_t>(n) + 1, kInf);
        std::vector<bool> used(static_cast<std::size_t>(n) + 1, false);
        do {
            used[static_cast<std::size_t>(j0)] = true;
            const std::int32_t i0 = match[static_cast<std::size_t>(j0)];
            std::int64_t delta = kInf;
            std::int32_t j1 = 0;
            for (std::int32_t j = 1; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) continue;
                const std::int64_t cur = cost[static_cast<std::size_t>(i0 - 1)][static_cast<std::size_t>(j - 1)]
                                         - u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
                if (cur < minv[static_cast<std::size_t>(j)]) {
                    minv[static_cast<std::size_t>(j)] = cur;
                    way[static_cast<std::size_t>(j)] = j0;
                }
                if (minv[static_cast<std::size_t>(j)] < delta) {
                    delta = minv[static_cast<std::size_t>(j)];
                    j1 = j;
                }
            }
            for (std::int32_t j = 0; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) {
                    u[static_cast<std::size_t>(match[static_cast<std::size_t>(j)])] += delta;
                    v[static_cast<std::size_t>(j)] -= delta;
                } else {
                    minv[static_cast<std::size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (match[static_cast<std::size_t>(j0)] != 0);
        do {
            const std::int32_t j1 = way[static_cast<std::size_t>(j0)];
            match[static_cast<std::size_t>(j0)] = match[static_cast<std::size_t>(j1)];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<std::int32_t> row_to_col(static_cast<std::size_t>(n), -1);
    for (std::int32_t j = 1; j <= n; ++j)
        if (match[static_cast<std::size_t>(j)] != 0)
            row_to_col[static_cast<std::size_t>(match[static_cast<std::size_t>(j)] - 1)] = j - 1;
    return row_to_col;
}

}  // namespace detail

struct OptimalAggregation {
    Ranking ranking;
    std::int64_t cost = 0;
};

// Exact footrule-optimal aggregation via assignment of elements to ranks.
// Only the cost is unique; the returned ranking is one optimum, normalized so
// that padding elements sit at their fixed tail ranks (always possible
// without changing the cost, since moving a padding element home and the
// displaced element into its slot can never increase the total).
inline OptimalAggregation optimal_footrule(const Domain& d) {
    assert(d.size() >= 1);
    const ElementId padded = d.table->padded_count();
    const auto cost = footrule_cost_matrix(d);
    const auto row_to_col = detail::solve_assignment(cost);

    std::vector<ElementId> order(static_cast<std::size_t>(padded));
    for (ElementId e = 0; e < padded; ++e)
        order[static_cast<std::size_t>(row_to_col[static_cast<std::size_t>(e)])] = e;

    std::vector<Rank> pos(static_cast<std::size_t>(padded));
    for (std::size_t j = 0; j < order.size(); ++j)
        pos[static_cast<std::size_t>(order[j])] = static_cast<Rank>(j + 1);
    for (ElementId dummy = d.table->real_count(); dummy < padded; ++dummy) {
        const Rank home = dummy + 1;
        const Rank cur = pos[static_cast<std::size_t>(dummy)];
        if (cur == home) continue;
        const ElementId other = order[static_cast<std::size_t>(home - 1)];
        std::swap(order[static_cast<std::size_t>(cur - 1)], order[static_cast<std::size_t>(home - 1)]);
        pos[static_cast<std::size_t>(other)] = cur;
        pos[static_cast<std::size_t>(dummy)] = home;
    }

    std::int64_t total = 0;
    for (ElementId e = 0; e < padded; ++e)
        total = checked_add(total, cost[static_cast<std::size_t>(e)][static_cast<std::size_t>(pos[static_cast<std::size_t>(e)] - 1)]);
    return {Ranking::from_padded_order(d.table, order), total};
}

// Elements by ascending mean position, ties by id. The position analogue of
// sorting by grade average.
inline Ranking mean_position_aggregation(const Domain& d) {
    assert(d.size() >= 1);
    const ElementId padded = d.table->padded_count();
    std::vector<std::int64_t> sums(static_cast<std::size_t>(padded), 0);
    for (const Ranking& r : d.rankings)
        for (ElementId e = 0; e < padded; ++e)
            sums[static_cast<std::size_t>(e)] = checked_add(sums[static_cast<std::size_t>(e)], r.rank_of(e));
    std::vector<ElementId> order(static_cast<std::size_t>(padded));
    for (ElementId e = 0; e < padded; ++e) order[static_cast<std::size_t>(e)] = e;
    std::stable_sort(order.begin(), order.end(), [&](ElementId a, ElementId b) {
        return sums[static_cast<std::size_t>(a)] < sums[static_cast<std::size_t>(b)];
    });
    return Ranking::from_padded_order(d.table, order);
}

}  // namespace rankagg
