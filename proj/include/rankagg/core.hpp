#pragma once

// Element universe, rankings, and power-of-two padding.
//
// A universe interns its labels once and is immutable afterwards; every
// Ranking constructed against it is a full permutation of the padded id
// range [0, N) with 1-based positions. Padding ids sit at the tail of every
// input ranking, so they carry no displacement cost of their own.

#include <cassert>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace rankagg {

using ElementId = std::int32_t;  // dense index in [0, padded_count)
using Rank = std::int32_t;       // 1-based position

enum class Errc {
    DuplicateLabel,
    EmptyUniverse,
    NotAPermutation,
    UniverseMismatch,
    RankOutOfRange,
    PhiOutOfRange,
    EmptyStream,
    ParseError,
    NonNumericGrade,
    RaggedRows,
    OracleTooLarge,
    Overflow,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
    throw Error(code, what);
}

// All counters and cost accumulators are 64-bit signed; wrapping is a hard error.
inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r)) fail(Errc::Overflow, "64-bit cost accumulator overflow");
    return r;
}

inline std::int32_t next_power_of_two(std::int32_t v) {
    std::int32_t p = 1;
    while (p < v) p <<= 1;
    return p;
}

class SymbolTable {
public:
    // Labels must be non-empty and unique. Ids are assigned in the given
    // order; ids [n, N) are reserved padding elements, N the smallest power
    // of two >= max(n, 2).
    static std::shared_ptr<const SymbolTable> intern(std::span<const std::string> labels) {
        if (labels.empty()) fail(Errc::EmptyUniverse, "universe needs at least one label");
        auto table = std::make_shared<SymbolTable>();
        table->n_ = static_cast<ElementId>(labels.size());
        table->padded_ = next_power_of_two(std::max<std::int32_t>(table->n_, 2));
        table->labels_.reserve(table->padded_);
        table->index_.reserve(labels.size());
        for (const auto& label : labels) {
            auto [it, fresh] = table->index_.emplace(label, static_cast<ElementId>(table->labels_.size()));
            if (!fresh) fail(Errc::DuplicateLabel, "duplicate label '" + label + "'");
            table->labels_.push_back(label);
        }
        for (ElementId e = table->n_; e < table->padded_; ++e)
            table->labels_.push_back("~pad" + std::to_string(e));
        return table;
    }

    ElementId real_count() const { return n_; }
    ElementId padded_count() const { return padded_; }
    bool is_dummy(ElementId e) const { return e >= n_; }

    const std::string& label(ElementId e) const {
        assert(e >= 0 && e < padded_);
        return labels_[e];
    }

    std::optional<ElementId> find(const std::string& label) const {
        auto it = index_.find(label);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    // Universes are value-equal when they intern the same labels in the same
    // order (a snapshot reload builds a fresh but equal table).
    friend bool operator==(const SymbolTable& a, const SymbolTable& b) {
        return a.n_ == b.n_ && a.labels_ == b.labels_;
    }

private:
    std::vector<std::string> labels_;
    std::unordered_map<std::string, ElementId> index_;  // real labels only
    ElementId n_ = 0;
    ElementId padded_ = 0;
};

class Ranking {
public:
    Ranking() = default;

    // real_order must be a permutation of [0, n); padding ids are appended in
    // id order so they occupy positions n+1..N in every input ranking.
    static Ranking from_real_order(std::shared_ptr<const SymbolTable> table,
                                   std::span<const ElementId> real_order) {
        const ElementId n = table->real_count();
        if (static_cast<ElementId>(real_order.size()) != n)
            fail(Errc::NotAPermutation,
                 "expected " + std::to_string(n) + " labels, got " + std::to_string(real_order.size()));
        Ranking r;
        r.table_ = std::move(table);
        const ElementId padded = r.table_->padded_count();
        r.order_.reserve(padded);
        std::vector<bool> seen(static_cast<std::size_t>(n), false);
        for (ElementId e : real_order) {
            if (e < 0 || e >= n || seen[static_cast<std::size_t>(e)])
                fail(Errc::NotAPermutation, "ids do not form a permutation of the universe");
            seen[static_cast<std::size_t>(e)] = true;
            r.order_.push_back(e);
        }
        for (ElementId e = n; e < padded; ++e) r.order_.push_back(e);
        r.rebuild_positions();
        return r;
    }

    static Ranking from_labels(std::shared_ptr<const SymbolTable> table,
                               std::span<const std::string> labels_in_order) {
        std::vector<ElementId> ids;
        ids.reserve(labels_in_order.size());
        for (const auto& label : labels_in_order) {
            auto id = table->find(label);
            if (!id) fail(Errc::NotAPermutation, "unknown label '" + label + "'");
            ids.push_back(*id);
        }
        return from_real_order(std::move(table), ids);
    }

    // order must be a permutation of the full padded range [0, N).
    static Ranking from_padded_order(std::shared_ptr<const SymbolTable> table,
                                     std::span<const ElementId> order) {
        const ElementId padded = table->padded_count();
        if (static_cast<ElementId>(order.size()) != padded)
            fail(Errc::NotAPermutation, "padded order has wrong length");
        Ranking r;
        r.table_ = std::move(table);
        r.order_.assign(order.begin(), order.end());
        std::vector<bool> seen(static_cast<std::size_t>(padded), false);
        for (ElementId e : r.order_) {
            if (e < 0 || e >= padded || seen[static_cast<std::size_t>(e)])
                fail(Errc::NotAPermutation, "ids do not form a permutation of the padded universe");
            seen[static_cast<std::size_t>(e)] = true;
        }
        r.rebuild_positions();
        return r;
    }

    static Ranking padded_identity(std::shared_ptr<const SymbolTable> table) {
        std::vector<ElementId> ids(static_cast<std::size_t>(table->real_count()));
        for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<ElementId>(i);
        return from_real_order(std::move(table), ids);
    }

    Rank rank_of(ElementId e) const { return position_[static_cast<std::size_t>(e)]; }
    ElementId at_rank(Rank r) const { return order_[static_cast<std::size_t>(r - 1)]; }
    std::int32_t size() const { return static_cast<std::int32_t>(order_.size()); }

    const std::vector<ElementId>& order() const { return order_; }
    const std::vector<Rank>& positions() const { return position_; }
    const std::shared_ptr<const SymbolTable>& table() const { return table_; }

    bool same_universe(const Ranking& other) const { return table_ == other.table_; }

    std::vector<std::string> real_labels() const {
        std::vector<std::string> out;
        out.reserve(static_cast<std::size_t>(table_->real_count()));
        for (ElementId e : order_)
            if (!table_->is_dummy(e)) out.push_back(table_->label(e));
        return out;
    }

    friend bool operator==(const Ranking& a, const Ranking& b) {
        return a.order_ == b.order_ && (a.table_ == b.table_ || *a.table_ == *b.table_);
    }

private:
    void rebuild_positions() {
        position_.assign(order_.size(), 0);
        for (std::size_t i = 0; i < order_.size(); ++i)
            position_[static_cast<std::size_t>(order_[i])] = static_cast<Rank>(i + 1);
    }

    std::shared_ptr<const SymbolTable> table_;
    std::vector<ElementId> order_;
    std::vector<Rank> position_;
};

inline void require_same_universe(const Ranking& a, const Ranking& b) {
    if (!a.same_universe(b)) fail(Errc::UniverseMismatch, "rankings belong to different universes");
}

}  // namespace rankagg
