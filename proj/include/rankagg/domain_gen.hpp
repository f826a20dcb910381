#pragma once

// Synthetic ranking streams: uniform draws, pair-aligned biased draws, and
// repeated-insertion sampling around a reference. All models run off the
// pinned generator, so a (model, parameters, seed) triple reproduces the same
// stream anywhere. Dispersion weights use repeated multiplication rather than
// pow() to keep the float path identical across libms.

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rankagg/core.hpp"
#include "rankagg/rng.hpp"

namespace rankagg {

enum class GenModel { Uniform, Biased, Mallows };

struct GenSpec {
    GenModel model = GenModel::Uniform;
    std::int32_t n = 0;
    std::int64_t m = 0;
    std::uint64_t seed = 0;
    std::optional<std::int64_t> k;    // Biased: pair alignments per ranking
    std::optional<double> phi;        // Mallows dispersion in (0, 1]
    std::optional<Ranking> base;      // Biased base / Mallows reference; id order if absent
    bool redraw_pairs_each_ranking = true;  // false: one fixed pair set for the whole stream
};

class DomainGenerator {
public:
    explicit DomainGenerator(GenSpec spec) : spec_(std::move(spec)), rng_(spec_.seed) {
        if (spec_.n < 1) fail(Errc::ParseError, "generator needs n >= 1");
        if (spec_.m < 1) fail(Errc::ParseError, "generator needs m >= 1");
        if (spec_.model == GenModel::Biased && !spec_.k)
            fail(Errc::ParseError, "biased model needs k");
        if (spec_.model == GenModel::Mallows) {
            if (!spec_.phi) fail(Errc::ParseError, "mallows model needs phi");
            if (!(*spec_.phi > 0.0 && *spec_.phi <= 1.0))
                fail(Errc::PhiOutOfRange, "phi must be in (0, 1]");
        }
        table_ = spec_.base ? spec_.base->table() : numbered_universe(spec_.n);
        if (static_cast<std::int32_t>(table_->real_count()) != spec_.n)
            fail(Errc::UniverseMismatch, "base ranking size does not match n");
        base_real_order_.resize(static_cast<std::size_t>(spec_.n));
        if (spec_.base) {
            std::size_t i = 0;
            for (ElementId e : spec_.base->order())
                if (!table_->is_dummy(e)) base_real_order_[i++] = e;
        } else {
            for (std::int32_t i = 0; i < spec_.n; ++i) base_real_order_[static_cast<std::size_t>(i)] = i;
        }
        if (spec_.model == GenModel::Biased && !spec_.redraw_pairs_each_ranking) {
            fixed_pairs_.reserve(static_cast<std::size_t>(*spec_.k));
            for (std::int64_t t = 0; t < *spec_.k; ++t) fixed_pairs_.push_back(draw_pair());
        }
    }

    // Labels "1".."n".
    static std::shared_ptr<const SymbolTable> numbered_universe(std::int32_t n) {
        std::vector<std::string> labels(static_cast<std::size_t>(n));
        for (std::int32_t i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = std::to_string(i + 1);
        return SymbolTable::intern(labels);
    }

    const std::shared_ptr<const SymbolTable>& table() const { return table_; }
    const GenSpec& spec() const { return spec_; }

    std::optional<Ranking> next() {
        if (produced_ >= spec_.m) return std::nullopt;
        ++produced_;
        switch (spec_.model) {
            case GenModel::Uniform: emit_uniform(); break;
            case GenModel::Biased: emit_biased(); break;
            case GenModel::Mallows: emit_mallows(); break;
        }
        return Ranking::from_real_order(table_, order_);
    }

private:
    void emit_uniform() {
        order_.resize(static_cast<std::size_t>(spec_.n));
        for (std::int32_t i = 0; i < spec_.n; ++i) order_[static_cast<std::size_t>(i)] = i;
        for (std::int32_t i = spec_.n - 1; i > 0; --i) {
            const auto j = static_cast<std::size_t>(rng_.below(static_cast<std::uint64_t>(i) + 1));
            std::swap(order_[static_cast<std::size_t>(i)], order_[j]);
        }
    }

    std::pair<ElementId, ElementId> draw_pair() {
        const auto a = static_cast<ElementId>(rng_.below(static_cast<std::uint64_t>(spec_.n)));
        auto b = static_cast<ElementId>(rng_.below(static_cast<std::uint64_t>(spec_.n) - 1));
        if (b >= a) ++b;
        return {a, b};
    }

    // Uniform draw, then k pair alignments: whenever a drawn pair disagrees
    // with the base order, the two elements swap positions.
    void emit_biased() {
        emit_uniform();
        pos_.assign(static_cast<std::size_t>(spec_.n), 0);
        for (std::int32_t i = 0; i < spec_.n; ++i)
            pos_[static_cast<std::size_t>(order_[static_cast<std::size_t>(i)])] = i;
        base_pos_.assign(static_cast<std::size_t>(spec_.n), 0);
        for (std::int32_t i = 0; i < spec_.n; ++i)
            base_pos_[static_cast<std::size_t>(base_real_order_[static_cast<std::size_t>(i)])] = i;
        const std::int64_t k = *spec_.k;
        for (std::int64_t t = 0; t < k; ++t) {
            const auto [a, b] = spec_.redraw_pairs_each_ranking ? draw_pair()
                                                                : fixed_pairs_[static_cast<std::size_t>(t)];
            const bool base_a_first = base_pos_[static_cast<std::size_t>(a)] < base_pos_[static_cast<std::size_t>(b)];
            const bool cur_a_first = pos_[static_cast<std::size_t>(a)] < pos_[static_cast<std::size_t>(b)];
            if (base_a_first != cur_a_first) {
                std::swap(order_[static_cast<std::size_t>(pos_[static_cast<std::size_t>(a)])],
                          order_[static_cast<std::size_t>(pos_[static_cast<std::size_t>(b)])]);
                std::swap(pos_[static_cast<std::size_t>(a)], pos_[static_cast<std::size_t>(b)]);
            }
        }
    }

    // Repeated insertion: the i-th reference item lands j slots before the end
    // of the current prefix with weight phi^j. phi = 1 takes an exact integer
    // path; phi -> 0 collapses onto the reference itself.
    void emit_mallows() {
        const double phi = *spec_.phi;
        order_.clear();
        order_.reserve(static_cast<std::size_t>(spec_.n));
        for (std::int32_t i = 1; i <= spec_.n; ++i) {
            std::int32_t slot;  // insertion index in [0, i), i-1 keeps reference order
            if (phi == 1.0) {
                slot = static_cast<std::int32_t>(rng_.below(static_cast<std::uint64_t>(i)));
            } else {
                double total = 0.0, w = 1.0;
                for (std::int32_t t = 0; t < i; ++t) {
                    total += w;
                    w *= phi;
                }
                double u = rng_.unit() * total;
                slot = i - 1;
                w = 1.0;
                for (std::int32_t t = 0; t < i; ++t) {
                    if (u < w) {
                        slot = i - 1 - t;
                        break;
                    }
                    u -= w;
                    w *= phi;
                }
            }
            order_.insert(order_.begin() + slot, base_real_order_[static_cast<std::size_t>(i - 1)]);
        }
    }

    GenSpec spec_;
    std::shared_ptr<const SymbolTable> table_;
    SplitMix64 rng_;
    std::int64_t produced_ = 0;
    std::vector<ElementId> base_real_order_;
    std::vector<std::pair<ElementId, ElementId>> fixed_pairs_;
    std::vector<ElementId> order_;
    std::vector<std::int32_t> pos_;
    std::vector<std::int32_t> base_pos_;
};

}  // namespace rankagg
