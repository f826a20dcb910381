#pragma once

// The streaming engine: one presence forest driving the aggregated order, one
// rank forest pricing candidates, one reservoir slot. Each push costs
// O(n log n) and state stays O(n^2) regardless of how many rankings arrived.
//
// A pushed ranking is absorbed in this order: aggregation step, rank-forest
// update, reservoir offer. Both candidates are then priced against the domain
// including the ranking that just arrived; the cheaper one wins, with ties
// going to the reservoir sample.

#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <string>

#include "rankagg/core.hpp"
#include "rankagg/lr_aggregation.hpp"
#include "rankagg/lr_tree.hpp"
#include "rankagg/rank_tree.hpp"
#include "rankagg/reservoir.hpp"

namespace rankagg {

enum class Winner { LR, PAP };

struct StepResult {
    std::int64_t m = 0;
    Ranking best;  // padding elements of best/lr/pap stay at their tail ranks
    Ranking lr;
    Ranking pap;
    std::int64_t lr_cost = 0;
    std::int64_t pap_cost = 0;
    Winner winner = Winner::PAP;

    friend bool operator==(const StepResult& a, const StepResult& b) {
        return a.m == b.m && a.best == b.best && a.lr == b.lr && a.pap == b.pap &&
               a.lr_cost == b.lr_cost && a.pap_cost == b.pap_cost && a.winner == b.winner;
    }
};

namespace detail {

inline void put_u64(std::ostream& out, std::uint64_t v) {
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(buf, 8);
}
inline void put_i64(std::ostream& out, std::int64_t v) { put_u64(out, static_cast<std::uint64_t>(v)); }
inline void put_u32(std::ostream& out, std::uint32_t v) {
    char buf[4];
    for (int i = 0; i < 4; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(buf, 4);
}

inline std::uint64_t get_u64(std::istream& in) {
    char buf[8];
    in.read(buf, 8);
    if (!in) fail(Errc::ParseError, "snapshot truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[i])) << (8 * i);
    return v;
}
inline std::int64_t get_i64(std::istream& in) { return static_cast<std::int64_t>(get_u64(in)); }
inline std::uint32_t get_u32(std::istream& in) {
    char buf[4];
    in.read(buf, 4);
    if (!in) fail(Errc::ParseError, "snapshot truncated");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[i])) << (8 * i);
    return v;
}

inline void put_string(std::ostream& out, const std::string& s) {
    put_u32(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}
inline std::string get_string(std::istream& in) {
    const std::uint32_t len = get_u32(in);
    std::string s(len, '\0');
    in.read(s.data(), static_cast<std::streamsize>(len));
    if (!in) fail(Errc::ParseError, "snapshot truncated");
    return s;
}

}  // namespace detail

class Aggregator {
public:
    struct Config {
        std::uint64_t seed = 0;
        TiePolicy tie_policy = TiePolicy::Select;
    };

    Aggregator(std::shared_ptr<const SymbolTable> table, Config config)
        : config_(config),
          table_(std::move(table)),
          lr_forest_(table_->padded_count(), table_->padded_count()),
          agg_(table_->padded_count()),
          rank_forest_(table_->padded_count(), table_->padded_count()),
          reservoir_(config.seed) {}

    explicit Aggregator(std::shared_ptr<const SymbolTable> table) : Aggregator(std::move(table), Config{}) {}

    Aggregator(std::span<const std::string> labels, Config config)
        : Aggregator(SymbolTable::intern(labels), config) {}

    explicit Aggregator(std::span<const std::string> labels) : Aggregator(labels, Config{}) {}

    StepResult push(std::span<const std::string> labels_in_order) {
        return push(Ranking::from_labels(table_, labels_in_order));
    }

    StepResult push(const Ranking& pi) {
        if (pi.table() != table_) fail(Errc::UniverseMismatch, "pushed ranking uses a different universe");
        const std::int64_t n = table_->padded_count();
        if (m_ >= (std::int64_t{1} << 62) / (n * n))
            fail(Errc::Overflow, "stream too long for 64-bit cost counters");

        agg_.step(lr_forest_, pi, config_.tie_policy);
        rank_forest_.absorb(pi);
        reservoir_.offer(pi);
        m_ += 1;
        refresh_result();
        if (observer_) observer_(*last_);
        return *last_;
    }

    const StepResult& current() const {
        if (!last_) fail(Errc::EmptyStream, "no ranking has been pushed yet");
        return *last_;
    }

    std::int64_t count() const { return m_; }
    const std::shared_ptr<const SymbolTable>& table() const { return table_; }
    TiePolicy tie_policy() const { return config_.tie_policy; }
    const RankForest& rank_forest() const { return rank_forest_; }
    const LrForest& lr_forest() const { return lr_forest_; }

    void set_step_observer(std::function<void(const StepResult&)> observer) {
        observer_ = std::move(observer);
    }

    // Resident counter and buffer footprint; a function of the universe size
    // only, never of how many rankings were absorbed.
    std::size_t state_bytes() const {
        const std::size_t n = static_cast<std::size_t>(table_->padded_count());
        std::size_t bytes = lr_forest_.counters().size() * sizeof(std::int64_t);
        bytes += rank_forest_.nodes().size() * sizeof(RankForest::Node);
        bytes += n * sizeof(AggEntry);                         // aggregation array
        bytes += 2 * n * sizeof(ElementId) + n * sizeof(Rank); // reservoir sample + scratch
        return bytes;
    }

    // Versioned snapshot; loading restores bit-identical subsequent behavior.
    void save(std::ostream& out) const {
        out.write(kMagic, 8);
        detail::put_u32(out, kVersion);
        detail::put_u32(out, config_.tie_policy == TiePolicy::Select ? 0u : 1u);
        detail::put_u64(out, config_.seed);
        detail::put_u32(out, static_cast<std::uint32_t>(table_->real_count()));
        for (ElementId e = 0; e < table_->real_count(); ++e) detail::put_string(out, table_->label(e));
        detail::put_i64(out, m_);
        for (std::int64_t c : lr_forest_.counters()) detail::put_i64(out, c);
        for (const RankForest::Node& node : rank_forest_.nodes()) {
            detail::put_i64(out, node.repetition);
            detail::put_i64(out, node.size);
            detail::put_i64(out, node.sum);
        }
        for (const AggEntry& entry : agg_.entries()) detail::put_u32(out, static_cast<std::uint32_t>(entry.element));
        detail::put_i64(out, reservoir_.seen());
        detail::put_u64(out, reservoir_.rng_state());
        detail::put_u32(out, reservoir_.sample() ? 1u : 0u);
        if (reservoir_.sample())
            for (ElementId e : reservoir_.sample()->order()) detail::put_u32(out, static_cast<std::uint32_t>(e));
    }

    static Aggregator load(std::istream& in) {
        char magic[8];
        in.read(magic, 8);
        if (!in || std::string(magic, 8) != kMagic) fail(Errc::ParseError, "not an engine snapshot");
        if (detail::get_u32(in) != kVersion) fail(Errc::ParseError, "unsupported snapshot version");
        Config config;
        config.tie_policy = detail::get_u32(in) == 0 ? TiePolicy::Select : TiePolicy::Sort;
        config.seed = detail::get_u64(in);
        const std::uint32_t n = detail::get_u32(in);
        std::vector<std::string> labels(n);
        for (auto& label : labels) label = detail::get_string(in);

        Aggregator engine(SymbolTable::intern(labels), config);
        engine.m_ = detail::get_i64(in);
        for (std::int64_t& c : engine.lr_forest_.counters()) c = detail::get_i64(in);
        for (RankForest::Node& node : engine.rank_forest_.nodes()) {
            node.repetition = detail::get_i64(in);
            node.size = detail::get_i64(in);
            node.sum = detail::get_i64(in);
        }
        const ElementId padded = engine.table_->padded_count();
        std::vector<ElementId> order(static_cast<std::size_t>(padded));
        for (ElementId& e : order) e = static_cast<ElementId>(detail::get_u32(in));
        engine.agg_.set_order(order);
        const std::int64_t seen = detail::get_i64(in);
        const std::uint64_t rng_state = detail::get_u64(in);
        std::optional<Ranking> sample;
        if (detail::get_u32(in) == 1) {
            std::vector<ElementId> sample_order(static_cast<std::size_t>(padded));
            for (ElementId& e : sample_order) e = static_cast<ElementId>(detail::get_u32(in));
            sample = Ranking::from_padded_order(engine.table_, sample_order);
        }
        engine.reservoir_.restore(std::move(sample), seen, rng_state);
        if (engine.m_ > 0) engine.refresh_result();
        return engine;
    }

private:
    void refresh_result() {
        Ranking lr = agg_.ranking(table_);
        Ranking pap = *reservoir_.sample();
        const std::int64_t lr_cost = rank_forest_.distance(lr);
        const std::int64_t pap_cost = rank_forest_.distance(pap);
        const Winner winner = lr_cost < pap_cost ? Winner::LR : Winner::PAP;
        Ranking best = winner == Winner::LR ? lr : pap;
        last_ = StepResult{m_, std::move(best), std::move(lr), std::move(pap), lr_cost, pap_cost, winner};
    }

    static constexpr const char* kMagic = "RAGGSNAP";
    static constexpr std::uint32_t kVersion = 1;

    Config config_;
    std::shared_ptr<const SymbolTable> table_;
    LrForest lr_forest_;
    LrAggregation agg_;
    RankForest rank_forest_;
    Reservoir reservoir_;
    std::int64_t m_ = 0;
    std::optional<StepResult> last_;
    std::function<void(const StepResult&)> observer_;
};

}  // namespace rankagg
