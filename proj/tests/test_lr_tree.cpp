#include <catch2/catch_amalgamated.hpp>

#include "rankagg/lr_tree.hpp"
#include "test_support.hpp"

using namespace rankagg;
using test_support::brute_presence;
using test_support::random_ranking;
using test_support::table_of;
using test_support::throws_code;

namespace {

// interval covered by heap node u in a tree with `leaves` leaf positions
std::pair<Rank, Rank> node_interval(std::int32_t u, std::int32_t leaves) {
    std::int32_t depth = 0, first = 0;
    while (first + (1 << depth) <= u) {
        first += 1 << depth;
        ++depth;
    }
    const std::int32_t width = leaves >> depth;
    const std::int32_t index = u - first;
    return {static_cast<Rank>(index * width + 1), static_cast<Rank>((index + 1) * width)};
}

}  // namespace

TEST_CASE("fresh forest shape and zeros") {
    LrForest four(4, 4);
    CHECK(four.node_count() == 7);
    for (ElementId e = 0; e < 4; ++e)
        for (std::int32_t u = 0; u < 7; ++u) CHECK(four.presence(e, u) == 0);
    CHECK(four.root_score(2) == 0);

    LrForest eight(8, 8);
    CHECK(eight.node_count() == 15);
    CHECK(eight.counters().size() == 8u * 15u);
}

TEST_CASE("update increments exactly the containing path") {
    LrForest forest(4, 4);
    forest.update(0, 1);
    // path: [1,4], [1,2], [1,1]
    CHECK(forest.presence(0, 0) == 1);
    CHECK(forest.presence(0, 1) == 1);
    CHECK(forest.presence(0, 3) == 1);
    CHECK(forest.presence(0, 2) == 0);
    CHECK(forest.presence(0, 4) == 0);

    LrForest wide(8, 8);
    wide.update(3, 3);
    wide.update(3, 3);
    const std::int32_t leaf_of_rank3 = 8 - 1 + (3 - 1);
    CHECK(wide.presence(3, leaf_of_rank3) == 2);
    CHECK(wide.root_presence(3) == 2);

    int touched = 0;
    LrForest probe(2, 16);
    probe.update(1, 11);
    for (std::int32_t u = 0; u < probe.node_count(); ++u)
        if (probe.presence(1, u) != 0) ++touched;
    CHECK(touched == 5);  // log2(16) + 1

    CHECK(throws_code([&] { probe.update(0, 0); }, Errc::RankOutOfRange));
    CHECK(throws_code([&] { probe.update(0, 17); }, Errc::RankOutOfRange));
}

TEST_CASE("two-ranking example from a four-element universe") {
    auto table = SymbolTable::intern(std::vector<std::string>{"A", "B", "C", "D"});
    LrForest forest(4, 4);
    forest.absorb(Ranking::from_labels(table, std::vector<std::string>{"A", "B", "C", "D"}));
    forest.absorb(Ranking::from_labels(table, std::vector<std::string>{"B", "D", "A", "C"}));

    const ElementId a = *table->find("A");
    const ElementId c = *table->find("C");
    CHECK(forest.root_presence(a) == 2);
    CHECK(forest.presence(a, 1) == 1);  // node over [1,2]: A only reached it in the first ranking
    CHECK(forest.root_score(a) == 1);
    CHECK(forest.root_score(c) == 0);   // C sat at 3 then 4
}

TEST_CASE("forest invariants after absorbing a random stream") {
    SplitMix64 rng(31);
    for (std::int32_t n : {4, 8, 16}) {
        auto table = table_of(n);
        const std::int32_t padded = table->padded_count();
        LrForest forest(padded, padded);
        std::vector<Ranking> stream;
        for (int i = 0; i < 12; ++i) {
            stream.push_back(random_ranking(rng, table));
            forest.absorb(stream.back());
        }
        const auto m = static_cast<std::int64_t>(stream.size());
        for (ElementId e = 0; e < padded; ++e) {
            CHECK(forest.root_presence(e) == m);
            std::int64_t leaf_sum = 0;
            for (std::int32_t u = 0; u < forest.node_count(); ++u) {
                if (!forest.is_leaf(u)) {
                    CHECK(forest.presence(e, u) ==
                          forest.presence(e, LrForest::left_child(u)) +
                              forest.presence(e, LrForest::right_child(u)));
                } else {
                    leaf_sum += forest.presence(e, u);
                }
                const auto [lo, hi] = node_interval(u, padded);
                CHECK(forest.presence(e, u) == brute_presence(stream, e, lo, hi));
            }
            CHECK(leaf_sum == m);
        }
        // each ranking fills each node's interval |I| times across elements
        for (std::int32_t u = 0; u < forest.node_count(); ++u) {
            const auto [lo, hi] = node_interval(u, padded);
            std::int64_t across = 0;
            for (ElementId e = 0; e < padded; ++e) across += forest.presence(e, u);
            CHECK(across == m * (hi - lo + 1));
        }
    }
}

TEST_CASE("child_score matches a from-scratch interval count") {
    SplitMix64 rng(32);
    auto table = table_of(16);
    LrForest forest(16, 16);
    std::vector<Ranking> stream;
    for (int i = 0; i < 9; ++i) {
        stream.push_back(random_ranking(rng, table));
        forest.absorb(stream.back());
    }
    for (ElementId e = 0; e < 16; ++e) {
        // walk one random root-to-internal path, checking the score recurrence
        std::int32_t node = LrForest::root();
        std::int64_t score = forest.root_score(e);
        auto [lo, hi] = node_interval(node, 16);
        while (!forest.is_leaf(LrForest::left_child(node))) {
            const bool go_left = rng.below(2) == 0;
            node = go_left ? LrForest::left_child(node) : LrForest::right_child(node);
            score = child_score(forest, e, score, node, go_left);
            if (go_left) hi = (lo + hi) / 2;
            else lo = (lo + hi) / 2 + 1;
            const Rank left_child_end = (lo + hi) / 2;
            CHECK(score == brute_presence(stream, e, 1, left_child_end));
        }
    }
}
