#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "rankagg/domain_gen.hpp"
#include "rankagg/oracles.hpp"
#include "test_support.hpp"

using namespace rankagg;
using test_support::throws_code;

namespace {

std::vector<Ranking> drain(DomainGenerator& gen) {
    std::vector<Ranking> out;
    while (auto r = gen.next()) out.push_back(std::move(*r));
    return out;
}

GenSpec uniform_spec(std::int32_t n, std::int64_t m, std::uint64_t seed) {
    GenSpec spec;
    spec.n = n;
    spec.m = m;
    spec.seed = seed;
    return spec;
}

}  // namespace

TEST_CASE("generator validation") {
    GenSpec no_phi;
    no_phi.model = GenModel::Mallows;
    no_phi.n = 4;
    no_phi.m = 1;
    CHECK(throws_code([&] { DomainGenerator g(no_phi); }, Errc::ParseError));

    GenSpec bad_phi = no_phi;
    bad_phi.phi = 1.5;
    CHECK(throws_code([&] { DomainGenerator g(bad_phi); }, Errc::PhiOutOfRange));
    bad_phi.phi = 0.0;
    CHECK(throws_code([&] { DomainGenerator g(bad_phi); }, Errc::PhiOutOfRange));

    GenSpec no_k;
    no_k.model = GenModel::Biased;
    no_k.n = 4;
    no_k.m = 1;
    CHECK(throws_code([&] { DomainGenerator g(no_k); }, Errc::ParseError));
}

TEST_CASE("all models emit valid permutations deterministically") {
    std::vector<GenSpec> specs;
    specs.push_back(uniform_spec(9, 25, 5));
    GenSpec biased = uniform_spec(9, 25, 5);
    biased.model = GenModel::Biased;
    biased.k = 9;
    specs.push_back(biased);
    GenSpec mallows = uniform_spec(9, 25, 5);
    mallows.model = GenModel::Mallows;
    mallows.phi = 0.7;
    specs.push_back(mallows);

    for (const GenSpec& spec : specs) {
        DomainGenerator a(spec);
        DomainGenerator b(spec);
        auto stream_a = drain(a);
        auto stream_b = drain(b);
        REQUIRE(stream_a.size() == 25);
        for (std::size_t i = 0; i < stream_a.size(); ++i) {
            CHECK(stream_a[i].order() == stream_b[i].order());
            // from_real_order validated the permutation; spot-check positions
            for (Rank r = 1; r <= stream_a[i].size(); ++r)
                CHECK(stream_a[i].rank_of(stream_a[i].at_rank(r)) == r);
        }
    }
}

TEST_CASE("single-element universe repeats the only ranking") {
    DomainGenerator gen(uniform_spec(1, 5, 9));
    auto stream = drain(gen);
    REQUIRE(stream.size() == 5);
    for (const auto& r : stream) CHECK(r.at_rank(1) == 0);
}

TEST_CASE("uniform positions have the right mean") {
    const std::int32_t n = 8;
    const std::int64_t m = 10000;
    DomainGenerator gen(uniform_spec(n, m, 12));
    std::vector<double> sums(static_cast<std::size_t>(n), 0.0);
    while (auto r = gen.next())
        for (ElementId e = 0; e < n; ++e) sums[static_cast<std::size_t>(e)] += r->rank_of(e);
    const double expected = (n + 1) / 2.0;
    const double variance = (static_cast<double>(n) * n - 1) / 12.0;
    const double limit = 3.0 * std::sqrt(variance / static_cast<double>(m));
    for (double sum : sums) {
        const double mean = sum / static_cast<double>(m);
        CHECK(std::abs(mean - expected) < limit);
    }
}

TEST_CASE("biased with k=0 is plain uniform") {
    GenSpec biased = uniform_spec(7, 20, 33);
    biased.model = GenModel::Biased;
    biased.k = 0;
    DomainGenerator a(biased);
    DomainGenerator b(uniform_spec(7, 20, 33));
    auto stream_a = drain(a);
    auto stream_b = drain(b);
    for (std::size_t i = 0; i < stream_a.size(); ++i)
        CHECK(stream_a[i].order() == stream_b[i].order());
}

TEST_CASE("heavy pair alignment pulls rankings toward the base") {
    const std::int32_t n = 8;
    const std::int64_t m = 200;
    auto table = DomainGenerator::numbered_universe(n);
    auto base = Ranking::padded_identity(table);

    auto mean_to_base = [&](GenSpec spec) {
        DomainGenerator gen(spec);
        double total = 0;
        std::int64_t count = 0;
        while (auto r = gen.next()) {
            auto pulled = Ranking::from_labels(table, r->real_labels());
            total += static_cast<double>(footrule(pulled, base));
            ++count;
        }
        return total / static_cast<double>(count);
    };

    GenSpec heavy = uniform_spec(n, m, 44);
    heavy.model = GenModel::Biased;
    heavy.k = 10LL * n * n;
    const double biased_mean = mean_to_base(heavy);
    const double uniform_mean = mean_to_base(uniform_spec(n, m, 44));
    CHECK(biased_mean < uniform_mean);
}

TEST_CASE("vanishing dispersion collapses onto the reference") {
    GenSpec spec = uniform_spec(10, 10, 3);
    spec.model = GenModel::Mallows;
    spec.phi = 1e-6;
    DomainGenerator gen(spec);
    auto reference = Ranking::padded_identity(gen.table());
    while (auto r = gen.next()) CHECK(r->order() == reference.order());
}

TEST_CASE("mallows mean displacement matches the exact expectation") {
    const std::int32_t n = 5;
    const double phi = 0.5;
    const std::int64_t m = 100000;

    // expected inversion count: sum over items of the mean insertion
    // displacement under weights phi^t
    double expected = 0;
    for (std::int32_t i = 1; i <= n; ++i) {
        double weight = 1.0, total = 0.0, weighted = 0.0;
        for (std::int32_t t = 0; t < i; ++t) {
            total += weight;
            weighted += t * weight;
            weight *= phi;
        }
        expected += weighted / total;
    }

    GenSpec spec = uniform_spec(n, m, 91);
    spec.model = GenModel::Mallows;
    spec.phi = phi;
    DomainGenerator gen(spec);
    auto reference = Ranking::padded_identity(gen.table());
    double total = 0;
    while (auto r = gen.next()) total += static_cast<double>(kendall_tau(*r, reference));
    const double mean = total / static_cast<double>(m);
    CHECK(std::abs(mean - expected) < 0.02);
}

TEST_CASE("phi of one inserts uniformly") {
    const std::int32_t n = 6;
    const std::int64_t m = 20000;
    GenSpec spec = uniform_spec(n, m, 7);
    spec.model = GenModel::Mallows;
    spec.phi = 1.0;
    DomainGenerator gen(spec);
    std::vector<double> sums(static_cast<std::size_t>(n), 0.0);
    while (auto r = gen.next())
        for (ElementId e = 0; e < n; ++e) sums[static_cast<std::size_t>(e)] += r->rank_of(e);
    const double expected = (n + 1) / 2.0;
    const double variance = (static_cast<double>(n) * n - 1) / 12.0;
    const double limit = 4.0 * std::sqrt(variance / static_cast<double>(m));
    for (double sum : sums) CHECK(std::abs(sum / static_cast<double>(m) - expected) < limit);
}

TEST_CASE("a custom reference recenters the mallows sampler") {
    auto table = DomainGenerator::numbered_universe(6);
    std::vector<ElementId> reversed = {5, 4, 3, 2, 1, 0};
    auto reference = Ranking::from_real_order(table, reversed);

    GenSpec spec;
    spec.model = GenModel::Mallows;
    spec.n = 6;
    spec.m = 8;
    spec.seed = 2;
    spec.phi = 1e-6;
    spec.base = reference;
    DomainGenerator gen(spec);
    CHECK(gen.table() == table);
    while (auto r = gen.next()) CHECK(r->order() == reference.order());
}

TEST_CASE("fixed pair sets are reused across the stream") {
    GenSpec spec = uniform_spec(6, 30, 13);
    spec.model = GenModel::Biased;
    spec.k = 4;
    spec.redraw_pairs_each_ranking = false;
    DomainGenerator a(spec);
    DomainGenerator b(spec);
    auto stream_a = drain(a);
    auto stream_b = drain(b);
    for (std::size_t i = 0; i < stream_a.size(); ++i)
        CHECK(stream_a[i].order() == stream_b[i].order());
}
