// Copyright (C) 2026 RealityCheck contributors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "rcheck/json_io.hpp"
#include "rcheck/scoring.hpp"

#include "oracles.hpp"
#include "testdata.hpp"

using namespace rcheck;
using Catch::Approx;

namespace {

NliTriple t(double ent, double con, double neu) { return NliTriple{ent, con, neu}; }

// Complete n-fact matrix with every entry equal to the given triple.
NliMatrix uniform_matrix(std::size_t n, const NliTriple& triple) {
    NliMatrix m;
    m.n = n;
    m.nli_model_id = "test-nli";
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) m.entries[{i, j}] = triple;
    return m;
}

NliMatrix random_matrix(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    NliMatrix m;
    m.n = n;
    m.nli_model_id = "test-nli";
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            double a = u(rng), b = u(rng), c = u(rng);
            const double s = a + b + c;
            if (s == 0.0) { a = 1.0; }
            m.entries[{i, j}] = t(a / (a + b + c), b / (a + b + c), c / (a + b + c));
        }
    return m;
}

}  // namespace

TEST_CASE("combine_scores is the stated linear form") {
    const ScoreWeights w{1.75, -2.0, 0.0};
    CHECK(combine_scores(t(1, 0, 0), w) == 1.75);
    CHECK(combine_scores(t(0, 1, 0), w) == -2.0);
    // hand arithmetic: 0.5*1.75 - 0.3*2.0 = 0.275
    CHECK(combine_scores(t(0.5, 0.3, 0.2), w) == Approx(0.275).margin(1e-12));
}

TEST_CASE("combine_scores rejects non-finite input") {
    const ScoreWeights w{1.0, 1.0, 1.0};
    CHECK_THROWS_AS(combine_scores(t(std::nan(""), 0, 0), w), error);
    CHECK_THROWS_AS(combine_scores(t(0.5, 0.3, 0.2), ScoreWeights{1.0, HUGE_VAL, 0.0}), error);
    try {
        combine_scores(t(0.5, 0.3, 0.2), ScoreWeights{std::nan(""), 0, 0});
        FAIL("expected error");
    } catch (const error& e) {
        CHECK(e.code() == errc::invalid_input);
    }
}

TEST_CASE("combine_scores is linear in the weights") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int k = 0; k < 200; ++k) {
        double a = std::abs(u(rng)), b = std::abs(u(rng)), c = std::abs(u(rng));
        const double s = a + b + c + 1e-12;
        const NliTriple triple = t(a / s, b / s, c / s);
        const ScoreWeights w1{u(rng), u(rng), u(rng)};
        const ScoreWeights w2{u(rng), u(rng), u(rng)};
        const ScoreWeights sum{w1.w_ent + w2.w_ent, w1.w_con + w2.w_con, w1.w_neu + w2.w_neu};
        CHECK(combine_scores(triple, sum) ==
              Approx(combine_scores(triple, w1) + combine_scores(triple, w2)).margin(1e-12));
    }
}

TEST_CASE("symmetric_sums emits one sum per unordered pair") {
    SECTION("n=2 direct arithmetic") {
        // directed combinations 0.4 and -0.1 under w=(1,-1,0)
        NliMatrix m;
        m.n = 2;
        m.entries[{0, 1}] = t(0.5, 0.1, 0.4);
        m.entries[{1, 0}] = t(0.2, 0.3, 0.5);
        const auto sums = symmetric_sums(m, ScoreWeights{1.0, -1.0, 0.0});
        REQUIRE(sums.size() == 1);
        CHECK(sums[0] == Approx(0.3).margin(1e-12));
    }
    SECTION("n=3 all-entailment matrix") {
        const auto sums = symmetric_sums(uniform_matrix(3, t(1, 0, 0)), ScoreWeights{1, 0, 0});
        REQUIRE(sums.size() == 3);
        for (double v : sums) CHECK(v == 2.0);
    }
    SECTION("n=5 cardinality") {
        std::mt19937_64 rng(11);
        CHECK(symmetric_sums(random_matrix(5, rng), ScoreWeights{}).size() == 10);
    }
    SECTION("missing entry raises incomplete_matrix") {
        auto m = uniform_matrix(3, t(1, 0, 0));
        m.entries.erase({2, 1});
        try {
            symmetric_sums(m, ScoreWeights{});
            FAIL("expected error");
        } catch (const error& e) {
            CHECK(e.code() == errc::incomplete_matrix);
            CHECK(std::string(e.what()).find("(2, 1)") != std::string::npos);
        }
    }
}

TEST_CASE("agg_min") {
    CHECK(agg_min(std::vector<double>{0.2, -0.5, 0.9}) == -0.5);
    CHECK(agg_min(std::vector<double>{1.0}) == 1.0);
    CHECK(agg_min(std::vector<double>{-3, -3, 2}) == -3.0);
    CHECK_THROWS_AS(agg_min(std::vector<double>{}), error);
}

TEST_CASE("agg_absmax keeps the sign and prefers the negative side on ties") {
    CHECK(agg_absmax(std::vector<double>{0.2, -0.95, 0.9}) == -0.95);
    CHECK(agg_absmax(std::vector<double>{0.0, 0.0}) == 0.0);
    CHECK(agg_absmax(std::vector<double>{0.7, -0.7}) == -0.7);
    CHECK(agg_absmax(std::vector<double>{-0.7, 0.7}) == -0.7);
    CHECK_THROWS_AS(agg_absmax(std::vector<double>{}), error);
}

TEST_CASE("kmeans_1d_two matches the exhaustive split oracle on fixed inputs") {
    SECTION("two well-separated groups") {
        const std::vector<double> s{0, 0, 10, 10};
        const auto c = kmeans_1d_two(s);
        CHECK(c.low == 0.0);
        CHECK(c.high == 10.0);
        const auto o = testing::split_oracle(s);
        CHECK(c.low == Approx(o.low).margin(1e-12));
        CHECK(c.high == Approx(o.high).margin(1e-12));
    }
    SECTION("all-equal multiset degenerates to one value") {
        const double c = 3.25;
        const auto r = kmeans_1d_two(std::vector<double>{c, c, c});
        CHECK(r.low == c);
        CHECK(r.high == c);
    }
    SECTION("asymmetric clusters") {
        const std::vector<double> s{-2, -1.9, 3, 3.1};
        const auto c = kmeans_1d_two(s);
        CHECK(c.low == Approx(-1.95).margin(1e-12));
        CHECK(c.high == Approx(3.05).margin(1e-12));
        const auto o = testing::split_oracle(s);
        CHECK(c.low == Approx(o.low).margin(1e-12));
        CHECK(c.high == Approx(o.high).margin(1e-12));
    }
    SECTION("singleton") {
        const auto r = kmeans_1d_two(std::vector<double>{-4.5});
        CHECK(r.low == -4.5);
        CHECK(r.high == -4.5);
    }
    SECTION("empty input") { CHECK_THROWS_AS(kmeans_1d_two(std::vector<double>{}), error); }
}

TEST_CASE("kmeans_1d_two equals the brute-force bipartition oracle on random multisets") {
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> val(-5.0, 5.0);
    std::uniform_int_distribution<std::size_t> size(2, 10);
    for (int k = 0; k < 100; ++k) {
        std::vector<double> s(size(rng));
        for (auto& v : s) v = val(rng);
        const auto impl = kmeans_1d_two(s);
        const auto oracle = testing::bipartition_oracle(s);
        CHECK(testing::sse_of(s, impl.low, impl.high) == Approx(oracle.sse).margin(1e-9));
        CHECK(impl.low == Approx(oracle.low).margin(1e-9));
        CHECK(impl.high == Approx(oracle.high).margin(1e-9));
    }
}

TEST_CASE("agg_clust returns the lower centroid") {
    CHECK(agg_clust(std::vector<double>{0, 0, 10, 10}) == 0.0);
    CHECK(agg_clust(std::vector<double>{42.0}) == 42.0);
    SECTION("lower cluster of three equal values") {
        const std::vector<double> s{-1, -1, -1, 5};
        CHECK(agg_clust(s) == Approx(-1.0).margin(1e-12));
        CHECK(agg_clust(s) == Approx(testing::split_oracle(s).low).margin(1e-12));
    }
}

TEST_CASE("reality_check composes sums and reduction") {
    SECTION("n=2: all methods agree on the single pair sum") {
        NliMatrix m;
        m.n = 2;
        m.entries[{0, 1}] = t(0.5, 0.1, 0.4);
        m.entries[{1, 0}] = t(0.2, 0.3, 0.5);
        const ScoreWeights w{1.0, -1.0, 0.0};
        for (Method method : {Method::min, Method::absmax, Method::clust}) {
            const auto score = reality_check(m, w, method, "img-a");
            CHECK(score.value == Approx(0.3).margin(1e-12));
            CHECK(score.s_nli_values.size() == 1);
            CHECK(score.image_id == "img-a");
        }
    }
    SECTION("fixture matrix F1 against independent oracles") {
        const NliMatrix f1 = testing::load_fixture_matrix_f1();
        REQUIRE(f1.n == 5);
        const ScoreWeights w{1.75, -2.0, 0.0};

        const auto clust = reality_check(f1, w, Method::clust);
        REQUIRE(clust.s_nli_values.size() == 10);
        const auto oracle = testing::split_oracle(clust.s_nli_values);
        CHECK(clust.value == Approx(oracle.low).margin(1e-12));

        const auto mn = reality_check(f1, w, Method::min);
        double lowest = mn.s_nli_values[0];
        for (double v : mn.s_nli_values) lowest = std::min(lowest, v);
        CHECK(mn.value == lowest);

        const auto am = reality_check(f1, w, Method::absmax);
        CHECK(std::count(am.s_nli_values.begin(), am.s_nli_values.end(), am.value) >= 1);
    }
    SECTION("n below 2 is rejected") {
        NliMatrix m;
        m.n = 1;
        CHECK_THROWS_AS(reality_check(m, ScoreWeights{}, Method::min), error);
    }
}

TEST_CASE("aggregation algebra over random matrices") {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<std::size_t> nd(2, 7);
    std::uniform_real_distribution<double> wd(-3.0, 3.0);
    for (int k = 0; k < 100; ++k) {
        const std::size_t n = nd(rng);
        NliMatrix m = random_matrix(n, rng);
        const ScoreWeights w{wd(rng), wd(rng), wd(rng)};
        auto sums = symmetric_sums(m, w);

        // cardinality
        REQUIRE(sums.size() == n * (n - 1) / 2);

        // swapping both directions of a pair leaves the sums unchanged
        NliMatrix swapped = m;
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        std::size_t a = pick(rng), b = pick(rng);
        if (a == b) b = (b + 1) % n;
        std::swap(swapped.entries[{a, b}], swapped.entries[{b, a}]);
        auto swapped_sums = symmetric_sums(swapped, w);
        CHECK(swapped_sums == sums);

        // relabeling facts permutes pairs but preserves the multiset
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng() % (i + 1)]);
        NliMatrix relabeled;
        relabeled.n = n;
        relabeled.nli_model_id = m.nli_model_id;
        for (const auto& [key, triple] : m.entries)
            relabeled.entries[{perm[key.first], perm[key.second]}] = triple;
        auto relabeled_sums = symmetric_sums(relabeled, w);
        std::sort(sums.begin(), sums.end());
        std::sort(relabeled_sums.begin(), relabeled_sums.end());
        CHECK(relabeled_sums == sums);

        // ordering chain and membership
        const double mean = std::accumulate(sums.begin(), sums.end(), 0.0) /
                            static_cast<double>(sums.size());
        CHECK(agg_min(sums) <= agg_clust(sums) + 1e-12);
        CHECK(agg_clust(sums) <= mean + 1e-12);
        CHECK(std::count(sums.begin(), sums.end(), agg_min(sums)) >= 1);
        CHECK(std::count(sums.begin(), sums.end(), agg_absmax(sums)) >= 1);
    }
}

TEST_CASE("positive weight scaling") {
    std::mt19937_64 rng(431);
    std::uniform_real_distribution<double> wd(-3.0, 3.0);
    for (int k = 0; k < 50; ++k) {
        NliMatrix m = random_matrix(5, rng);
        const ScoreWeights w{wd(rng), wd(rng), wd(rng)};
        for (double lambda : {0.5, 2.0, 7.25}) {
            const ScoreWeights lw{lambda * w.w_ent, lambda * w.w_con, lambda * w.w_neu};
            const auto s = symmetric_sums(m, w);
            const auto ls = symmetric_sums(m, lw);
            for (std::size_t i = 0; i < s.size(); ++i)
                CHECK(ls[i] == Approx(lambda * s[i]).margin(1e-9));
            CHECK(agg_min(ls) == Approx(lambda * agg_min(s)).margin(1e-9));
            CHECK(agg_clust(ls) == Approx(lambda * agg_clust(s)).margin(1e-9));
            const double am = agg_absmax(s);
            if (am != 0.0) CHECK(std::signbit(agg_absmax(ls)) == std::signbit(am));
        }
    }
}

TEST_CASE("RealityScore serialization round trip") {
    NliMatrix m;
    m.n = 2;
    m.nli_model_id = "test-nli";
    m.entries[{0, 1}] = t(0.6, 0.3, 0.1);
    m.entries[{1, 0}] = t(0.2, 0.7, 0.1);
    const auto score = reality_check(m, ScoreWeights{1.75, -2.0, 0.0}, Method::clust, "img-0");

    const json j = score;
    const auto back = j.get<RealityScore>();
    CHECK(back.image_id == score.image_id);
    CHECK(back.value == score.value);
    CHECK(back.method == score.method);
    CHECK(back.s_nli_values == score.s_nli_values);

    const json jm = m;
    const auto mback = jm.get<NliMatrix>();
    CHECK(mback.entries == m.entries);
    CHECK(json(mback).dump() == jm.dump());
}
