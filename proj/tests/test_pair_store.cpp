#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <stdexcept>

#include "lmqn/pair_store.hpp"
#include "test_support.hpp"

using namespace lmqn;

namespace {

Matrix gram_from_scratch(const PairStore& store, bool left_s, bool right_s) {
    const std::size_t k = store.count();
    Matrix g(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            g(i, j) = dot(left_s ? store.s(i) : store.y(i), right_s ? store.s(j) : store.y(j));
    return g;
}

} // namespace

TEST_CASE("first push seeds the gram cache") {
    PairStore store(3);
    const Vec e1 = unit_vector(3, 0);
    REQUIRE(store.push(e1, e1));
    CHECK(store.count() == 1);
    CHECK(store.gram().sty()(0, 0) == 1.0);
    CHECK(store.gram().sts()(0, 0) == 1.0);
    CHECK(store.gram().yty()(0, 0) == 1.0);
}

TEST_CASE("curvature-violating pair is rejected without touching state") {
    PairStore store(3);
    REQUIRE(store.push(unit_vector(3, 0), unit_vector(3, 0)));
    const auto revision = store.revision();
    const Vec e1 = unit_vector(3, 0);
    CHECK_FALSE(store.push(e1, scaled(-1.0, e1), /*require_curvature=*/true));
    CHECK(store.count() == 1);
    CHECK(store.revision() == revision);
    // without the curvature requirement the same pair is accepted
    CHECK(store.push(e1, scaled(-1.0, e1), /*require_curvature=*/false));
    CHECK(store.count() == 2);
}

TEST_CASE("eviction keeps the most recent pairs and the cache matches a recompute") {
    const std::size_t n = 17;
    const std::size_t m = 4;
    PairStore store(n, m);
    const NormalSampler sampler(42, 5);
    std::uint64_t off = 0;
    std::vector<Vec> pushed_s;
    for (std::size_t j = 0; j < m + 3; ++j) {
        Vec s = sampler.normal_vector(n, off);
        off += n;
        Vec y = sampler.normal_vector(n, off);
        off += n;
        if (dot(s, y) < 0.0) scal(-1.0, y);
        REQUIRE(store.push(s, y));
        pushed_s.push_back(s);
        CHECK(store.count() == std::min(j + 1, m));
    }
    // FIFO: the stored pairs are the last m accepted, in push order
    for (std::size_t i = 0; i < m; ++i) CHECK(store.s(i) == pushed_s[pushed_s.size() - m + i]);

    CHECK(test::rel_fro(store.gram().sts(), gram_from_scratch(store, true, true)) < 1e-13);
    CHECK(test::rel_fro(store.gram().sty(), gram_from_scratch(store, true, false)) < 1e-13);
    CHECK(test::rel_fro(store.gram().yty(), gram_from_scratch(store, false, false)) < 1e-13);
}

TEST_CASE("cached gram matrices stay exact under long push sequences") {
    for (std::uint64_t seed : {1, 2, 3}) {
        const std::size_t n = 9;
        PairStore store(n, 5);
        const NormalSampler sampler(seed, 6);
        std::uint64_t off = 0;
        for (int j = 0; j < 23; ++j) {
            Vec s = sampler.normal_vector(n, off);
            off += n;
            Vec y = sampler.normal_vector(n, off);
            off += n;
            if (dot(s, y) < 0.0) scal(-1.0, y);
            store.push(s, y);
        }
        CHECK(test::rel_fro(store.gram().sts(), gram_from_scratch(store, true, true)) < 1e-13);
        CHECK(test::rel_fro(store.gram().sty(), gram_from_scratch(store, true, false)) < 1e-13);
        CHECK(test::rel_fro(store.gram().yty(), gram_from_scratch(store, false, false)) < 1e-13);
        CHECK(symmetry_gap(store.gram().sts()) == 0.0);
        CHECK(symmetry_gap(store.gram().yty()) == 0.0);
    }
}

TEST_CASE("ldr split of a 1x1 cache") {
    PairStore store(2);
    const Vec s{1.0, 0.0};
    const Vec y{2.0, 0.0};
    REQUIRE(store.push(s, y));
    const LdrSplit ldr = store.gram().ldr_views();
    CHECK(ldr.l(0, 0) == 0.0);
    CHECK(ldr.d(0, 0) == 2.0);
    CHECK(ldr.r(0, 0) == 0.0);
}

TEST_CASE("ldr split of a 2x2 cache matches the definition") {
    // chosen so S'Y = [[1, 2], [3, 4]]
    PairStore store(2);
    REQUIRE(store.push(Vec{1.0, 0.0}, Vec{1.0, 3.0}));
    REQUIRE(store.push(Vec{0.0, 1.0}, Vec{2.0, 4.0}));
    REQUIRE(store.gram().sty()(0, 0) == 1.0);
    REQUIRE(store.gram().sty()(0, 1) == 2.0);
    REQUIRE(store.gram().sty()(1, 0) == 3.0);
    REQUIRE(store.gram().sty()(1, 1) == 4.0);
    const LdrSplit ldr = store.gram().ldr_views();
    CHECK(ldr.l(1, 0) == 3.0);
    CHECK(ldr.l(0, 0) == 0.0);
    CHECK(ldr.l(0, 1) == 0.0);
    CHECK(ldr.d(0, 0) == 1.0);
    CHECK(ldr.d(1, 1) == 4.0);
    CHECK(ldr.r(0, 1) == 2.0);
    CHECK(ldr.r(1, 0) == 0.0);
}

TEST_CASE("ldr split reassembles the cached product bit for bit") {
    const PairStore store = test::random_store(11, 4, 7);
    const LdrSplit ldr = store.gram().ldr_views();
    const Matrix& sty = store.gram().sty();
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            CHECK(ldr.l(i, j) + ldr.d(i, j) + ldr.r(i, j) == sty(i, j));
}

TEST_CASE("contract violations") {
    PairStore store(4);
    CHECK_THROWS_AS(store.push(Vec(3, 1.0), Vec(4, 1.0)), std::invalid_argument);
    CHECK_THROWS_AS(store.set_gamma(0.0), std::invalid_argument);
    CHECK_THROWS_AS(PairStore(4, 2, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(store.gram().ldr_views(), std::invalid_argument);
}
