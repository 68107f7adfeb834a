#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lmqn/dense_oracle.hpp"
#include "lmqn/errors.hpp"
#include "test_support.hpp"

using namespace lmqn;

namespace {

/// Textbook BFGS recomputation used as an independent check on the forward
/// recursion at the BFGS endpoint.
Matrix bfgs_reference(const PairStore& store) {
    const std::size_t n = store.dimension();
    Matrix b = store.gamma() * Matrix::identity(n);
    for (std::size_t j = 0; j < store.count(); ++j) {
        const Vec& s = store.s(j);
        const Vec& y = store.y(j);
        const Vec bs = matvec(b, s);
        const double sbs = dot(s, bs);
        const double sty = dot(s, y);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c)
                b(r, c) += y[r] * y[c] / sty - bs[r] * bs[c] / sbs;
        symmetrize(b);
    }
    return b;
}

} // namespace

TEST_CASE("collinear pair leaves both references at the identity") {
    PairStore store(5);
    const Vec e1 = unit_vector(5, 0);
    REQUIRE(store.push(e1, e1));
    for (double phi : {0.0, 0.5, 1.0}) {
        const DensePair pair = dense_broyden(store, {phi, 1.0});
        CHECK(test::rel_fro(pair.b, Matrix::identity(5)) < 1e-14);
        CHECK(test::rel_fro(pair.h, Matrix::identity(5)) < 1e-14);
    }
}

TEST_CASE("forward recursion matches the textbook BFGS update") {
    const PairStore store = test::random_store(10, 2, 179);
    const DensePair pair = dense_broyden(store, {0.0, 1.0});
    CHECK(test::rel_fro(pair.b, bfgs_reference(store)) < 1e-12);
}

TEST_CASE("forward and inverse recursions are mutual inverses") {
    for (double phi : {0.0, 0.25, 0.75, 1.0}) {
        const PairStore store = test::random_store(20, 4, 181);
        const DensePair pair = dense_broyden(store, {phi, 1.0});
        CHECK(test::rel_fro(pair.b * pair.h, Matrix::identity(20)) < 1e-10);
        CHECK(symmetry_gap(pair.b) == 0.0);
        CHECK(symmetry_gap(pair.h) == 0.0);
    }
}

TEST_CASE("restricted-class matrices stay positive definite") {
    for (double phi : {0.0, 0.5, 1.0}) {
        const PairStore store = test::random_store(15, 4, 191, 0.7);
        const DensePair pair = dense_broyden(store, {phi, 0.7});
        CHECK(cholesky_pd(pair.b));
        CHECK(cholesky_pd(pair.h));
    }
}

TEST_CASE("SR1 reference on the collinear pair") {
    PairStore store(4);
    const Vec e1 = unit_vector(4, 0);
    REQUIRE(store.push(e1, scaled(2.0, e1), false));
    const DensePair pair = dense_sr1(store);
    Matrix want = Matrix::identity(4);
    want(0, 0) = 2.0;
    CHECK(test::rel_fro(pair.b, want) < 1e-14);
}

TEST_CASE("SR1 recursions are mutual inverses and hereditarily symmetric") {
    const PairStore store = test::random_store(15, 3, 193, 1.0, false);
    const DensePair pair = dense_sr1(store);
    CHECK(test::rel_fro(pair.b * pair.h, Matrix::identity(15)) < 1e-10);
    CHECK(symmetry_gap(pair.b) == 0.0);
    CHECK(symmetry_gap(pair.h) == 0.0);
}

TEST_CASE("SR1 reference rejects a zero update denominator") {
    PairStore store(5);
    const Vec s = test::random_vector(5, 197);
    REQUIRE(store.push(s, s, false));  // y = B0 s
    CHECK_THROWS_AS(dense_sr1(store), BreakdownError);
}

TEST_CASE("dense LU solve") {
    const std::size_t n = 12;
    const NormalSampler sampler(199, 57);
    Matrix a(n, n);
    std::uint64_t idx = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = sampler.normal(idx++);
    const Vec x_true = test::random_vector(n, 211);
    const Vec b = matvec(a, x_true);
    CHECK(test::rel_err(dense_solve(a, b), x_true) < 1e-11);

    Matrix singular(2, 2);
    singular(0, 0) = 1.0;
    singular(0, 1) = 2.0;
    singular(1, 0) = 2.0;
    singular(1, 1) = 4.0;
    CHECK_THROWS_AS(dense_solve(singular, Vec{1.0, 1.0}), BreakdownError);
}

TEST_CASE("duality identities hold on random dense instances") {
    for (std::uint64_t seed : {223, 227}) {
        const PairStore store = test::random_store(12, 2, seed, 1.4);
        const DualityReport report = check_duality(store);
        CHECK(report.bfgs_closed_form_dev < 1e-11);
        CHECK(report.dfp_swap_dev < 1e-11);
        CHECK(report.sr1_swap_dev < 1e-12);
        CHECK(report.pass(1e-11));
    }
}

TEST_CASE("swapped store flips the roles of s and y") {
    const PairStore store = test::random_store(8, 2, 229, 2.0);
    const PairStore swapped = swapped_store(store);
    CHECK(swapped.gamma() == doctest::Approx(0.5));
    CHECK(swapped.s(0) == store.y(0));
    CHECK(swapped.y(1) == store.s(1));
    CHECK(swapped.gram().sty()(0, 1) == doctest::Approx(store.gram().sty()(1, 0)));
}
