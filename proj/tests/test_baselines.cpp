#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lmqn/baselines.hpp"
#include "lmqn/broyden_compact.hpp"
#include "lmqn/dense_oracle.hpp"
#include "lmqn/errors.hpp"
#include "lmqn/sr1_compact.hpp"
#include "test_support.hpp"

using namespace lmqn;

TEST_CASE("an empty store applies H0 in every solver") {
    const PairStore store(8, 4, 2.0);
    const Vec z = test::random_vector(8, 1);
    const Vec want = scaled(0.5, z);
    CHECK(test::rel_err(two_loop_solve(store, z), want) < 1e-15);
    UnrolledUpdate fwd = unroll_forward(store, {0.5, 2.0});
    CHECK(test::rel_err(smw_solve(fwd, z), want) < 1e-15);
    const UnrolledUpdate inv = unroll_inverse(store, {0.5, 2.0});
    CHECK(test::rel_err(recursive_h_solve(inv, z), want) < 1e-15);
    CHECK(test::rel_err(sr1_self_dual_solve(store, z), want) < 1e-15);
}

TEST_CASE("two-loop on a collinear pair is the identity") {
    PairStore store(5);
    const Vec e1 = unit_vector(5, 0);
    REQUIRE(store.push(e1, e1));
    const Vec z = test::random_vector(5, 2);
    CHECK(test::rel_err(two_loop_solve(store, z), z) < 1e-14);
}

TEST_CASE("first forward slots carry B0 s and its reciprocal curvature") {
    PairStore store(6);
    const Vec s = test::random_vector(6, 3);
    Vec y = test::random_vector(6, 4);
    if (dot(s, y) < 0.0) scal(-1.0, y);
    REQUIRE(store.push(s, y));
    const UnrolledUpdate u = unroll_forward(store, {0.0, 1.0});
    CHECK(test::rel_err(u.us[2], s) < 1e-15);  // B0 s with gamma = 1
    CHECK(u.alphas[2] == doctest::Approx(-1.0 / dot(s, s)));
    CHECK(u.alphas[0] == doctest::Approx(1.0 / dot(s, y)));
    CHECK(u.alphas[1] == 0.0);  // rank-two piece is inert at the BFGS endpoint
}

TEST_CASE("first inverse slot set carries H0 y") {
    PairStore store(6, 6, 4.0);
    const Vec s = test::random_vector(6, 5);
    Vec y = test::random_vector(6, 6);
    if (dot(s, y) < 0.0) scal(-1.0, y);
    REQUIRE(store.push(s, y));
    const UnrolledUpdate u = unroll_inverse(store, {0.5, 4.0});
    CHECK(test::rel_err(u.us[2], scaled(0.25, y)) < 1e-15);
    CHECK(test::rel_err(u.us[0], s) < 1e-15);
}

TEST_CASE("unrolled forward slots rebuild the dense matrix") {
    const PairStore store = test::random_store(20, 4, 113);
    for (double phi : {0.0, 0.5, 1.0}) {
        const BroydenConfig config{phi, 1.0};
        const UnrolledUpdate u = unroll_forward(store, config);
        Matrix b = Matrix::identity(20);
        for (std::size_t i = 0; i < 20; ++i)
            for (std::size_t j = 0; j < 20; ++j) {
                double v = i == j ? config.gamma : 0.0;
                for (std::size_t t = 0; t < u.us.size(); ++t)
                    v += u.alphas[t] * u.us[t][i] * u.us[t][j];
                b(i, j) = v;
            }
        const DensePair dense = dense_broyden(store, config);
        CHECK(test::rel_fro(b, dense.b) < 1e-11);
    }
}

TEST_CASE("unrolled inverse slots rebuild the dense inverse") {
    const PairStore store = test::random_store(20, 4, 127);
    for (double phi : {0.0, 0.5, 1.0}) {
        const BroydenConfig config{phi, 1.0};
        const UnrolledUpdate u = unroll_inverse(store, config);
        Matrix h(20, 20);
        for (std::size_t i = 0; i < 20; ++i)
            for (std::size_t j = 0; j < 20; ++j) {
                double v = i == j ? 1.0 / config.gamma : 0.0;
                for (std::size_t t = 0; t < u.us.size(); ++t)
                    v += u.alphas[t] * u.us[t][i] * u.us[t][j];
                h(i, j) = v;
            }
        const DensePair dense = dense_broyden(store, config);
        CHECK(test::rel_fro(h, dense.h) < 1e-10);
    }
}

TEST_CASE("inverse slot weights vanish at the DFP endpoint") {
    const PairStore store = test::random_store(15, 3, 131);
    const UnrolledUpdate u = unroll_inverse(store, {1.0, 1.0});
    for (std::size_t j = 0; j < 3; ++j) CHECK(u.alphas[3 * j + 1] == 0.0);
}

TEST_CASE("all restricted-class solvers agree pairwise") {
    for (double phi : {0.0, 0.25, 0.5, 0.75, 0.99, 1.0}) {
        const PairStore store = test::random_store(35, 5, 137, 1.0);
        const BroydenConfig config{phi, 1.0};
        const Vec z = test::random_vector(35, 11);

        const BroydenStates states = build_states(store, config);
        const Vec r_compact = solve(states.inverse, z);
        UnrolledUpdate fwd = unroll_forward(store, config);
        const Vec r_smw = smw_solve(fwd, z);
        const UnrolledUpdate inv = unroll_inverse(store, config);
        const Vec r_rec = recursive_h_solve(inv, z);

        CHECK(test::rel_err(r_smw, r_compact) < 1e-10);
        CHECK(test::rel_err(r_rec, r_compact) < 1e-10);
        CHECK(test::rel_err(r_rec, r_smw) < 1e-10);
        if (phi == 0.0) {
            const Vec r_two = two_loop_solve(store, z);
            CHECK(test::rel_err(r_two, r_compact) < 1e-10);
            CHECK(test::rel_err(r_two, r_smw) < 1e-10);
        }

        const DensePair dense = dense_broyden(store, config);
        const Vec r_dense = dense_solve(dense.b, z);
        CHECK(test::rel_err(r_compact, r_dense) < 1e-10);
    }
}

TEST_CASE("SMW denominators stay strictly positive on the curvature slots") {
    const PairStore store = test::random_store(25, 4, 139);
    for (double phi : {0.0, 0.5, 1.0}) {
        UnrolledUpdate u = unroll_forward(store, {phi, 1.0});
        (void)smw_solve(u, test::random_vector(25, 13));
        for (std::size_t j = 0; j < 4; ++j) {
            CHECK(u.smw_denoms[3 * j] > 0.0);
            CHECK(u.smw_denoms[3 * j + 1] > 0.0);
            CHECK(u.alphas[3 * j] > 0.0);
            CHECK(u.alphas[3 * j + 1] >= 0.0);
        }
    }
}

TEST_CASE("SR1 self-duality solve matches the collinear closed form") {
    PairStore store(4);
    const Vec e1 = unit_vector(4, 0);
    REQUIRE(store.push(e1, scaled(2.0, e1), false));
    const Vec r = sr1_self_dual_solve(store, e1);
    CHECK(test::rel_err(r, scaled(0.5, e1)) < 1e-14);
}

TEST_CASE("SR1 self-duality breaks down on y = B0 s") {
    PairStore store(5);
    const Vec s = test::random_vector(5, 149);
    REQUIRE(store.push(s, s, false));  // gamma = 1, so y - B0 s = 0
    CHECK_THROWS_AS(sr1_self_dual_solve(store, Vec(5, 1.0)), BreakdownError);
}

TEST_CASE("inner product counts match the stated totals") {
    for (std::size_t pairs : {1u, 2u, 4u, 6u}) {
        const PairStore store = test::random_store(48, pairs, 151);
        const Vec z = test::random_vector(48, 17);

        reset_inner_product_count();
        (void)two_loop_solve(store, z);
        CHECK(inner_product_count() == 2 * pairs);

        reset_inner_product_count();
        (void)unroll_forward(store, {0.5, 1.0});
        CHECK(inner_product_count() == pairs * (3 * pairs - 1) / 2);
    }
}

TEST_CASE("two-loop count at zero pairs is zero") {
    const PairStore store(16, 4);
    reset_inner_product_count();
    (void)two_loop_solve(store, Vec(16, 1.0));
    CHECK(inner_product_count() == 0);
}
