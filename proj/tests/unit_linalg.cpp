#include "core/linalg.hpp"

#include "helpers.hpp"

#include <doctest.h>

using namespace odeident;
using namespace odeident::testing;

TEST_CASE("mat_exp of the zero matrix is the identity at any time") {
    const Matrix e = mat_exp(Matrix::Zero(3, 3), 7.0);
    CHECK(max_abs_diff(e, Matrix::Identity(3, 3)) == 0.0);
}

TEST_CASE("mat_exp of a single Jordan shift terminates") {
    const Matrix e = mat_exp(make_matrix({{0, 1}, {0, 0}}), 1.0);
    CHECK(max_abs_diff(e, make_matrix({{1, 1}, {0, 1}})) == 0.0);
}

TEST_CASE("mat_exp of the benchmark latent coupling equals its finite series") {
    const Matrix g = make_matrix({{0, 2, 1}, {0, 0, -2}, {0, 0, 0}});
    // Series oracle: I + G + G^2/2 with explicit powers.
    const Matrix expected = Matrix::Identity(3, 3) + g + (g * g) / 2.0;
    CHECK(max_abs_diff(expected, make_matrix({{1, 2, -1}, {0, 1, -2}, {0, 0, 1}})) == 0.0);
    CHECK(max_abs_diff(mat_exp(g, 1.0), expected) <= 1e-15);
}

TEST_CASE("mat_exp rejects non-square input") {
    CHECK_THROWS_AS(mat_exp(Matrix::Zero(2, 3), 1.0), Error);
}

TEST_CASE("krylov_matrix stacks v, Av, ... as columns") {
    const Matrix k1 = krylov_matrix(Matrix::Identity(2, 2), make_vector({1, 0}), 2);
    CHECK(max_abs_diff(k1, make_matrix({{1, 1}, {0, 0}})) == 0.0);

    const Matrix k2 = krylov_matrix(make_matrix({{0, 1}, {0, 0}}), make_vector({0, 1}), 2);
    CHECK(max_abs_diff(k2, make_matrix({{0, 1}, {1, 0}})) == 0.0);
}

TEST_CASE("krylov_matrix of the benchmark system matches explicit products") {
    const LatentDagSystem sys = bench3_system();
    const Matrix k = krylov_matrix(sys.A, sys.x0, 3);
    CHECK(max_abs_diff(k.col(0), sys.x0) == 0.0);
    CHECK(max_abs_diff(k.col(1), sys.A * sys.x0) == 0.0);
    CHECK(max_abs_diff(k.col(2), sys.A * (sys.A * sys.x0)) == 0.0);
}

TEST_CASE("krylov_matrix rejects mismatched dimensions") {
    CHECK_THROWS_AS(krylov_matrix(Matrix::Identity(2, 2), make_vector({1, 0, 0}), 2), Error);
}

TEST_CASE("numerical_rank handles zero, full-rank, and rank-one matrices") {
    CHECK(numerical_rank(Matrix::Zero(3, 3)).rank == 0);
    const RankResult full = numerical_rank(Matrix::Identity(3, 3));
    CHECK(full.rank == 3);
    CHECK(full.smallest_retained_sv == doctest::Approx(1.0));
    const RankResult low = numerical_rank(make_matrix({{1, 2}, {2, 4}}));
    CHECK(low.rank == 1);
    CHECK(low.largest_discarded_sv < low.tolerance_used);
}

TEST_CASE("nilpotency classifies the benchmark coupling, the identity, and 1x1 zero") {
    const Matrix g = make_matrix({{0, 2, 1}, {0, 0, -2}, {0, 0, 0}});
    // Oracle: repeated explicit products; G^3 vanishes, G^2 does not.
    CHECK((g * g).cwiseAbs().maxCoeff() > 0.0);
    CHECK((g * g * g).cwiseAbs().maxCoeff() == 0.0);

    const NilpotencyResult ng = nilpotency(g);
    CHECK(ng.is_nilpotent);
    CHECK(*ng.index == 3);

    CHECK_FALSE(nilpotency(Matrix::Identity(3, 3)).is_nilpotent);

    const NilpotencyResult scalar = nilpotency(Matrix::Zero(1, 1));
    CHECK(scalar.is_nilpotent);
    CHECK(*scalar.index == 1);
}

TEST_CASE("time_power_row produces 1, t, t^2, ...") {
    CHECK(max_abs_diff(time_power_row(0.0, 4), make_vector({1, 0, 0, 0})) == 0.0);
    CHECK(max_abs_diff(time_power_row(1.0, 3), make_vector({1, 1, 1})) == 0.0);
    CHECK(max_abs_diff(time_power_row(2.0, 3), make_vector({1, 2, 4})) == 0.0);
}
