#include "core/recovery.hpp"

#include "helpers.hpp"

#include <doctest.h>

using namespace odeident;
using namespace odeident::testing;

namespace {

// Exact products for a controlled initial condition, by the direct formula.
IdentifiedProducts products_for(const LatentDagSystem& sys, const Vector& z0_star,
                                const std::string& label) {
    IdentifiedProducts out;
    out.x0 = sys.x0;
    out.A = sys.A;
    Vector gz = z0_star;
    for (int k = 0; k < sys.p(); ++k) {
        if (k > 0) gz = sys.G * gz;
        out.moments.push_back(sys.B * gz);
    }
    out.z0_label = label;
    return out;
}

std::vector<IdentifiedProducts> basis_products(const LatentDagSystem& sys) {
    std::vector<IdentifiedProducts> out;
    for (int i = 0; i < sys.p(); ++i) {
        Vector e = Vector::Zero(sys.p());
        e(i) = 1.0;
        out.push_back(products_for(sys, e, "e" + std::to_string(i + 1)));
    }
    return out;
}

}  // namespace

TEST_CASE("recover_B with the standard basis returns the moment columns directly") {
    const LatentDagSystem sys = bench3_system();
    const auto products = basis_products(sys);
    const Matrix b = recover_B(products, Matrix::Identity(3, 3));
    CHECK(max_abs_diff(b, sys.B) <= 1e-12);
    for (int i = 0; i < 3; ++i) CHECK(max_abs_diff(b.col(i), products[i].moments[0]) == 0.0);
}

TEST_CASE("recover_B inverts a general controlled basis") {
    const LatentDagSystem sys = bench3_system();
    const Matrix z = make_matrix({{1, 1, 0}, {0, 1, 1}, {1, 0, 1}});
    std::vector<IdentifiedProducts> products;
    for (int i = 0; i < 3; ++i) products.push_back(products_for(sys, z.col(i), "custom"));
    CHECK(max_abs_diff(recover_B(products, z), sys.B) <= 1e-9);
}

TEST_CASE("recover_B rejects a singular basis") {
    const LatentDagSystem sys = bench3_system();
    Matrix z(3, 3);
    z.col(0) = make_vector({1, 0, 0});
    z.col(1) = make_vector({1, 0, 0});
    z.col(2) = make_vector({0, 0, 1});
    std::vector<IdentifiedProducts> products;
    for (int i = 0; i < 3; ++i) products.push_back(products_for(sys, z.col(i), "dup"));
    CHECK_THROWS_AS(recover_B(products, z), Error);
    try {
        recover_B(products, z);
    } catch (const Error& e) {
        CHECK(e.code() == errc::singular_matrix);
    }
}

TEST_CASE("recover_moment_matrices reproduces every B G^k") {
    const LatentDagSystem sys = bench3_system();
    const auto products = basis_products(sys);
    const auto matrices = recover_moment_matrices(products, Matrix::Identity(3, 3));
    REQUIRE(matrices.size() == 3);
    CHECK(max_abs_diff(matrices[0], recover_B(products, Matrix::Identity(3, 3))) == 0.0);

    Matrix bgk = sys.B;
    for (int k = 0; k < 3; ++k) {
        if (k > 0) bgk = bgk * sys.G;
        CHECK(max_abs_diff(matrices[static_cast<std::size_t>(k)], bgk) <= 1e-9);
    }
    // Nilpotency of the recovered chain: BG^{p-1} G = BG^p = 0.
    CHECK((matrices[2] * sys.G).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("recover_G from exact moment matrices") {
    const LatentDagSystem sys = bench3_system();
    std::vector<Matrix> bg_powers;
    Matrix bgk = sys.B;
    for (int k = 0; k < 3; ++k) {
        if (k > 0) bgk = bgk * sys.G;
        bg_powers.push_back(bgk);
    }
    CHECK(max_abs_diff(recover_G(bg_powers), sys.G) <= 1e-9);
}

TEST_CASE("recover_G with invertible B equals the direct inverse route") {
    const Matrix b = make_matrix({{2, 0, 1}, {0, 1, 0}, {1, 0, 1}});
    const Matrix g = make_matrix({{0, 1, -1}, {0, 0, 2}, {0, 0, 0}});
    const std::vector<Matrix> powers = {b, b * g, b * g * g};
    CHECK(max_abs_diff(recover_G(powers), b.inverse() * (b * g)) <= 1e-10);
    CHECK(max_abs_diff(recover_G(powers), g) <= 1e-10);
}

TEST_CASE("recover_G rejects a vanishing coupling") {
    const std::vector<Matrix> powers = {Matrix::Zero(3, 3), Matrix::Zero(3, 3),
                                        Matrix::Zero(3, 3)};
    CHECK_THROWS_AS(recover_G(powers), Error);
}

TEST_CASE("recover_B_entrywise assembles columns from intervention pairs") {
    const LatentDagSystem sys = bench3_system();
    std::vector<InterventionMomentPair> pairs;
    for (int j = 0; j < 3; ++j) {
        Vector z1 = sys.z0, z2 = sys.z0;
        z1(j) = 0.0;
        z2(j) = 1.0;
        pairs.push_back({sys.B * z1, sys.B * z2, 0.0, 1.0});
    }
    const Matrix b = recover_B_entrywise(pairs);
    CHECK(max_abs_diff(b, sys.B) <= 1e-9);
    // Unit denominator: the column is just the moment difference.
    CHECK(max_abs_diff(b.col(0), (pairs[0].moment1 - pairs[0].moment2) / (0.0 - 1.0)) == 0.0);

    // Scalar case.
    std::vector<InterventionMomentPair> scalar = {
        {make_vector({3.0 * 0.5}), make_vector({3.0 * 2.5}), 0.5, 2.5}};
    CHECK(recover_B_entrywise(scalar)(0, 0) == doctest::Approx(3.0));

    pairs[1].value2 = pairs[1].value1;
    CHECK_THROWS_AS(recover_B_entrywise(pairs), Error);
}
