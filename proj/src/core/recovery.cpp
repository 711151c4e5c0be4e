#include "core/recovery.hpp"

#include "core/linalg.hpp"

#include <Eigen/QR>

namespace odeident {

namespace {

Matrix invert_z(const Matrix& z) {
    const int p = static_cast<int>(z.rows());
    require(z.cols() == p, errc::dimension_mismatch, "Z must be square p x p");
    const RankResult rr = numerical_rank(z);
    require(rr.rank == p, errc::singular_matrix,
            "Z is singular: the controlled initial conditions violate B3");
    return z.inverse();
}

Matrix moment_columns(const std::vector<IdentifiedProducts>& products, int k) {
    require(!products.empty(), errc::invalid_argument, "no identified products supplied");
    const int p = static_cast<int>(products.size());
    const Index d = products.front().moments.at(0).size();
    Matrix s(d, p);
    for (int i = 0; i < p; ++i) {
        require(products[i].p() == p, errc::dimension_mismatch,
                "each product set must carry p moment vectors");
        require(products[i].moments[k].size() == d, errc::dimension_mismatch,
                "moment vector dimension mismatch");
        s.col(i) = products[i].moments[static_cast<std::size_t>(k)];
    }
    return s;
}

}  // namespace

Matrix recover_B(const std::vector<IdentifiedProducts>& products, const Matrix& z) {
    return moment_columns(products, 0) * invert_z(z);
}

std::vector<Matrix> recover_moment_matrices(const std::vector<IdentifiedProducts>& products,
                                            const Matrix& z) {
    const Matrix z_inv = invert_z(z);
    const int p = static_cast<int>(products.size());
    std::vector<Matrix> out;
    out.reserve(static_cast<std::size_t>(p));
    for (int k = 0; k < p; ++k) out.push_back(moment_columns(products, k) * z_inv);
    return out;
}

Matrix recover_G(const std::vector<Matrix>& bg_powers) {
    require(!bg_powers.empty(), errc::invalid_argument, "no moment matrices supplied");
    const int p = static_cast<int>(bg_powers.size());
    const Index d = bg_powers.front().rows();
    for (const Matrix& m : bg_powers)
        require(m.rows() == d && m.cols() == p, errc::dimension_mismatch,
                "moment matrices must all be d x p");

    Matrix w(d * p, p);
    Matrix v(d * p, p);
    for (int k = 0; k < p; ++k) {
        w.middleRows(k * d, d) = bg_powers[static_cast<std::size_t>(k)];
        if (k + 1 < p)
            v.middleRows(k * d, d) = bg_powers[static_cast<std::size_t>(k + 1)];
        else
            v.middleRows(k * d, d).setZero();  // B G^p = 0 for nilpotent G
    }

    require(numerical_rank(w).rank == p, errc::singular_matrix,
            "stacked moment matrix is rank deficient: B4 is violated");

    // Row selection: column-pivoted QR of W^T picks p well-conditioned rows;
    // the recovered G is selection-independent in exact arithmetic.
    Eigen::ColPivHouseholderQR<Matrix> qr(w.transpose());
    Matrix w_p(p, p), v_p(p, p);
    for (int i = 0; i < p; ++i) {
        const Index row = qr.colsPermutation().indices()(i);
        w_p.row(i) = w.row(row);
        v_p.row(i) = v.row(row);
    }
    return w_p.partialPivLu().solve(v_p);
}

Matrix recover_B_entrywise(const std::vector<InterventionMomentPair>& pairs) {
    require(!pairs.empty(), errc::invalid_argument, "no intervention pairs supplied");
    const int p = static_cast<int>(pairs.size());
    const Index d = pairs.front().moment1.size();
    Matrix b(d, p);
    for (int j = 0; j < p; ++j) {
        const auto& pair = pairs[static_cast<std::size_t>(j)];
        require(pair.moment1.size() == d && pair.moment2.size() == d, errc::dimension_mismatch,
                "moment vector dimension mismatch");
        require(pair.value1 != pair.value2, errc::invalid_argument,
                "intervention values for latent " + std::to_string(j + 1) + " must differ");
        b.col(j) = (pair.moment1 - pair.moment2) / (pair.value1 - pair.value2);
    }
    return b;
}

}  // namespace odeident
