#include "core/linalg.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <limits>

namespace odeident {

namespace {

bool all_finite(const Matrix& m) { return m.allFinite(); }

// Entrywise-zero test for matrix powers: the cutoff grows with the power so
// that products of O(s) entries are judged on their natural scale.
bool power_is_zero(const Matrix& mk, double scale, int k) {
    const double cutoff = 1e-12 * std::pow(std::max(1.0, scale), k);
    return mk.cwiseAbs().maxCoeff() <= cutoff;
}

Matrix nilpotent_series(const Matrix& m, double t, int index) {
    const Index n = m.rows();
    Matrix result = Matrix::Identity(n, n);
    Matrix term = Matrix::Identity(n, n);
    for (int k = 1; k < index; ++k) {
        term = term * m * (t / k);
        result += term;
    }
    return result;
}

}  // namespace

Matrix mat_exp(const Matrix& m, double t) {
    require(m.rows() == m.cols(), errc::dimension_mismatch, "mat_exp: matrix must be square");
    require(std::isfinite(t) && all_finite(m), errc::invalid_argument, "mat_exp: non-finite input");
    const NilpotencyResult nil = nilpotency(m);
    if (nil.is_nilpotent) return nilpotent_series(m, t, *nil.index);
    return (m * t).exp();
}

Matrix krylov_matrix(const Matrix& a, const Vector& v, int k) {
    require(a.rows() == a.cols(), errc::dimension_mismatch, "krylov_matrix: matrix must be square");
    require(a.cols() == v.size(), errc::dimension_mismatch,
            "krylov_matrix: vector length must match matrix dimension");
    require(k >= 1, errc::invalid_argument, "krylov_matrix: k must be positive");
    Matrix out(a.rows(), k);
    out.col(0) = v;
    for (int j = 1; j < k; ++j) out.col(j) = a * out.col(j - 1);
    return out;
}

RankResult numerical_rank(const Matrix& m, std::optional<double> tol) {
    RankResult result;
    if (m.size() == 0) return result;
    Eigen::JacobiSVD<Matrix> svd(m);
    const Vector& sv = svd.singularValues();
    const double sigma_max = sv.size() > 0 ? sv(0) : 0.0;
    const double eps = std::numeric_limits<double>::epsilon();
    result.tolerance_used =
        tol.value_or(static_cast<double>(std::max(m.rows(), m.cols())) * sigma_max * eps);
    int rank = 0;
    for (Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > result.tolerance_used)
            ++rank;
        else
            break;  // singular values are sorted descending
    }
    result.rank = rank;
    result.smallest_retained_sv = rank > 0 ? sv(rank - 1) : 0.0;
    result.largest_discarded_sv = rank < sv.size() ? sv(rank) : 0.0;
    return result;
}

NilpotencyResult nilpotency(const Matrix& g) {
    require(g.rows() == g.cols(), errc::dimension_mismatch, "nilpotency: matrix must be square");
    const int p = static_cast<int>(g.rows());
    const double scale = g.size() > 0 ? g.cwiseAbs().maxCoeff() : 0.0;
    Matrix power = Matrix::Identity(p, p);
    for (int k = 1; k <= p; ++k) {
        power = power * g;
        if (power_is_zero(power, scale, k)) return {true, k};
    }
    return {false, std::nullopt};
}

Vector time_power_row(double t, int p) {
    require(p >= 1, errc::invalid_argument, "time_power_row: p must be positive");
    Vector row(p);
    row(0) = 1.0;
    for (int k = 1; k < p; ++k) row(k) = row(k - 1) * t;
    return row;
}

}  // namespace odeident
