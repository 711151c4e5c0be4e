#pragma once

#include "core/rng.hpp"
#include "core/systems.hpp"

namespace odeident::testing {

inline Matrix make_matrix(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.begin()->size()));
    Index r = 0;
    for (const auto& row : rows) {
        Index c = 0;
        for (double v : row) m(r, c++) = v;
        ++r;
    }
    return m;
}

inline Vector make_vector(std::initializer_list<double> entries) {
    Vector v(static_cast<Index>(entries.size()));
    Index i = 0;
    for (double e : entries) v(i++) = e;
    return v;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

// The d = p = 3 benchmark configuration used across the check / recovery /
// estimation fixtures, together with its rank-deficient companion (A replaced
// by the identity).
inline LatentDagSystem bench3_system() {
    return LatentDagSystem(make_vector({-1, 1, 1}), make_vector({1, -2, -1}),
                           make_matrix({{2, -2, 1}, {1, 1, -1}, {1, 0, 2}}),
                           make_matrix({{-2, -2, 2}, {0, -1, -2}, {-1, -1, -2}}),
                           make_matrix({{0, 2, 1}, {0, 0, -2}, {0, 0, 0}}));
}

inline LatentDagSystem bench3_unident_system() {
    const LatentDagSystem base = bench3_system();
    return LatentDagSystem(base.x0, base.z0, Matrix::Identity(3, 3), base.B, base.G);
}

// The 2-observable / 2-latent pair whose trajectories coincide although the
// two A matrices differ.
inline LatentDagSystem twin_system_a() {
    return LatentDagSystem(make_vector({1, 1}), make_vector({1, 1}), Matrix::Identity(2, 2),
                           Matrix::Ones(2, 2), make_matrix({{0, 1}, {0, 0}}));
}

inline LatentDagSystem twin_system_b() {
    return LatentDagSystem(make_vector({1, 1}), make_vector({1, 1}),
                           make_matrix({{0, 1}, {1, 0}}), Matrix::Ones(2, 2),
                           make_matrix({{0, 1}, {0, 0}}));
}

inline Matrix random_matrix(CounterRng& rng, int rows, int cols, double lo = -2.0,
                            double hi = 2.0) {
    Matrix m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = rng.uniform(lo, hi);
    return m;
}

inline Vector random_vector(CounterRng& rng, int n, double lo = -2.0, double hi = 2.0) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = rng.uniform(lo, hi);
    return v;
}

inline Matrix random_strict_upper(CounterRng& rng, int p, double lo = -2.0, double hi = 2.0) {
    Matrix g = Matrix::Zero(p, p);
    for (int r = 0; r < p; ++r)
        for (int c = r + 1; c < p; ++c) g(r, c) = rng.uniform(lo, hi);
    return g;
}

inline LatentDagSystem random_dag_system(CounterRng& rng, int d, int p) {
    return LatentDagSystem(random_vector(rng, d), random_vector(rng, p), random_matrix(rng, d, d),
                           random_matrix(rng, d, p), random_strict_upper(rng, p));
}

}  // namespace odeident::testing
