#pragma once

#include "core/types.hpp"

#include <optional>

namespace odeident {

/// Outcome of a tolerance-based rank decision. Keeps both sides of the
/// singular-value gap so callers can report how close the decision was.
struct RankResult {
    int rank = 0;
    double smallest_retained_sv = 0.0;   // 0 when rank == 0
    double largest_discarded_sv = 0.0;   // 0 when nothing was discarded
    double tolerance_used = 0.0;
};

struct NilpotencyResult {
    bool is_nilpotent = false;
    std::optional<int> index;  // smallest k with G^k ~ 0, set iff nilpotent
};

/// e^{Mt}. Nilpotent inputs (detected) are evaluated by the terminating
/// power series, so strictly triangular blocks come out exact; everything
/// else goes through scaling-and-squaring.
Matrix mat_exp(const Matrix& m, double t);

/// Columns [v, Av, A^2 v, ..., A^{k-1} v].
Matrix krylov_matrix(const Matrix& a, const Vector& v, int k);

/// SVD rank with threshold max(rows, cols) * sigma_max * machine epsilon,
/// overridable via tol (absolute cutoff on singular values).
RankResult numerical_rank(const Matrix& m, std::optional<double> tol = std::nullopt);

/// Tests G^k ~ 0 for k <= p (entrywise, scale-aware tolerance) and reports
/// the smallest such k.
NilpotencyResult nilpotency(const Matrix& g);

/// [1, t, t^2, ..., t^{p-1}].
Vector time_power_row(double t, int p);

}  // namespace odeident
