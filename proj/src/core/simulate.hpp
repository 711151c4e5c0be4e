#pragma once

#include "core/systems.hpp"

#include <functional>
#include <string>
#include <vector>

namespace odeident {

/// Error-free observations of the observable coordinates on a time grid.
struct TrajectoryGrid {
    std::vector<double> times;  // strictly increasing
    Matrix states;              // times.size() x d, row j = x(times[j])
    std::string source_label;
};

/// Hold one observable coordinate at a constant value.
struct InterventionSpec {
    int clamped_index = 1;  // 1-based observable coordinate
    double value = 0.0;
};

/// z(t) via the terminating series sum_{k<p} G^k z0 t^k / k!.
Vector latent_state(const LatentDagSystem& sys, double t);

/// x(t) as the first d coordinates of the block flow e^{Mt} [x0; z0],
/// M = [[A, B], [0, G]].
Vector observed_state(const LatentDagSystem& sys, double t);

/// x(t) as the first d coordinates of the augmented flow e^{Ft} y0.
Vector observed_state(const LatentDriverSystem& sys, double t);

/// Closed-form observable flow for raw parameter blocks; G need not be
/// nilpotent (used by the estimator whose iterates leave the DAG class).
Vector observed_state_raw(const Vector& x0, const Vector& z0, const Matrix& a, const Matrix& b,
                          const Matrix& g, double t);

TrajectoryGrid sample_trajectory(const LatentDagSystem& sys, const std::vector<double>& times);
TrajectoryGrid sample_trajectory(const LatentDriverSystem& sys, const std::vector<double>& times);

/// Inclusive grid of n points from t_start to t_end; [t_start] for n = 1.
std::vector<double> equally_spaced(int n, double t_start, double t_end);

/// Post-intervention trajectory with the clamped coordinate held constant and
/// the rest evolving under the induced affine-plus-polynomial forcing; one
/// matrix exponential per evaluation.
std::function<Vector(double)> intervene_clamp(const LatentDagSystem& sys,
                                              const InterventionSpec& spec);

}  // namespace odeident
