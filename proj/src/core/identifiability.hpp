#pragma once

#include "core/simulate.hpp"
#include "core/systems.hpp"

#include <optional>
#include <string>
#include <vector>

namespace odeident {

/// Verdict of one rank condition, with enough numerical context to diagnose
/// borderline cases. Composite conditions carry their parts in sub_reports
/// and hold iff every part holds.
struct IdentifiabilityReport {
    std::string condition_id;
    bool holds = false;
    int tested_rows = 0;
    int tested_cols = 0;
    int computed_rank = 0;
    int required_rank = 0;
    double margin = 0.0;  // smallest retained singular value of the tested matrix
    double largest_discarded_sv = 0.0;
    double tolerance_used = 0.0;
    std::vector<IdentifiabilityReport> sub_reports;
};

using Tolerance = std::optional<double>;

/// Observations of one trajectory at explicit times, as consumed by the
/// discrete-observation conditions.
struct ObservationSet {
    std::vector<double> times;
    std::vector<Vector> states;
};

/// Krylov span of the initial condition covers all of R^d.
IdentifiabilityReport check_A0(const Vector& x0, const Matrix& a, Tolerance tol = {});

/// Krylov span of beta covers R^d (polynomial driver).
IdentifiabilityReport check_A1(const LatentDriverSystem& sys, Tolerance tol = {});

/// Krylov span of gamma covers R^d (latent DAG, single trajectory).
IdentifiabilityReport check_B1(const LatentDagSystem& sys, Tolerance tol = {});

/// Full Krylov rank of the augmented pair (F, y0); reported as D1 for the
/// exponential basis, E1 for the trigonometric one, AUG_A0 otherwise.
IdentifiabilityReport check_aug_A0(const AugmentedSystem& aug, Tolerance tol = {});

/// d+p of the padded observations [x_j; 1; t_j; ...; t_j^{p-1}] are
/// linearly independent.
IdentifiabilityReport check_C1(const std::vector<double>& times, const std::vector<Vector>& xs,
                               int p, Tolerance tol = {});

/// Composite for p controlled trajectories: B2 (gamma_i Krylov rank per
/// initial condition), B3 (independence of the z0 stars), B4 (stacked
/// moment matrix has rank p).
IdentifiabilityReport check_B2_B3_B4(const LatentDagSystem& sys_template,
                                     const std::vector<Vector>& z0_stars, Tolerance tol = {});

/// Composite for discrete observations from p controlled trajectories:
/// a C1-style test per trajectory, then B3 and B4.
IdentifiabilityReport check_C2(const std::vector<ObservationSet>& trajectories,
                               const std::vector<Vector>& z0_stars, const Matrix& b,
                               const Matrix& g, Tolerance tol = {});

/// One intervention pair per latent coordinate, values must differ.
struct SingleNodeInterventions {
    std::vector<std::pair<double, double>> values;  // (z0j*1, z0j*2) per latent j
};

/// 2p single-node-intervention checks, each a B1 test with one latent
/// initial coordinate replaced.
IdentifiabilityReport check_B5(const LatentDagSystem& sys, const SingleNodeInterventions& iv,
                               Tolerance tol = {});

/// Discrete counterpart of B5: a C1-style test per intervened trajectory
/// (2p observation sets ordered latent-major), then B4.
IdentifiabilityReport check_C3(const std::vector<ObservationSet>& sets, int d, int p,
                               const Matrix& b, const Matrix& g, Tolerance tol = {});

}  // namespace odeident
