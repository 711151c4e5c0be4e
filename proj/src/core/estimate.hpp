#pragma once

#include "core/simulate.hpp"
#include "core/systems.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace odeident {

enum class EstimationMode {
    single_trajectory_eta,      // one trajectory, z0 unknown and estimated
    multi_trajectory_eta_family // p trajectories with known controlled z0*
};

struct SolverOptions {
    double step_tolerance = 1e-8;
    double residual_tolerance = 1e-8;
    double gradient_tolerance = 1e-8;
    int max_iterations = 0;  // 0 means 200 x parameter count
};

/// Free parameters are the full flattened blocks: (x0, z0, A, B, G) in the
/// single-trajectory mode, (x0, A, B, G) in the controlled-trajectory mode.
/// G is estimated as a full p x p matrix; iterates need not stay in the DAG
/// class, so the model is always evaluated through the block flow.
struct ParameterLayout {
    EstimationMode mode;
    int d = 0;
    int p = 0;

    int size() const;
    Vector pack(const LatentDagSystem& truth) const;

    struct Decoded {
        Vector x0;
        Vector z0;  // empty in the controlled mode
        Matrix A;
        Matrix B;
        Matrix G;
    };
    Decoded decode(const Vector& params) const;
};

struct EstimationProblem {
    EstimationMode mode = EstimationMode::single_trajectory_eta;
    LatentDagSystem truth;
    std::vector<Vector> z0_stars;              // controlled mode: p entries
    std::vector<TrajectoryGrid> observations;  // 1 grid, or p grids (controlled)
    double init_delta = 0.1;                   // half-width of the uniform init perturbation
    SolverOptions solver;
    std::uint64_t seed = 0;

    ParameterLayout layout() const;
};

struct EstimationResult {
    Vector fitted;
    double residual_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    bool residual_failure = false;  // a model evaluation went non-finite along the way
    std::vector<double> residual_history;  // init norm, then the norm after each accepted step
};

struct ReplicationSummary {
    std::vector<std::string> blocks;
    std::vector<double> mse_mean;
    std::vector<double> mse_var;
    int replications = 0;
    int n_observations = 0;
    int failed_fits = 0;
    std::vector<std::vector<double>> per_replication;  // [rep][block] squared errors
};

/// Stacked model-minus-observation residuals over all trajectories and times.
/// Non-finite model states are flagged and replaced by a large penalty so the
/// solver backs off instead of crashing.
Vector residuals(const Vector& params, const EstimationProblem& problem,
                 bool* failure = nullptr);

/// Damped Gauss-Newton (Levenberg-Marquardt) iteration with a forward-difference
/// Jacobian. Accepted steps never increase the residual norm.
EstimationResult fit_nls(const EstimationProblem& problem, const Vector& init);

/// As above with the init drawn from the problem's replication-0 stream.
EstimationResult fit_nls(const EstimationProblem& problem);

/// R independent fits with per-replication init streams derived from
/// (seed, replication index); failed fits are counted and still aggregated.
ReplicationSummary run_replications(const EstimationProblem& problem, int replications);

/// Named per-block mean squared errors of a fitted parameter vector against
/// the truth: product blocks (B G^k z0) in the single-trajectory mode, raw
/// matrices in the controlled mode.
std::vector<std::pair<std::string, double>> mse_blocks(const Vector& fitted,
                                                       const EstimationProblem& problem);

/// Forward-difference Jacobian of a residual map (step = sqrt(machine eps)
/// scaled by the parameter); exposed for the solver's sanity tests.
Matrix fd_jacobian(const std::function<Vector(const Vector&)>& f, const Vector& x,
                   const Vector& fx);

}  // namespace odeident
