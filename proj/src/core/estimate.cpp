#include "core/estimate.hpp"

#include "core/rng.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>

namespace odeident {

namespace {

constexpr double PENALTY = 1e10;

std::string product_block_label(int k) {
    if (k == 0) return "Bz0";
    if (k == 1) return "BGz0";
    return "BG" + std::to_string(k) + "z0";
}

double mean_squared_diff(const Matrix& a, const Matrix& b) {
    return (a - b).squaredNorm() / static_cast<double>(a.size());
}

double mean_squared_diff(const Vector& a, const Vector& b) {
    return (a - b).squaredNorm() / static_cast<double>(a.size());
}

}  // namespace

int ParameterLayout::size() const {
    const int shared = d + d * d + d * p + p * p;  // x0, A, B, G
    return mode == EstimationMode::single_trajectory_eta ? shared + p : shared;
}

Vector ParameterLayout::pack(const LatentDagSystem& truth) const {
    Vector params(size());
    int at = 0;
    params.segment(at, d) = truth.x0;
    at += d;
    if (mode == EstimationMode::single_trajectory_eta) {
        params.segment(at, p) = truth.z0;
        at += p;
    }
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) params(at++) = truth.A(i, j);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < p; ++j) params(at++) = truth.B(i, j);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) params(at++) = truth.G(i, j);
    return params;
}

ParameterLayout::Decoded ParameterLayout::decode(const Vector& params) const {
    require(params.size() == size(), errc::dimension_mismatch,
            "parameter vector does not match layout");
    Decoded out;
    int at = 0;
    out.x0 = params.segment(at, d);
    at += d;
    if (mode == EstimationMode::single_trajectory_eta) {
        out.z0 = params.segment(at, p);
        at += p;
    }
    out.A.resize(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) out.A(i, j) = params(at++);
    out.B.resize(d, p);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < p; ++j) out.B(i, j) = params(at++);
    out.G.resize(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) out.G(i, j) = params(at++);
    return out;
}

ParameterLayout EstimationProblem::layout() const {
    return ParameterLayout{mode, truth.d(), truth.p()};
}

Vector residuals(const Vector& params, const EstimationProblem& problem, bool* failure) {
    const ParameterLayout layout = problem.layout();
    const ParameterLayout::Decoded q = layout.decode(params);
    if (failure) *failure = false;

    Index total = 0;
    for (const TrajectoryGrid& grid : problem.observations) total += grid.states.size();
    Vector r(total);

    Index at = 0;
    for (std::size_t i = 0; i < problem.observations.size(); ++i) {
        const TrajectoryGrid& grid = problem.observations[i];
        const Vector& z0 = problem.mode == EstimationMode::single_trajectory_eta
                               ? q.z0
                               : problem.z0_stars[i];
        for (std::size_t j = 0; j < grid.times.size(); ++j) {
            Vector model = observed_state_raw(q.x0, z0, q.A, q.B, q.G, grid.times[j]);
            if (!model.allFinite()) {
                if (failure) *failure = true;
                model = Vector::Constant(layout.d, PENALTY);
            }
            r.segment(at, layout.d) =
                model - grid.states.row(static_cast<Index>(j)).transpose();
            at += layout.d;
        }
    }
    return r;
}

Matrix fd_jacobian(const std::function<Vector(const Vector&)>& f, const Vector& x,
                   const Vector& fx) {
    const double sqrt_eps = std::sqrt(std::numeric_limits<double>::epsilon());
    Matrix jac(fx.size(), x.size());
    Vector probe = x;
    for (Index i = 0; i < x.size(); ++i) {
        const double h = sqrt_eps * std::max(std::abs(x(i)), 1.0);
        probe(i) = x(i) + h;
        jac.col(i) = (f(probe) - fx) / h;
        probe(i) = x(i);
    }
    return jac;
}

EstimationResult fit_nls(const EstimationProblem& problem, const Vector& init) {
    require(!problem.observations.empty(), errc::invalid_argument, "no observations supplied");
    if (problem.mode == EstimationMode::multi_trajectory_eta_family) {
        require(problem.z0_stars.size() == problem.observations.size(), errc::invalid_argument,
                "controlled mode needs one z0* per trajectory");
        require(static_cast<int>(problem.z0_stars.size()) == problem.truth.p(),
                errc::invalid_argument, "controlled mode needs p trajectories");
    }

    const SolverOptions& opt = problem.solver;
    const int n_params = problem.layout().size();
    const int max_iterations =
        opt.max_iterations > 0 ? opt.max_iterations : 200 * n_params;

    EstimationResult result;
    bool any_failure = false;
    auto f = [&](const Vector& q) {
        bool bad = false;
        Vector r = residuals(q, problem, &bad);
        any_failure = any_failure || bad;
        return r;
    };

    Vector x = init;
    Vector r = f(x);
    double norm = r.norm();
    double lambda = -1.0;  // set from the first Jacobian

    int iterations = 0;
    bool converged = norm <= opt.residual_tolerance;
    result.residual_history.push_back(norm);

    while (!converged && iterations < max_iterations) {
        const Matrix jac = fd_jacobian(f, x, r);
        const Vector gradient = jac.transpose() * r;
        if (gradient.lpNorm<Eigen::Infinity>() <= opt.gradient_tolerance) {
            converged = true;
            break;
        }
        const Matrix jtj = jac.transpose() * jac;
        Vector damping = jtj.diagonal();
        const double diag_max = damping.maxCoeff();
        const double diag_floor = std::max(diag_max, 1.0) * 1e-14;
        damping = damping.cwiseMax(diag_floor);
        if (lambda < 0.0) lambda = 1e-3;

        bool accepted = false;
        while (!accepted) {
            Matrix system = jtj;
            system.diagonal() += lambda * damping;
            const Vector step = system.ldlt().solve(-gradient);
            const Vector x_new = x + step;
            const Vector r_new = f(x_new);
            const double norm_new = r_new.norm();
            if (norm_new < norm) {
                accepted = true;
                ++iterations;
                x = x_new;
                r = r_new;
                const double decrease = norm - norm_new;
                norm = norm_new;
                result.residual_history.push_back(norm);
                lambda = std::max(lambda * 0.3, 1e-12);
                if (norm <= opt.residual_tolerance ||
                    step.norm() <= opt.step_tolerance * (x.norm() + opt.step_tolerance) ||
                    decrease <= opt.residual_tolerance * std::max(norm, 1e-300))
                    converged = true;
            } else {
                lambda *= 4.0;
                if (lambda > 1e15) break;  // no direction makes progress
            }
        }
        if (!accepted) break;  // stalled; report best-so-far
    }

    result.fitted = x;
    result.residual_norm = norm;
    result.iterations = iterations;
    result.converged = converged;
    result.residual_failure = any_failure;
    return result;
}

EstimationResult fit_nls(const EstimationProblem& problem) {
    const ParameterLayout layout = problem.layout();
    const Vector center = layout.pack(problem.truth);
    CounterRng rng(problem.seed, 0);
    Vector init(center.size());
    for (Index i = 0; i < center.size(); ++i)
        init(i) = center(i) + rng.uniform(-problem.init_delta, problem.init_delta);
    return fit_nls(problem, init);
}

std::vector<std::pair<std::string, double>> mse_blocks(const Vector& fitted,
                                                       const EstimationProblem& problem) {
    const ParameterLayout layout = problem.layout();
    const ParameterLayout::Decoded fit = layout.decode(fitted);
    const LatentDagSystem& truth = problem.truth;

    std::vector<std::pair<std::string, double>> blocks;
    blocks.emplace_back("x0", mean_squared_diff(fit.x0, truth.x0));
    blocks.emplace_back("A", mean_squared_diff(fit.A, truth.A));
    if (problem.mode == EstimationMode::single_trajectory_eta) {
        // Only the moment products are identified from one trajectory, so the
        // comparison is between fitted and true B G^k z0, not raw factors.
        Vector gz_fit = fit.z0;
        Vector gz_true = truth.z0;
        for (int k = 0; k < layout.p; ++k) {
            if (k > 0) {
                gz_fit = fit.G * gz_fit;
                gz_true = truth.G * gz_true;
            }
            blocks.emplace_back(product_block_label(k),
                                mean_squared_diff(Vector(fit.B * gz_fit),
                                                  Vector(truth.B * gz_true)));
        }
    } else {
        blocks.emplace_back("B", mean_squared_diff(fit.B, truth.B));
        blocks.emplace_back("G", mean_squared_diff(fit.G, truth.G));
    }
    return blocks;
}

ReplicationSummary run_replications(const EstimationProblem& problem, int replications) {
    require(replications >= 1, errc::invalid_argument, "at least one replication required");
    const ParameterLayout layout = problem.layout();
    const Vector center = layout.pack(problem.truth);

    ReplicationSummary summary;
    summary.replications = replications;
    summary.n_observations =
        static_cast<int>(problem.observations.front().times.size());

    for (int rep = 0; rep < replications; ++rep) {
        CounterRng rng(problem.seed, static_cast<std::uint64_t>(rep));
        Vector init(center.size());
        for (Index i = 0; i < center.size(); ++i)
            init(i) = center(i) + rng.uniform(-problem.init_delta, problem.init_delta);

        const EstimationResult fit = fit_nls(problem, init);
        if (!fit.converged || fit.residual_failure) ++summary.failed_fits;

        const auto blocks = mse_blocks(fit.fitted, problem);
        if (summary.blocks.empty())
            for (const auto& [name, _] : blocks) summary.blocks.push_back(name);
        std::vector<double> row;
        row.reserve(blocks.size());
        for (const auto& [_, mse] : blocks) row.push_back(mse);
        summary.per_replication.push_back(std::move(row));
    }

    const std::size_t n_blocks = summary.blocks.size();
    summary.mse_mean.assign(n_blocks, 0.0);
    summary.mse_var.assign(n_blocks, 0.0);
    for (const auto& row : summary.per_replication)
        for (std::size_t b = 0; b < n_blocks; ++b) summary.mse_mean[b] += row[b];
    for (std::size_t b = 0; b < n_blocks; ++b)
        summary.mse_mean[b] /= static_cast<double>(replications);
    if (replications > 1) {
        for (const auto& row : summary.per_replication)
            for (std::size_t b = 0; b < n_blocks; ++b) {
                const double dev = row[b] - summary.mse_mean[b];
                summary.mse_var[b] += dev * dev;
            }
        for (std::size_t b = 0; b < n_blocks; ++b)
            summary.mse_var[b] /= static_cast<double>(replications - 1);
    }
    return summary;
}

}  // namespace odeident
