#include "core/estimate.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <cstring>

using namespace odeident;
using namespace odeident::testing;

namespace {

EstimationProblem small_problem(std::uint64_t seed) {
    CounterRng rng(seed, 99);
    const LatentDagSystem sys = random_dag_system(rng, 2, 2);
    EstimationProblem problem{EstimationMode::single_trajectory_eta, sys};
    problem.observations.push_back(sample_trajectory(sys, equally_spaced(4, 0.0, 1.0)));
    problem.init_delta = 0.1;
    problem.seed = seed;
    return problem;
}

}  // namespace

TEST_SUITE_BEGIN("properties");

TEST_CASE("the forward-difference Jacobian matches a central-difference oracle") {
    const EstimationProblem problem = small_problem(5);
    const Vector x = problem.layout().pack(problem.truth) * 1.07;  // off the optimum
    auto f = [&](const Vector& q) { return residuals(q, problem); };
    const Vector fx = f(x);
    const Matrix jac = fd_jacobian(f, x, fx);

    Matrix central(fx.size(), x.size());
    Vector probe = x;
    for (Index i = 0; i < x.size(); ++i) {
        const double h = 1e-6 * std::max(std::abs(x(i)), 1.0);
        probe(i) = x(i) + h;
        const Vector hi = f(probe);
        probe(i) = x(i) - h;
        const Vector lo = f(probe);
        probe(i) = x(i);
        central.col(i) = (hi - lo) / (2 * h);
    }
    const double scale = std::max(1.0, central.cwiseAbs().maxCoeff());
    CHECK((jac - central).cwiseAbs().maxCoeff() <= 1e-4 * scale);
}

TEST_CASE("identical problems and seeds reproduce summaries bitwise") {
    const EstimationProblem problem = small_problem(17);
    const ReplicationSummary a = run_replications(problem, 3);
    const ReplicationSummary b = run_replications(problem, 3);
    REQUIRE(a.blocks == b.blocks);
    for (std::size_t i = 0; i < a.mse_mean.size(); ++i) {
        CHECK(std::memcmp(&a.mse_mean[i], &b.mse_mean[i], sizeof(double)) == 0);
        CHECK(std::memcmp(&a.mse_var[i], &b.mse_var[i], sizeof(double)) == 0);
    }
    REQUIRE(a.per_replication.size() == b.per_replication.size());
    for (std::size_t r = 0; r < a.per_replication.size(); ++r)
        for (std::size_t c = 0; c < a.per_replication[r].size(); ++c)
            CHECK(std::memcmp(&a.per_replication[r][c], &b.per_replication[r][c],
                              sizeof(double)) == 0);
}

TEST_CASE("accepted steps never increase the residual norm") {
    for (std::uint64_t seed : {2u, 9u, 23u}) {
        const EstimationProblem problem = small_problem(seed);
        const EstimationResult result = fit_nls(problem);
        REQUIRE(result.residual_history.size() >= 1);
        for (std::size_t i = 1; i < result.residual_history.size(); ++i)
            CHECK(result.residual_history[i] <= result.residual_history[i - 1]);
    }
}

TEST_SUITE_END();
