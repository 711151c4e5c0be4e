#include "core/identifiability.hpp"

#include "core/linalg.hpp"

#include <algorithm>

namespace odeident {

namespace {

IdentifiabilityReport rank_report(std::string condition_id, const Matrix& tested,
                                  int required_rank, Tolerance tol) {
    const RankResult rr = numerical_rank(tested, tol);
    IdentifiabilityReport report;
    report.condition_id = std::move(condition_id);
    report.tested_rows = static_cast<int>(tested.rows());
    report.tested_cols = static_cast<int>(tested.cols());
    report.computed_rank = rr.rank;
    report.required_rank = required_rank;
    report.holds = rr.rank == required_rank;
    report.margin = rr.smallest_retained_sv;
    report.largest_discarded_sv = rr.largest_discarded_sv;
    report.tolerance_used = rr.tolerance_used;
    return report;
}

IdentifiabilityReport krylov_report(std::string condition_id, const Matrix& a, const Vector& v,
                                    Tolerance tol) {
    const int d = static_cast<int>(a.rows());
    return rank_report(std::move(condition_id), krylov_matrix(a, v, d), d, tol);
}

Matrix stacked_padded_observations(const std::vector<double>& times,
                                   const std::vector<Vector>& xs, int p) {
    require(times.size() == xs.size(), errc::dimension_mismatch,
            "observation times and states have inconsistent lengths");
    require(!xs.empty(), errc::invalid_argument, "need at least one observation");
    const Index d = xs.front().size();
    Matrix stacked(static_cast<Index>(xs.size()), d + p);
    for (std::size_t j = 0; j < xs.size(); ++j) {
        require(xs[j].size() == d, errc::dimension_mismatch, "ragged observation dimensions");
        stacked.row(static_cast<Index>(j)) << xs[j].transpose(),
            time_power_row(times[j], p).transpose();
    }
    return stacked;
}

Matrix stacked_moments(const Matrix& b, const Matrix& g) {
    const Index d = b.rows();
    const Index p = g.rows();
    Matrix w(d * p, p);
    Matrix bgk = b;
    for (Index k = 0; k < p; ++k) {
        if (k > 0) bgk = bgk * g;
        w.middleRows(k * d, d) = bgk;
    }
    return w;
}

IdentifiabilityReport compose(std::string condition_id,
                              std::vector<IdentifiabilityReport> parts) {
    IdentifiabilityReport report;
    report.condition_id = std::move(condition_id);
    report.holds = std::all_of(parts.begin(), parts.end(),
                               [](const IdentifiabilityReport& r) { return r.holds; });
    report.sub_reports = std::move(parts);
    return report;
}

}  // namespace

IdentifiabilityReport check_A0(const Vector& x0, const Matrix& a, Tolerance tol) {
    return krylov_report("A0", a, x0, tol);
}

IdentifiabilityReport check_A1(const LatentDriverSystem& sys, Tolerance tol) {
    return krylov_report("A1", sys.A, beta_vector(sys), tol);
}

IdentifiabilityReport check_B1(const LatentDagSystem& sys, Tolerance tol) {
    return krylov_report("B1", sys.A, gamma_vector(sys), tol);
}

IdentifiabilityReport check_aug_A0(const AugmentedSystem& aug, Tolerance tol) {
    std::string id = "AUG_A0";
    if (!aug.basis_labels.empty()) {
        if (aug.basis_labels.front() == "e^t") id = "D1";
        if (aug.basis_labels.front() == "sin t") id = "E1";
    }
    return krylov_report(std::move(id), aug.F, aug.y0, tol);
}

IdentifiabilityReport check_C1(const std::vector<double>& times, const std::vector<Vector>& xs,
                               int p, Tolerance tol) {
    const Matrix stacked = stacked_padded_observations(times, xs, p);
    return rank_report("C1", stacked, static_cast<int>(stacked.cols()), tol);
}

IdentifiabilityReport check_B2_B3_B4(const LatentDagSystem& sys, const std::vector<Vector>& z0_stars,
                                     Tolerance tol) {
    const int p = sys.p();
    require(static_cast<int>(z0_stars.size()) == p, errc::invalid_argument,
            "need exactly p controlled initial latent states");

    std::vector<IdentifiabilityReport> parts;
    // B2: every controlled initial condition must itself pass the single-
    // trajectory test. All sub-checks are evaluated even after a failure.
    std::vector<IdentifiabilityReport> b2_parts;
    for (int i = 0; i < p; ++i)
        b2_parts.push_back(
            krylov_report("B2[" + std::to_string(i + 1) + "]", sys.A,
                          gamma_vector_for(sys, z0_stars[i]), tol));
    parts.push_back(compose("B2", std::move(b2_parts)));

    Matrix z(p, p);
    for (int i = 0; i < p; ++i) z.col(i) = z0_stars[i];
    parts.push_back(rank_report("B3", z, p, tol));
    parts.push_back(rank_report("B4", stacked_moments(sys.B, sys.G), p, tol));
    return compose("B2_B3_B4", std::move(parts));
}

IdentifiabilityReport check_C2(const std::vector<ObservationSet>& trajectories,
                               const std::vector<Vector>& z0_stars, const Matrix& b,
                               const Matrix& g, Tolerance tol) {
    const int p = static_cast<int>(g.rows());
    require(static_cast<int>(trajectories.size()) == p, errc::invalid_argument,
            "C2 needs one observation set per controlled trajectory");
    require(static_cast<int>(z0_stars.size()) == p, errc::invalid_argument,
            "C2 needs the p controlled initial latent states");

    std::vector<IdentifiabilityReport> parts;
    for (int i = 0; i < p; ++i) {
        IdentifiabilityReport sub =
            check_C1(trajectories[i].times, trajectories[i].states, p, tol);
        sub.condition_id = "C2[" + std::to_string(i + 1) + "]";
        parts.push_back(std::move(sub));
    }
    Matrix z(p, p);
    for (int i = 0; i < p; ++i) z.col(i) = z0_stars[i];
    parts.push_back(rank_report("B3", z, p, tol));
    parts.push_back(rank_report("B4", stacked_moments(b, g), p, tol));
    return compose("C2", std::move(parts));
}

IdentifiabilityReport check_B5(const LatentDagSystem& sys, const SingleNodeInterventions& iv,
                               Tolerance tol) {
    const int p = sys.p();
    require(static_cast<int>(iv.values.size()) == p, errc::invalid_argument,
            "B5 needs one intervention pair per latent coordinate");
    std::vector<IdentifiabilityReport> parts;
    for (int j = 0; j < p; ++j) {
        const auto [v1, v2] = iv.values[j];
        require(v1 != v2, errc::invalid_argument,
                "B5 intervention values for latent " + std::to_string(j + 1) + " must differ");
        for (int i = 0; i < 2; ++i) {
            Vector z = sys.z0;
            z(j) = i == 0 ? v1 : v2;
            parts.push_back(krylov_report(
                "B5[" + std::to_string(j + 1) + "," + std::to_string(i + 1) + "]", sys.A,
                gamma_vector_for(sys, z), tol));
        }
    }
    return compose("B5", std::move(parts));
}

IdentifiabilityReport check_C3(const std::vector<ObservationSet>& sets, int d, int p,
                               const Matrix& b, const Matrix& g, Tolerance tol) {
    require(static_cast<int>(sets.size()) == 2 * p, errc::invalid_argument,
            "C3 needs 2p observation sets");
    std::vector<IdentifiabilityReport> parts;
    for (int s = 0; s < 2 * p; ++s) {
        for (const Vector& x : sets[s].states)
            require(x.size() == d, errc::dimension_mismatch, "C3 observation dimension mismatch");
        IdentifiabilityReport sub = check_C1(sets[s].times, sets[s].states, p, tol);
        sub.condition_id =
            "C3[" + std::to_string(s / 2 + 1) + "," + std::to_string(s % 2 + 1) + "]";
        parts.push_back(std::move(sub));
    }
    parts.push_back(rank_report("B4", stacked_moments(b, g), p, tol));
    return compose("C3", std::move(parts));
}

}  // namespace odeident
