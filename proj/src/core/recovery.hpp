#pragma once

#include "core/types.hpp"

#include <string>
#include <vector>

namespace odeident {

/// The quantities a single controlled trajectory pins down: the shared
/// (x0, A) and the moment vectors B G^k z0 for k = 0..p-1.
struct IdentifiedProducts {
    Vector x0;
    Matrix A;
    std::vector<Vector> moments;  // moments[k] = B G^k z0
    std::string z0_label;

    int p() const { return static_cast<int>(moments.size()); }
};

/// B = S Z^{-1} from the first moments of p product sets; Z's columns are the
/// controlled initial latent states. Throws errc::singular_matrix when Z is
/// rank deficient (a B3 violation).
Matrix recover_B(const std::vector<IdentifiedProducts>& products, const Matrix& z);

/// All of B G^k for k = 0..p-1, each via the same Z inversion.
std::vector<Matrix> recover_moment_matrices(const std::vector<IdentifiedProducts>& products,
                                            const Matrix& z);

/// G = W_p^{-1} V_p where W stacks {B, BG, ..., BG^{p-1}}, V stacks
/// {BG, ..., BG^p} (last block zero), and the p rows are chosen by a
/// pivoted factorization for conditioning. Throws errc::singular_matrix
/// when rank(W) < p (a B4 violation).
Matrix recover_G(const std::vector<Matrix>& bg_powers);

/// One pair of first moments per latent coordinate under two single-node
/// interventions with known, distinct values.
struct InterventionMomentPair {
    Vector moment1;  // B z~_{0j}^1
    Vector moment2;  // B z~_{0j}^2
    double value1 = 0.0;
    double value2 = 0.0;
};

/// Column-by-column B from single-node intervention pairs:
/// B(:, j) = (moment1 - moment2) / (value1 - value2).
Matrix recover_B_entrywise(const std::vector<InterventionMomentPair>& pairs);

}  // namespace odeident
