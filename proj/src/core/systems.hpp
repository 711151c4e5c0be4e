#pragma once

#include "core/types.hpp"

#include <string>
#include <variant>
#include <vector>

namespace odeident {

/// Observables coupled to latents whose own dynamics form a DAG:
///   x' = A x + B z,  z' = G z.
/// G is given in the user's variable order; construction validates that its
/// nonzero pattern admits a strictly-upper-triangular reordering (hence G is
/// nilpotent with index <= p) and stores that order.
struct LatentDagSystem {
    Vector x0;
    Vector z0;
    Matrix A;
    Matrix B;
    Matrix G;
    std::vector<int> dag_order;  // dag_order[k] = original index at triangular position k

    LatentDagSystem(Vector x0, Vector z0, Matrix A, Matrix B, Matrix G);

    int d() const { return static_cast<int>(x0.size()); }
    int p() const { return static_cast<int>(z0.size()); }
};

struct PolynomialDriver {
    std::vector<Vector> coefficients;  // v_0 .. v_r, each of length p
    int degree() const { return static_cast<int>(coefficients.size()) - 1; }
};
struct ExponentialDriver {
    Vector v;
};
struct TrigonometricDriver {
    Vector v1;
    Vector v2;
};
using Driver = std::variant<PolynomialDriver, ExponentialDriver, TrigonometricDriver>;

/// Observables coupled to latents driven by a known function of time:
///   x' = A x + B z,  z' = f(t).
struct LatentDriverSystem {
    Vector x0;
    Vector z0;
    Matrix A;
    Matrix B;
    Driver driver;

    LatentDriverSystem(Vector x0, Vector z0, Matrix A, Matrix B, Driver driver);

    int d() const { return static_cast<int>(x0.size()); }
    int p() const { return static_cast<int>(z0.size()); }
};

/// Homogeneous pair (F, y0) whose flow reproduces the source system's
/// observables in the first d coordinates; the remaining coordinates span
/// the named time basis.
struct AugmentedSystem {
    Matrix F;
    Vector y0;
    int observed_dim = 0;
    std::vector<std::string> basis_labels;

    int m() const { return static_cast<int>(y0.size()); }
};

/// Returns an ordering of the latent indices under which G is strictly upper
/// triangular (identity if it already is). Throws errc::not_a_dag for cyclic
/// patterns or nonzero diagonal entries.
std::vector<int> validate_latent_dag(const Matrix& g);

AugmentedSystem augment_dag(const LatentDagSystem& sys);
AugmentedSystem augment_poly(const LatentDriverSystem& sys);
AugmentedSystem augment_exp(const LatentDriverSystem& sys);
AugmentedSystem augment_trig(const LatentDriverSystem& sys);

/// Augmentation matching the system's driver kind.
AugmentedSystem augment_driver(const LatentDriverSystem& sys);

/// beta = A^{r+1}(A x0 + B z0) + sum_{j=0}^{r} j! A^{r-j} B v_j
Vector beta_vector(const LatentDriverSystem& sys);

/// gamma = A^p x0 + sum_{j=0}^{p-1} A^{p-1-j} B G^j z0
Vector gamma_vector(const LatentDagSystem& sys);

/// gamma with z0 replaced by a controlled initial latent state.
Vector gamma_vector_for(const LatentDagSystem& sys, const Vector& z0_star);

}  // namespace odeident
