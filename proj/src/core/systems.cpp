#include "core/systems.hpp"

#include <algorithm>
#include <cmath>

namespace odeident {

namespace {

void check_dims(const Vector& x0, const Vector& z0, const Matrix& a, const Matrix& b,
                const char* who) {
    const Index d = x0.size();
    const Index p = z0.size();
    require(d >= 1, errc::dimension_mismatch, std::string(who) + ": x0 must be nonempty");
    require(p >= 1, errc::dimension_mismatch, std::string(who) + ": p = 0 systems are out of domain");
    require(a.rows() == d && a.cols() == d, errc::dimension_mismatch,
            std::string(who) + ": A must be d x d");
    require(b.rows() == d && b.cols() == p, errc::dimension_mismatch,
            std::string(who) + ": B must be d x p");
    require(x0.allFinite() && z0.allFinite() && a.allFinite() && b.allFinite(),
            errc::invalid_argument, std::string(who) + ": non-finite entries");
}

// F = [[A, c_0, ..., c_{q-1}], [0, N]] with N carrying the subdiagonal 1..q-1,
// i.e. the derivative action on the basis [1, t, ..., t^{q-1}].
Matrix polynomial_basis_frame(const Matrix& a, const std::vector<Vector>& top_columns) {
    const Index d = a.rows();
    const Index q = static_cast<Index>(top_columns.size());
    Matrix f = Matrix::Zero(d + q, d + q);
    f.topLeftCorner(d, d) = a;
    for (Index k = 0; k < q; ++k) f.block(0, d + k, d, 1) = top_columns[k];
    for (Index k = 1; k < q; ++k) f(d + k, d + k - 1) = static_cast<double>(k);
    return f;
}

Vector unit_start(const Vector& x0, Index extra) {
    Vector y0 = Vector::Zero(x0.size() + extra);
    y0.head(x0.size()) = x0;
    y0(x0.size()) = 1.0;
    return y0;
}

std::string power_label(int k) {
    if (k == 0) return "1";
    if (k == 1) return "t";
    return "t^" + std::to_string(k);
}

}  // namespace

std::vector<int> validate_latent_dag(const Matrix& g) {
    require(g.rows() == g.cols(), errc::dimension_mismatch, "G must be square");
    const int p = static_cast<int>(g.rows());
    for (int i = 0; i < p; ++i)
        require(g(i, i) == 0.0, errc::not_a_dag, "G has a nonzero diagonal (latent self-loop)");

    // Strictly upper triangular in the new order means: the row placed last is
    // zero within the remaining set. Peel such rows from the back; preferring
    // the largest index keeps already-triangular inputs at the identity.
    std::vector<int> order(p);
    std::vector<bool> remaining(p, true);
    for (int pos = p - 1; pos >= 0; --pos) {
        int pick = -1;
        for (int i = p - 1; i >= 0; --i) {
            if (!remaining[i]) continue;
            bool row_zero = true;
            for (int j = 0; j < p && row_zero; ++j)
                if (remaining[j] && g(i, j) != 0.0) row_zero = false;
            if (row_zero) {
                pick = i;
                break;
            }
        }
        require(pick >= 0, errc::not_a_dag, "latent coupling pattern contains a cycle");
        order[pos] = pick;
        remaining[pick] = false;
    }
    return order;
}

LatentDagSystem::LatentDagSystem(Vector x0_in, Vector z0_in, Matrix a_in, Matrix b_in, Matrix g_in)
    : x0(std::move(x0_in)), z0(std::move(z0_in)), A(std::move(a_in)), B(std::move(b_in)),
      G(std::move(g_in)) {
    check_dims(x0, z0, A, B, "LatentDagSystem");
    require(G.rows() == z0.size() && G.cols() == z0.size(), errc::dimension_mismatch,
            "LatentDagSystem: G must be p x p");
    require(G.allFinite(), errc::invalid_argument, "LatentDagSystem: non-finite entries in G");
    dag_order = validate_latent_dag(G);
}

LatentDriverSystem::LatentDriverSystem(Vector x0_in, Vector z0_in, Matrix a_in, Matrix b_in,
                                       Driver driver_in)
    : x0(std::move(x0_in)), z0(std::move(z0_in)), A(std::move(a_in)), B(std::move(b_in)),
      driver(std::move(driver_in)) {
    check_dims(x0, z0, A, B, "LatentDriverSystem");
    const Index p = z0.size();
    if (const auto* poly = std::get_if<PolynomialDriver>(&driver)) {
        require(!poly->coefficients.empty(), errc::invalid_argument,
                "polynomial driver needs at least the degree-0 coefficient");
        for (const Vector& v : poly->coefficients)
            require(v.size() == p, errc::dimension_mismatch,
                    "polynomial coefficient length must equal p");
    } else if (const auto* expd = std::get_if<ExponentialDriver>(&driver)) {
        require(expd->v.size() == p, errc::dimension_mismatch, "exponential v length must equal p");
    } else {
        const auto& trig = std::get<TrigonometricDriver>(driver);
        require(trig.v1.size() == p && trig.v2.size() == p, errc::dimension_mismatch,
                "trigonometric v1/v2 length must equal p");
    }
}

AugmentedSystem augment_dag(const LatentDagSystem& sys) {
    const int p = sys.p();
    std::vector<Vector> cols(p);
    Vector gz = sys.z0;  // G^k z0, divided by k! as we go
    double factorial = 1.0;
    for (int k = 0; k < p; ++k) {
        if (k > 0) {
            gz = sys.G * gz;
            factorial *= k;
        }
        cols[k] = (sys.B * gz) / factorial;
    }
    AugmentedSystem aug;
    aug.F = polynomial_basis_frame(sys.A, cols);
    aug.y0 = unit_start(sys.x0, p);
    aug.observed_dim = sys.d();
    for (int k = 0; k < p; ++k) aug.basis_labels.push_back(power_label(k));
    return aug;
}

AugmentedSystem augment_poly(const LatentDriverSystem& sys) {
    const auto* poly = std::get_if<PolynomialDriver>(&sys.driver);
    require(poly != nullptr, errc::invalid_argument, "augment_poly: driver is not polynomial");
    const int r = poly->degree();
    std::vector<Vector> cols(r + 2);
    cols[0] = sys.B * sys.z0;
    for (int k = 0; k <= r; ++k) cols[k + 1] = (sys.B * poly->coefficients[k]) / (k + 1.0);
    AugmentedSystem aug;
    aug.F = polynomial_basis_frame(sys.A, cols);
    aug.y0 = unit_start(sys.x0, r + 2);
    aug.observed_dim = sys.d();
    for (int k = 0; k <= r + 1; ++k) aug.basis_labels.push_back(power_label(k));
    return aug;
}

AugmentedSystem augment_exp(const LatentDriverSystem& sys) {
    const auto* driver = std::get_if<ExponentialDriver>(&sys.driver);
    require(driver != nullptr, errc::invalid_argument, "augment_exp: driver is not exponential");
    const Index d = sys.d();
    AugmentedSystem aug;
    aug.F = Matrix::Zero(d + 2, d + 2);
    aug.F.topLeftCorner(d, d) = sys.A;
    aug.F.block(0, d, d, 1) = sys.B * driver->v;
    aug.F.block(0, d + 1, d, 1) = sys.B * (sys.z0 - driver->v);
    aug.F(d, d) = 1.0;  // d/dt e^t = e^t
    aug.y0 = Vector::Zero(d + 2);
    aug.y0.head(d) = sys.x0;
    aug.y0(d) = 1.0;
    aug.y0(d + 1) = 1.0;
    aug.observed_dim = sys.d();
    aug.basis_labels = {"e^t", "1"};
    return aug;
}

AugmentedSystem augment_trig(const LatentDriverSystem& sys) {
    const auto* driver = std::get_if<TrigonometricDriver>(&sys.driver);
    require(driver != nullptr, errc::invalid_argument, "augment_trig: driver is not trigonometric");
    const Index d = sys.d();
    AugmentedSystem aug;
    aug.F = Matrix::Zero(d + 3, d + 3);
    aug.F.topLeftCorner(d, d) = sys.A;
    aug.F.block(0, d, d, 1) = sys.B * driver->v2;
    aug.F.block(0, d + 1, d, 1) = -(sys.B * driver->v1);
    aug.F.block(0, d + 2, d, 1) = sys.B * (sys.z0 + driver->v1);
    aug.F(d, d + 1) = 1.0;   // d/dt sin = cos
    aug.F(d + 1, d) = -1.0;  // d/dt cos = -sin
    aug.y0 = Vector::Zero(d + 3);
    aug.y0.head(d) = sys.x0;
    aug.y0(d + 1) = 1.0;
    aug.y0(d + 2) = 1.0;
    aug.observed_dim = sys.d();
    aug.basis_labels = {"sin t", "cos t", "1"};
    return aug;
}

AugmentedSystem augment_driver(const LatentDriverSystem& sys) {
    if (std::holds_alternative<PolynomialDriver>(sys.driver)) return augment_poly(sys);
    if (std::holds_alternative<ExponentialDriver>(sys.driver)) return augment_exp(sys);
    return augment_trig(sys);
}

Vector beta_vector(const LatentDriverSystem& sys) {
    const auto* poly = std::get_if<PolynomialDriver>(&sys.driver);
    require(poly != nullptr, errc::invalid_argument, "beta_vector: driver is not polynomial");
    const int r = poly->degree();
    Vector beta = sys.A * sys.x0 + sys.B * sys.z0;
    for (int i = 0; i <= r; ++i) beta = sys.A * beta;  // A^{r+1}(A x0 + B z0)
    double factorial = 1.0;
    for (int j = 0; j <= r; ++j) {
        if (j > 0) factorial *= j;
        Vector term = sys.B * poly->coefficients[j] * factorial;
        for (int i = 0; i < r - j; ++i) term = sys.A * term;
        beta += term;
    }
    return beta;
}

Vector gamma_vector_for(const LatentDagSystem& sys, const Vector& z0_star) {
    require(z0_star.size() == sys.p(), errc::dimension_mismatch,
            "gamma_vector_for: z0 length must equal p");
    const int p = sys.p();
    Vector gamma = sys.x0;
    for (int i = 0; i < p; ++i) gamma = sys.A * gamma;  // A^p x0
    Vector gz = z0_star;
    for (int j = 0; j < p; ++j) {
        if (j > 0) gz = sys.G * gz;
        Vector term = sys.B * gz;
        for (int i = 0; i < p - 1 - j; ++i) term = sys.A * term;
        gamma += term;
    }
    return gamma;
}

Vector gamma_vector(const LatentDagSystem& sys) { return gamma_vector_for(sys, sys.z0); }

}  // namespace odeident
