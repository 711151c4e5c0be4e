#include "core/simulate.hpp"

#include "core/linalg.hpp"

#include <cmath>

namespace odeident {

namespace {

Matrix block_generator(const Matrix& a, const Matrix& b, const Matrix& g) {
    const Index d = a.rows();
    const Index p = g.rows();
    Matrix m = Matrix::Zero(d + p, d + p);
    m.topLeftCorner(d, d) = a;
    m.topRightCorner(d, p) = b;
    m.bottomRightCorner(p, p) = g;
    return m;
}

void check_grid(const std::vector<double>& times) {
    require(!times.empty(), errc::invalid_argument, "time grid must be nonempty");
    for (std::size_t j = 0; j < times.size(); ++j) {
        require(std::isfinite(times[j]) && times[j] >= 0.0, errc::invalid_argument,
                "times must be finite and nonnegative");
        if (j > 0)
            require(times[j] > times[j - 1], errc::invalid_argument,
                    "times must be strictly increasing");
    }
}

template <typename System>
TrajectoryGrid sample_impl(const System& sys, const std::vector<double>& times,
                           const char* label) {
    check_grid(times);
    TrajectoryGrid grid;
    grid.times = times;
    grid.states.resize(static_cast<Index>(times.size()), sys.d());
    for (std::size_t j = 0; j < times.size(); ++j)
        grid.states.row(static_cast<Index>(j)) = observed_state(sys, times[j]).transpose();
    grid.source_label = label;
    return grid;
}

}  // namespace

Vector latent_state(const LatentDagSystem& sys, double t) {
    const int p = sys.p();
    Vector z = sys.z0;
    Vector gz = sys.z0;
    double scale = 1.0;
    for (int k = 1; k < p; ++k) {
        gz = sys.G * gz;
        scale *= t / k;
        z += gz * scale;
    }
    return z;
}

Vector observed_state(const LatentDagSystem& sys, double t) {
    return observed_state_raw(sys.x0, sys.z0, sys.A, sys.B, sys.G, t);
}

Vector observed_state(const LatentDriverSystem& sys, double t) {
    const AugmentedSystem aug = augment_driver(sys);
    return (mat_exp(aug.F, t) * aug.y0).head(sys.d());
}

Vector observed_state_raw(const Vector& x0, const Vector& z0, const Matrix& a, const Matrix& b,
                          const Matrix& g, double t) {
    const Index d = x0.size();
    Vector state(d + z0.size());
    state.head(d) = x0;
    state.tail(z0.size()) = z0;
    return (mat_exp(block_generator(a, b, g), t) * state).head(d);
}

TrajectoryGrid sample_trajectory(const LatentDagSystem& sys, const std::vector<double>& times) {
    return sample_impl(sys, times, "latent_dag");
}

TrajectoryGrid sample_trajectory(const LatentDriverSystem& sys, const std::vector<double>& times) {
    return sample_impl(sys, times, "latent_driver");
}

std::vector<double> equally_spaced(int n, double t_start, double t_end) {
    require(n >= 1, errc::invalid_argument, "equally_spaced: n must be positive");
    require(t_end > t_start, errc::invalid_argument, "equally_spaced: t_end must exceed t_start");
    std::vector<double> times(static_cast<std::size_t>(n));
    if (n == 1) {
        times[0] = t_start;
        return times;
    }
    for (int i = 0; i < n; ++i)
        times[static_cast<std::size_t>(i)] = t_start + (t_end - t_start) * i / (n - 1);
    times.back() = t_end;
    return times;
}

std::function<Vector(double)> intervene_clamp(const LatentDagSystem& sys,
                                              const InterventionSpec& spec) {
    const int d = sys.d();
    const int p = sys.p();
    require(spec.clamped_index >= 1 && spec.clamped_index <= d, errc::invalid_argument,
            "intervene_clamp: clamped coordinate out of range");
    require(std::isfinite(spec.value), errc::invalid_argument,
            "intervene_clamp: clamp value must be finite");
    const int c = spec.clamped_index - 1;

    std::vector<int> keep;
    for (int i = 0; i < d; ++i)
        if (i != c) keep.push_back(i);
    const int du = static_cast<int>(keep.size());

    // Reduced dynamics: u' = A_uu u + a_c * value + B_u z(t). The constant and
    // the polynomial z(t) both live in the [1, t, ..., t^{p-1}] basis, so the
    // clamped system is again a homogeneous augmented flow.
    Matrix f = Matrix::Zero(du + p, du + p);
    for (int i = 0; i < du; ++i)
        for (int j = 0; j < du; ++j) f(i, j) = sys.A(keep[i], keep[j]);
    Vector gz = sys.z0;
    double factorial = 1.0;
    for (int k = 0; k < p; ++k) {
        if (k > 0) {
            gz = sys.G * gz;
            factorial *= k;
        }
        const Vector column = sys.B * gz / factorial;
        for (int i = 0; i < du; ++i) f(i, du + k) = column(keep[i]);
    }
    for (int i = 0; i < du; ++i) f(i, du) += sys.A(keep[i], c) * spec.value;
    for (int k = 1; k < p; ++k) f(du + k, du + k - 1) = static_cast<double>(k);

    Vector w0 = Vector::Zero(du + p);
    for (int i = 0; i < du; ++i) w0(i) = sys.x0(keep[i]);
    w0(du) = 1.0;

    return [f, w0, keep, c, d, value = spec.value](double t) {
        const Vector w = mat_exp(f, t) * w0;
        Vector x(d);
        x(c) = value;
        for (std::size_t i = 0; i < keep.size(); ++i) x(keep[i]) = w(static_cast<Index>(i));
        return x;
    };
}

}  // namespace odeident
