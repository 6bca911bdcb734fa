#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace refgov {

using StateVec = std::vector<double>;

/// Thrown when a propagated state becomes non-finite or leaves the plant's
/// operating box.
class IntegrationOverflow : public std::runtime_error {
public:
    IntegrationOverflow(std::size_t state_index, double value);

    std::size_t state_index() const noexcept { return state_index_; }
    double value() const noexcept { return value_; }

private:
    std::size_t state_index_;
    double value_;
};

/// Thrown when a state or disturbance has the wrong dimension.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Closed-loop discrete-time system x+ = f(x, v), y = h(x, v) with a known
/// equilibrium manifold y_ss(v).
///
/// Implementations are immutable after construction; every method is safe to
/// call concurrently.
class Plant {
public:
    virtual ~Plant() = default;

    virtual std::string_view name() const noexcept = 0;
    virtual std::size_t state_dim() const noexcept = 0;

    /// Writes f(x, v) into `next`. `next` must not alias `x`.
    virtual void step_into(std::span<const double> x, double v, std::span<double> next) const = 0;
    virtual double output(std::span<const double> x, double v) const = 0;
    virtual double steady_state_output(double v) const = 0;

    /// States with any coordinate beyond this magnitude abort propagation.
    virtual double operating_bound() const noexcept { return 1e6; }

    StateVec step(std::span<const double> x, double v) const;
};

/// Continuous-time closed loop xdot = g(x, v), discretized by fixed-step RK4.
class ContinuousPlant : public Plant {
public:
    explicit ContinuousPlant(double step_size);

    /// Writes g(x, v) into `dx`.
    virtual void derivative(std::span<const double> x, double v, std::span<double> dx) const = 0;

    double step_size() const noexcept { return step_size_; }

    void step_into(std::span<const double> x, double v, std::span<double> next) const override;

private:
    double step_size_;
};

/// One classical RK4 step x + (h/6)(k1 + 2k2 + 2k3 + k4).
/// Throws IntegrationOverflow if any stage or the result is non-finite.
void rk4_step(const ContinuousPlant& plant, std::span<const double> x, double v, std::span<double> next);
StateVec rk4_step(const ContinuousPlant& plant, std::span<const double> x, double v);

/// Discrete-time LTI closed loop x+ = A x + B v, y = C x + D v with A Schur stable.
class LinearOraclePlant final : public Plant {
public:
    LinearOraclePlant(Eigen::MatrixXd a, Eigen::VectorXd b, Eigen::RowVectorXd c, double d = 0.0);

    std::string_view name() const noexcept override { return "linear-oracle"; }
    std::size_t state_dim() const noexcept override { return static_cast<std::size_t>(a_.rows()); }
    void step_into(std::span<const double> x, double v, std::span<double> next) const override;
    double output(std::span<const double> x, double v) const override;
    double steady_state_output(double v) const override { return dc_gain_ * v; }

    const Eigen::MatrixXd& a() const noexcept { return a_; }
    const Eigen::VectorXd& b() const noexcept { return b_; }
    const Eigen::RowVectorXd& c() const noexcept { return c_; }
    double d() const noexcept { return d_; }
    double dc_gain() const noexcept { return dc_gain_; }

    /// Equilibrium state (I - A)^-1 B v.
    StateVec equilibrium(double v) const;

private:
    Eigen::MatrixXd a_;
    Eigen::VectorXd b_;
    Eigen::RowVectorXd c_;
    double d_;
    double dc_gain_;
    Eigen::VectorXd equilibrium_per_unit_;
};

double spectral_radius(const Eigen::MatrixXd& a);

// Surrogate third-order plant, written generically over the scalar type so a
// single-precision device path can reuse the same equations.
//   x1' = -x1 + tanh(x2)
//   x2' = -x2 + v
//   x3' = -2 x3 + x1
//   y   = x1,   y_ss(v) = tanh(v)
template <typename Real>
constexpr void surrogate_derivative(const Real* x, Real v, Real* dx) noexcept {
    using std::tanh;
    dx[0] = -x[0] + tanh(x[1]);
    dx[1] = -x[1] + v;
    dx[2] = Real(-2) * x[2] + x[0];
}

template <typename Real>
void surrogate_rk4_step(const Real* x, Real v, Real h, Real* next) noexcept {
    Real k1[3], k2[3], k3[3], k4[3], tmp[3];
    const Real half = h / Real(2);
    surrogate_derivative(x, v, k1);
    for (int i = 0; i < 3; ++i) tmp[i] = x[i] + half * k1[i];
    surrogate_derivative(tmp, v, k2);
    for (int i = 0; i < 3; ++i) tmp[i] = x[i] + half * k2[i];
    surrogate_derivative(tmp, v, k3);
    for (int i = 0; i < 3; ++i) tmp[i] = x[i] + h * k3[i];
    surrogate_derivative(tmp, v, k4);
    const Real sixth = h / Real(6);
    for (int i = 0; i < 3; ++i)
        next[i] = x[i] + sixth * (k1[i] + Real(2) * k2[i] + Real(2) * k3[i] + k4[i]);
}

/// Third-order nonlinear stand-in for the fuel-cell air path. Output settles
/// to tanh(v) to within 1e-4 after 1500 steps at h = 0.01 from the origin.
class SurrogateFuelCellPlant final : public ContinuousPlant {
public:
    explicit SurrogateFuelCellPlant(double step_size = 0.01) : ContinuousPlant(step_size) {}

    std::string_view name() const noexcept override { return "surrogate-fc"; }
    std::size_t state_dim() const noexcept override { return 3; }
    void derivative(std::span<const double> x, double v, std::span<double> dx) const override;
    void step_into(std::span<const double> x, double v, std::span<double> next) const override;
    double output(std::span<const double> x, double) const override { return x[0]; }
    double steady_state_output(double v) const override { return std::tanh(v); }
};

/// Predicted outputs y_0..y_{horizon-1} under constant v with x_{j+1} = f(x_j, v) + d_j.
///
/// `disturbance` is either empty (nominal propagation) or a row-major
/// sequence of at least `horizon` state-sized entries.
std::vector<double> simulate_horizon(const Plant& plant, std::span<const double> x0, double v,
                                     std::size_t horizon, std::span<const double> disturbance = {});

}  // namespace refgov
