#include "refgov/dynamics.hpp"

#include <array>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "refgov/detail/rollout.hpp"

namespace refgov {

IntegrationOverflow::IntegrationOverflow(std::size_t state_index, double value)
    : std::runtime_error("integration overflow in state " + std::to_string(state_index) +
                         " (value " + std::to_string(value) + ")"),
      state_index_(state_index),
      value_(value) {}

StateVec Plant::step(std::span<const double> x, double v) const {
    if (x.size() != state_dim())
        throw DimensionError("state has dimension " + std::to_string(x.size()) + ", plant expects " +
                             std::to_string(state_dim()));
    StateVec next(state_dim());
    step_into(x, v, next);
    return next;
}

ContinuousPlant::ContinuousPlant(double step_size) : step_size_(step_size) {
    if (!(step_size > 0.0) || !std::isfinite(step_size))
        throw std::invalid_argument("RK4 step size must be positive and finite");
}

void ContinuousPlant::step_into(std::span<const double> x, double v, std::span<double> next) const {
    rk4_step(*this, x, v, next);
}

namespace {

void require_finite(std::span<const double> values) {
    for (std::size_t i = 0; i < values.size(); ++i)
        if (!std::isfinite(values[i])) throw IntegrationOverflow(i, values[i]);
}

}  // namespace

void rk4_step(const ContinuousPlant& plant, std::span<const double> x, double v, std::span<double> next) {
    const std::size_t n = x.size();
    if (n != plant.state_dim() || next.size() != n)
        throw DimensionError("rk4_step: state dimension mismatch");

    constexpr std::size_t kInlineDim = 8;
    std::array<double, 5 * kInlineDim> inline_buffer;
    std::vector<double> heap_buffer;
    std::span<double> buffer;
    if (n <= kInlineDim) {
        buffer = std::span<double>(inline_buffer).first(5 * n);
    } else {
        heap_buffer.resize(5 * n);
        buffer = heap_buffer;
    }
    auto k1 = buffer.subspan(0, n);
    auto k2 = buffer.subspan(n, n);
    auto k3 = buffer.subspan(2 * n, n);
    auto k4 = buffer.subspan(3 * n, n);
    auto tmp = buffer.subspan(4 * n, n);

    const double h = plant.step_size();
    const double half = h / 2.0;

    plant.derivative(x, v, k1);
    require_finite(k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + half * k1[i];
    plant.derivative(tmp, v, k2);
    require_finite(k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + half * k2[i];
    plant.derivative(tmp, v, k3);
    require_finite(k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
    plant.derivative(tmp, v, k4);
    require_finite(k4);

    const double sixth = h / 6.0;
    for (std::size_t i = 0; i < n; ++i)
        next[i] = x[i] + sixth * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    require_finite(next);
}

StateVec rk4_step(const ContinuousPlant& plant, std::span<const double> x, double v) {
    StateVec next(x.size());
    rk4_step(plant, x, v, next);
    return next;
}

double spectral_radius(const Eigen::MatrixXd& a) {
    if (a.rows() == 0) return 0.0;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(a, /*computeEigenvectors=*/false);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

LinearOraclePlant::LinearOraclePlant(Eigen::MatrixXd a, Eigen::VectorXd b, Eigen::RowVectorXd c, double d)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(d) {
    const auto n = a_.rows();
    if (n == 0 || a_.cols() != n) throw DimensionError("A must be a non-empty square matrix");
    if (b_.size() != n) throw DimensionError("B must have one entry per state");
    if (c_.size() != n) throw DimensionError("C must have one entry per state");
    if (!a_.allFinite() || !b_.allFinite() || !c_.allFinite() || !std::isfinite(d_))
        throw std::invalid_argument("linear plant matrices must be finite");
    const double rho = spectral_radius(a_);
    if (!(rho < 1.0))
        throw std::invalid_argument("A is not Schur stable (spectral radius " + std::to_string(rho) + ")");

    const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n, n);
    equilibrium_per_unit_ = (identity - a_).partialPivLu().solve(b_);
    dc_gain_ = c_.dot(equilibrium_per_unit_) + d_;
}

void LinearOraclePlant::step_into(std::span<const double> x, double v, std::span<double> next) const {
    const auto n = a_.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        double acc = b_[i] * v;
        for (Eigen::Index j = 0; j < n; ++j) acc += a_(i, j) * x[static_cast<std::size_t>(j)];
        next[static_cast<std::size_t>(i)] = acc;
    }
}

double LinearOraclePlant::output(std::span<const double> x, double v) const {
    double y = d_ * v;
    for (Eigen::Index j = 0; j < c_.size(); ++j) y += c_[j] * x[static_cast<std::size_t>(j)];
    return y;
}

StateVec LinearOraclePlant::equilibrium(double v) const {
    StateVec x(state_dim());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = equilibrium_per_unit_[static_cast<Eigen::Index>(i)] * v;
    return x;
}

void SurrogateFuelCellPlant::derivative(std::span<const double> x, double v, std::span<double> dx) const {
    surrogate_derivative(x.data(), v, dx.data());
}

void SurrogateFuelCellPlant::step_into(std::span<const double> x, double v, std::span<double> next) const {
    surrogate_rk4_step(x.data(), v, step_size(), next.data());
    require_finite(next.first(3));
}

std::vector<double> simulate_horizon(const Plant& plant, std::span<const double> x0, double v,
                                     std::size_t horizon, std::span<const double> disturbance) {
    const std::size_t n = plant.state_dim();
    if (x0.size() != n)
        throw DimensionError("initial state has dimension " + std::to_string(x0.size()) + ", plant expects " +
                             std::to_string(n));
    if (!disturbance.empty() && (disturbance.size() % n != 0 || disturbance.size() / n < horizon))
        throw DimensionError("disturbance sequence must hold at least " + std::to_string(horizon) +
                             " entries of dimension " + std::to_string(n));
    std::vector<double> outputs;
    outputs.reserve(horizon);
    std::vector<double> scratch(2 * n);
    detail::rollout(plant, x0, v, horizon, disturbance, scratch, [&](std::size_t, double y) {
        outputs.push_back(y);
        return true;
    });
    return outputs;
}

}  // namespace refgov
