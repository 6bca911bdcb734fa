#pragma once

// Hand-rolled generators for property tests. Every case is driven by its own
// seed so a failure message names a reproducible case.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "refgov/constraints.hpp"
#include "refgov/dynamics.hpp"

namespace refgov::testing {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    std::size_t index(std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
    }
    bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }
    std::uint64_t bits() { return rng_(); }
    std::mt19937_64& engine() { return rng_; }

    // Two-sided or one-sided interval with an interior anchor.
    ConstraintSet constraint_set() {
        const double anchor = uniform(-5.0, 5.0);
        const double below = uniform(0.1, 10.0);
        const double above = uniform(0.1, 10.0);
        switch (index(0, 2)) {
            case 0: return ConstraintSet::at_least(anchor - below, anchor);
            case 1: return ConstraintSet::at_most(anchor + above, anchor);
            default: return ConstraintSet(anchor - below, anchor + above, anchor);
        }
    }

    Epsilon epsilon() { return Epsilon(uniform(1e-6, 1.0 - 1e-6)); }

private:
    std::mt19937_64 rng_;
};

/// Runs `property(gen)` for `cases` independently seeded generators.
template <class Property>
void for_all(std::size_t cases, std::uint64_t seed, Property&& property) {
    for (std::size_t c = 0; c < cases; ++c) {
        const std::uint64_t case_seed = seed * 1'000'003ULL + c;
        SCOPED_TRACE("property case seed " + std::to_string(case_seed));
        Gen gen(case_seed);
        property(gen);
        if (::testing::Test::HasFatalFailure()) return;
    }
}

inline LinearOraclePlant scalar_plant(double a, double b, double c = 1.0, double d = 0.0) {
    return LinearOraclePlant(Eigen::MatrixXd::Constant(1, 1, a), Eigen::VectorXd::Constant(1, b),
                             Eigen::RowVectorXd::Constant(1, c), d);
}

/// xdot = -x + gain * v in every coordinate.
class FirstOrderLag final : public ContinuousPlant {
public:
    FirstOrderLag(double step_size, std::size_t dim = 1) : ContinuousPlant(step_size), dim_(dim) {}
    std::string_view name() const noexcept override { return "first-order-lag"; }
    std::size_t state_dim() const noexcept override { return dim_; }
    void derivative(std::span<const double> x, double v, std::span<double> dx) const override {
        for (std::size_t i = 0; i < dim_; ++i) dx[i] = -x[i] + v;
    }
    double output(std::span<const double> x, double) const override { return x[0]; }
    double steady_state_output(double v) const override { return v; }

private:
    std::size_t dim_;
};

/// xdot = A x + B v for a continuous-time Hurwitz A.
class ContinuousLinear final : public ContinuousPlant {
public:
    ContinuousLinear(Eigen::MatrixXd a, Eigen::VectorXd b, double step_size)
        : ContinuousPlant(step_size), a_(std::move(a)), b_(std::move(b)) {}
    std::string_view name() const noexcept override { return "continuous-linear"; }
    std::size_t state_dim() const noexcept override { return static_cast<std::size_t>(a_.rows()); }
    void derivative(std::span<const double> x, double v, std::span<double> dx) const override {
        const Eigen::Map<const Eigen::VectorXd> xs(x.data(), a_.rows());
        Eigen::Map<Eigen::VectorXd>(dx.data(), a_.rows()) = a_ * xs + b_ * v;
    }
    double output(std::span<const double> x, double) const override { return x[0]; }
    double steady_state_output(double v) const override {
        return (-a_.inverse() * b_ * v)(0);
    }
    const Eigen::MatrixXd& a() const { return a_; }
    const Eigen::VectorXd& b() const { return b_; }

private:
    Eigen::MatrixXd a_;
    Eigen::VectorXd b_;
};

}  // namespace refgov::testing
