#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "refgov/constraints.hpp"
#include "refgov/disturbance.hpp"
#include "refgov/dynamics.hpp"

// Brute-force reference implementations. Nothing here shares code with the
// governor's fill path: no early termination, no row-level steady-state
// hoisting, serial only, and the steady-state tightening is recomputed
// locally. `eps` may be 0 here (no tightening).

namespace refgov::oracle {

/// Every kappa on the grid i / resolution (i = 0..resolution) is checked
/// against every scenario over the full horizon; returns the largest kappa
/// feasible for all of them, or nullopt. `scenarios == nullptr` propagates
/// nominally.
std::optional<double> brute_force_kappa(const Plant& plant, std::span<const double> x0, double v_prev, double r,
                                        const ConstraintSet& set, double eps, std::size_t j_star,
                                        const ScenarioSet* scenarios, std::size_t resolution);

struct KappaInterval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Exact set of admissible kappa for x+ = A x + B v, y = C x + D v. Every
/// horizon and steady-state constraint is affine in kappa, so the admissible
/// set is an interval.
std::optional<KappaInterval> linear_feasible_interval(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                                      const Eigen::RowVectorXd& c, double d,
                                                      std::span<const double> x0, double v_prev, double r,
                                                      const ConstraintSet& set, double eps, std::size_t j_star);

inline constexpr std::size_t kLinearGridPoints = 1'000'000;

/// Largest kappa on the grid i / 10^6 that satisfies every constraint,
/// verified by direct evaluation of the linear recursion.
std::optional<double> linear_maximal_kappa(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                           const Eigen::RowVectorXd& c, std::span<const double> x0, double v_prev,
                                           double r, const ConstraintSet& set, double eps, std::size_t j_star,
                                           double d = 0.0);

/// A random stable linear plant with a governor problem for which holding
/// the previous setpoint (kappa = 0) is admissible.
struct LinearCase {
    Eigen::MatrixXd a;
    Eigen::VectorXd b;
    Eigen::RowVectorXd c;
    StateVec x0;
    double v_prev = 0.0;
    double r = 0.0;
    ConstraintSet set{-1.0, 1.0, 0.0};
    double eps = 0.1;
    std::size_t j_star = 64;
};

LinearCase random_linear_case(std::mt19937_64& rng, std::size_t j_star = 64);

struct OracleReport {
    std::string case_name;
    double expected = 0.0;
    double actual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

/// Grid governor (serial backend, zero scenarios) against
/// linear_maximal_kappa on `cases` random plants. An infeasible result on
/// either side is reported as -1.
std::vector<OracleReport> run_linear_suite(std::size_t cases, std::uint64_t seed, std::size_t m_grid = 32);

}  // namespace refgov::oracle
