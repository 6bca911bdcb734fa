#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "refgov/backend.hpp"
#include "refgov/constraints.hpp"
#include "refgov/disturbance.hpp"
#include "refgov/dynamics.hpp"
#include "refgov/feasibility.hpp"

namespace refgov {

enum class InfeasiblePolicy { hold, error };

InfeasiblePolicy parse_infeasible_policy(std::string_view text);
std::string_view to_string(InfeasiblePolicy policy) noexcept;

struct GovernorConfig {
    std::size_t j_star = 256;
    Tightening tightening{};
    std::size_t n_kappa = 16;
    std::size_t m_grid = 32;
    std::size_t n_sim = 64;
    BackendKind backend = BackendKind::serial;
    InfeasiblePolicy infeasible_policy = InfeasiblePolicy::hold;
    /// Use the largest all-ones prefix of P instead of the largest all-ones row.
    bool prefix_mode = false;
    /// Multicore worker count, 0 = hardware concurrency.
    std::size_t workers = 0;
    bool early_termination = true;

    /// Throws std::invalid_argument on j_star < 1, m_grid < 2, n_kappa < 1 or n_sim < 1.
    void validate() const;
};

struct GovernorState {
    double v_prev = 0.0;
};

struct KappaResult {
    double kappa_opt = 0.0;
    double v_applied = 0.0;
    bool feasible = false;
    CallDiagnostics diagnostics;
    /// P for the grid methods, empty for bisection.
    FeasibilityMatrix feasibility;
};

/// Raised by the grid governor when no kappa is admissible and the policy is
/// InfeasiblePolicy::error.
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// v_prev + kappa (r - v_prev); throws std::domain_error unless kappa is in [0, 1].
double update_setpoint(double v_prev, double r, double kappa);

/// Uniform grid kappa_i = i / (m - 1), i = 0..m-1.
std::vector<double> kappa_grid(std::size_t m);

struct KappaSelection {
    std::optional<std::size_t> row;
    std::optional<double> kappa;
};

/// Largest row index whose cells are all ones, mapped to row / (M - 1).
/// Non-contiguous feasibility is honoured as-is. A one-row matrix maps to 1.
KappaSelection extract_kappa_opt(const FeasibilityMatrix& p);

/// Conservative variant: last row of the leading run of all-ones rows.
KappaSelection extract_kappa_prefix(const FeasibilityMatrix& p);

/// Nominal bisection governor. The first probe is kappa = 1; a feasible
/// probe at 1 returns immediately, otherwise `n_kappa` halvings follow so the
/// result is within 0.5^n_kappa below the threshold for monotone problems.
/// Updates `state.v_prev`.
KappaResult bisection_rg(const Plant& plant, std::span<const double> x, GovernorState& state, double r,
                         const ConstraintSet& set, const GovernorConfig& config);

/// Scenario-robust bisection: one bisection per scenario with disturbed
/// propagation, kappa_opt is the minimum over scenarios.
KappaResult robust_rg_sequential(const Plant& plant, std::span<const double> x, GovernorState& state, double r,
                                 const ConstraintSet& set, const ScenarioSet& scenarios,
                                 const GovernorConfig& config);

/// Grid-search robust governor: fills P on `backend`, then picks kappa_opt.
KappaResult robust_rg_parallel(const Plant& plant, std::span<const double> x, GovernorState& state, double r,
                               const ConstraintSet& set, const ScenarioSet& scenarios,
                               const GovernorConfig& config, const FeasibilityBackend& backend);

/// As above with the backend chosen by `config.backend`.
KappaResult robust_rg_parallel(const Plant& plant, std::span<const double> x, GovernorState& state, double r,
                               const ConstraintSet& set, const ScenarioSet& scenarios,
                               const GovernorConfig& config);

/// Disturbance-free grid search (one nominal column, no disturbance added).
KappaResult grid_rg(const Plant& plant, std::span<const double> x, GovernorState& state, double r,
                    const ConstraintSet& set, const GovernorConfig& config, const FeasibilityBackend& backend);

}  // namespace refgov
