#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

#include "refgov/constraints.hpp"
#include "refgov/dynamics.hpp"

namespace refgov {

/// M x N_sim boolean matrix P; row i is candidate kappa_i, column k is
/// scenario k. Cells are bytes so that concurrent writers touching distinct
/// cells never share a word.
class FeasibilityMatrix {
public:
    FeasibilityMatrix() = default;
    FeasibilityMatrix(std::size_t rows, std::size_t cols);
    FeasibilityMatrix(std::size_t rows, std::size_t cols, std::vector<std::uint8_t> cells);

    static FeasibilityMatrix from_rows(std::initializer_list<std::initializer_list<int>> rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return cells_.empty(); }

    bool operator()(std::size_t i, std::size_t k) const noexcept { return cells_[i * cols_ + k] != 0; }
    void set(std::size_t i, std::size_t k, bool value) noexcept { cells_[i * cols_ + k] = value ? 1 : 0; }
    bool row_all_ones(std::size_t i) const noexcept;
    std::size_t count_ones() const noexcept;

    std::span<const std::uint8_t> cells() const noexcept { return cells_; }

    friend bool operator==(const FeasibilityMatrix&, const FeasibilityMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::uint8_t> cells_;
};

/// Per-call counters reported alongside kappa_opt.
struct CallDiagnostics {
    std::uint64_t sims_run = 0;
    std::uint64_t early_terms = 0;
    std::uint64_t overflows = 0;
    std::uint64_t steady_state_rejections = 0;
    /// Largest first-violation index over all simulated trajectories; the
    /// latest point in the horizon where any prediction left the set.
    std::optional<std::size_t> latest_violation_step;
    double wall_us = 0.0;

    void merge(const CallDiagnostics& other) noexcept;
};

struct TrajectoryOutcome {
    bool within_set = true;
    bool overflow = false;
    bool early_terminated = false;
    std::optional<std::size_t> first_violation;
    std::size_t steps = 0;
};

/// Simulates `horizon` outputs and checks each against `set`. With early
/// termination the rollout stops at the first violation. Integration
/// overflow is reported as a violation, never thrown.
TrajectoryOutcome check_trajectory(const Plant& plant, std::span<const double> x0, double v,
                                   std::span<const double> disturbance, const ConstraintSet& set,
                                   std::size_t horizon, bool early_termination, std::span<double> scratch);

struct CandidateOutcome {
    bool feasible = false;
    bool steady_state_ok = false;
    TrajectoryOutcome trajectory;
    bool simulated = false;
};

/// Feasibility of a constant setpoint v over j_star + 1 predicted outputs
/// plus the steady-state test against `steady_set`. With early termination
/// a failing steady-state test skips the simulation entirely.
CandidateOutcome evaluate_candidate(const Plant& plant, std::span<const double> x0, double v,
                                    std::span<const double> disturbance, const ConstraintSet& set,
                                    const ConstraintSet& steady_set, std::size_t j_star,
                                    bool early_termination = true);

bool check_candidate(const Plant& plant, std::span<const double> x0, double v,
                     std::span<const double> disturbance, const ConstraintSet& set,
                     const Tightening& tightening, std::size_t j_star);

/// Records one candidate evaluation into `diagnostics`.
void tally(const CandidateOutcome& outcome, CallDiagnostics& diagnostics) noexcept;

}  // namespace refgov
