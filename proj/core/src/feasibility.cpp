#include "refgov/feasibility.hpp"

#include <algorithm>
#include <stdexcept>

#include "refgov/detail/rollout.hpp"

namespace refgov {

FeasibilityMatrix::FeasibilityMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), cells_(rows * cols, 0) {}

FeasibilityMatrix::FeasibilityMatrix(std::size_t rows, std::size_t cols, std::vector<std::uint8_t> cells)
    : rows_(rows), cols_(cols), cells_(std::move(cells)) {
    if (cells_.size() != rows_ * cols_) throw std::invalid_argument("feasibility matrix size mismatch");
}

FeasibilityMatrix FeasibilityMatrix::from_rows(std::initializer_list<std::initializer_list<int>> rows) {
    const std::size_t cols = rows.size() == 0 ? 0 : rows.begin()->size();
    std::vector<std::uint8_t> cells;
    cells.reserve(rows.size() * cols);
    for (const auto& row : rows) {
        if (row.size() != cols) throw std::invalid_argument("ragged feasibility matrix");
        for (int value : row) cells.push_back(value != 0 ? 1 : 0);
    }
    return FeasibilityMatrix(rows.size(), cols, std::move(cells));
}

bool FeasibilityMatrix::row_all_ones(std::size_t i) const noexcept {
    const auto begin = cells_.begin() + static_cast<std::ptrdiff_t>(i * cols_);
    return std::all_of(begin, begin + static_cast<std::ptrdiff_t>(cols_), [](std::uint8_t c) { return c != 0; });
}

std::size_t FeasibilityMatrix::count_ones() const noexcept {
    return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
}

void CallDiagnostics::merge(const CallDiagnostics& other) noexcept {
    sims_run += other.sims_run;
    early_terms += other.early_terms;
    overflows += other.overflows;
    steady_state_rejections += other.steady_state_rejections;
    if (other.latest_violation_step &&
        (!latest_violation_step || *other.latest_violation_step > *latest_violation_step))
        latest_violation_step = other.latest_violation_step;
}

TrajectoryOutcome check_trajectory(const Plant& plant, std::span<const double> x0, double v,
                                   std::span<const double> disturbance, const ConstraintSet& set,
                                   std::size_t horizon, bool early_termination, std::span<double> scratch) {
    TrajectoryOutcome outcome;
    try {
        outcome.steps = detail::rollout(plant, x0, v, horizon, disturbance, scratch, [&](std::size_t j, double y) {
            if (contains(set, y)) return true;
            if (!outcome.first_violation) outcome.first_violation = j;
            outcome.within_set = false;
            return !early_termination;
        });
    } catch (const IntegrationOverflow&) {
        outcome.within_set = false;
        outcome.overflow = true;
        return outcome;
    }
    outcome.early_terminated = !outcome.within_set && outcome.steps < horizon;
    return outcome;
}

CandidateOutcome evaluate_candidate(const Plant& plant, std::span<const double> x0, double v,
                                    std::span<const double> disturbance, const ConstraintSet& set,
                                    const ConstraintSet& steady_set, std::size_t j_star, bool early_termination) {
    CandidateOutcome outcome;
    outcome.steady_state_ok = contains(steady_set, plant.steady_state_output(v));
    if (!outcome.steady_state_ok && early_termination) return outcome;

    const std::size_t n = plant.state_dim();
    double inline_scratch[16];
    std::vector<double> heap_scratch;
    std::span<double> scratch;
    if (2 * n <= std::size(inline_scratch)) {
        scratch = std::span<double>(inline_scratch, 2 * n);
    } else {
        heap_scratch.resize(2 * n);
        scratch = heap_scratch;
    }
    outcome.simulated = true;
    outcome.trajectory = check_trajectory(plant, x0, v, disturbance, set, j_star + 1, early_termination, scratch);
    outcome.feasible = outcome.steady_state_ok && outcome.trajectory.within_set;
    return outcome;
}

bool check_candidate(const Plant& plant, std::span<const double> x0, double v,
                     std::span<const double> disturbance, const ConstraintSet& set,
                     const Tightening& tightening, std::size_t j_star) {
    if (x0.size() != plant.state_dim()) throw DimensionError("check_candidate: state dimension mismatch");
    if (!disturbance.empty() && disturbance.size() < (j_star + 1) * plant.state_dim())
        throw DimensionError("check_candidate: scenario shorter than j_star + 1 steps");
    return evaluate_candidate(plant, x0, v, disturbance, set, steady_state_set(set, tightening), j_star).feasible;
}

void tally(const CandidateOutcome& outcome, CallDiagnostics& diagnostics) noexcept {
    if (!outcome.steady_state_ok) ++diagnostics.steady_state_rejections;
    if (!outcome.simulated) return;
    ++diagnostics.sims_run;
    const auto& t = outcome.trajectory;
    if (t.early_terminated) ++diagnostics.early_terms;
    if (t.overflow) ++diagnostics.overflows;
    if (t.first_violation &&
        (!diagnostics.latest_violation_step || *t.first_violation > *diagnostics.latest_violation_step))
        diagnostics.latest_violation_step = t.first_violation;
}

}  // namespace refgov
