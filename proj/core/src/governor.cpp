#include "refgov/governor.hpp"

#include <chrono>
#include <cmath>
#include <string>

namespace refgov {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_us(Clock::time_point start) {
    return std::chrono::duration<double, std::micro>(Clock::now() - start).count();
}

void require_inputs(const Plant& plant, std::span<const double> x, const GovernorState& state, double r) {
    if (x.size() != plant.state_dim()) throw DimensionError("governor: state dimension mismatch");
    if (!std::isfinite(state.v_prev)) throw std::invalid_argument("governor: previous setpoint is not finite");
    if (!std::isfinite(r)) throw std::invalid_argument("governor: reference is not finite");
}

void require_scenarios(const Plant& plant, const ScenarioSet& scenarios, const GovernorConfig& config) {
    if (scenarios.state_dim() != plant.state_dim()) throw DimensionError("governor: scenario state dimension mismatch");
    if (scenarios.horizon() < config.j_star + 1)
        throw DimensionError("governor: scenarios hold " + std::to_string(scenarios.horizon()) +
                             " steps, need j_star + 1 = " + std::to_string(config.j_star + 1));
}

struct BisectionOutcome {
    double kappa_opt = 0.0;
    bool any_feasible = false;
};

template <class Feasible>
BisectionOutcome bisect(std::size_t n_kappa, Feasible&& feasible) {
    BisectionOutcome out;
    double lower = 0.0;
    double upper = 1.0;
    double kappa = 1.0;
    // One probe at kappa = 1, then n_kappa halvings of [lower, upper].
    for (std::size_t iteration = 0; iteration <= n_kappa; ++iteration) {
        if (feasible(kappa)) {
            out.kappa_opt = kappa;
            out.any_feasible = true;
            if (kappa == 1.0) break;
            lower = kappa;
        } else {
            upper = kappa;
        }
        kappa = (lower + upper) / 2.0;
    }
    return out;
}

BisectionOutcome bisect_candidates(const Plant& plant, std::span<const double> x, double v_prev, double r,
                                   std::span<const double> disturbance, const ConstraintSet& set,
                                   const ConstraintSet& steady, const GovernorConfig& config,
                                   CallDiagnostics& diagnostics) {
    return bisect(config.n_kappa, [&](double kappa) {
        const double v = update_setpoint(v_prev, r, kappa);
        const auto outcome =
            evaluate_candidate(plant, x, v, disturbance, set, steady, config.j_star, config.early_termination);
        tally(outcome, diagnostics);
        return outcome.feasible;
    });
}

KappaResult finish_grid(FillResult fill, GovernorState& state, double r, const GovernorConfig& config) {
    KappaResult result;
    result.diagnostics = fill.diagnostics;
    const KappaSelection selection =
        config.prefix_mode ? extract_kappa_prefix(fill.matrix) : extract_kappa_opt(fill.matrix);
    result.feasibility = std::move(fill.matrix);
    if (!selection.kappa) {
        if (config.infeasible_policy == InfeasiblePolicy::error)
            throw InfeasibleError("no admissible kappa: even holding the previous setpoint violates a scenario");
        result.kappa_opt = 0.0;
        result.v_applied = state.v_prev;
        result.feasible = false;
        return result;
    }
    result.kappa_opt = *selection.kappa;
    result.v_applied = update_setpoint(state.v_prev, r, result.kappa_opt);
    result.feasible = true;
    state.v_prev = result.v_applied;
    return result;
}

}  // namespace

InfeasiblePolicy parse_infeasible_policy(std::string_view text) {
    if (text == "hold") return InfeasiblePolicy::hold;
    if (text == "error") return InfeasiblePolicy::error;
    throw std::invalid_argument("unknown infeasible_policy '" + std::string(text) + "'");
}

std::string_view to_string(InfeasiblePolicy policy) noexcept {
    return policy == InfeasiblePolicy::hold ? "hold" : "error";
}

void GovernorConfig::validate() const {
    if (j_star < 1) throw std::invalid_argument("governor.j_star must be at least 1");
    if (m_grid < 2) throw std::invalid_argument("governor.m_grid must be at least 2");
    if (n_kappa < 1) throw std::invalid_argument("governor.n_kappa must be at least 1");
    if (n_sim < 1) throw std::invalid_argument("governor.n_sim must be at least 1");
}

double update_setpoint(double v_prev, double r, double kappa) {
    if (!(kappa >= 0.0 && kappa <= 1.0))
        throw std::domain_error("kappa must lie in [0, 1], got " + std::to_string(kappa));
    if (kappa == 1.0) return r;
    return v_prev + kappa * (r - v_prev);
}

std::vector<double> kappa_grid(std::size_t m) {
    if (m < 2) throw std::invalid_argument("kappa grid needs at least two points");
    std::vector<double> grid(m);
    const double denominator = static_cast<double>(m - 1);
    for (std::size_t i = 0; i < m; ++i) grid[i] = static_cast<double>(i) / denominator;
    return grid;
}

KappaSelection extract_kappa_opt(const FeasibilityMatrix& p) {
    if (p.empty()) throw std::invalid_argument("extract_kappa_opt: empty feasibility matrix");
    const std::size_t m = p.rows();
    for (std::size_t i = m; i-- > 0;) {
        if (p.row_all_ones(i))
            return {i, m == 1 ? 1.0 : static_cast<double>(i) / static_cast<double>(m - 1)};
    }
    return {};
}

KappaSelection extract_kappa_prefix(const FeasibilityMatrix& p) {
    if (p.empty()) throw std::invalid_argument("extract_kappa_prefix: empty feasibility matrix");
    const std::size_t m = p.rows();
    std::optional<std::size_t> last;
    for (std::size_t i = 0; i < m && p.row_all_ones(i); ++i) last = i;
    if (!last) return {};
    return {last, m == 1 ? 1.0 : static_cast<double>(*last) / static_cast<double>(m - 1)};
}

KappaResult bisection_rg(const Plant& plant, std::span<const double> x, GovernorState& state, double r,
                         const ConstraintSet& set, const GovernorConfig& config) {
    const auto start = Clock::now();
    config.validate();
    require_inputs(plant, x, state, r);
    const ConstraintSet steady = steady_state_set(set, config.tightening);

    KappaResult result;
    const auto outcome = bisect_candidates(plant, x, state.v_prev, r, {}, set, steady, config, result.diagnostics);
    result.kappa_opt = outcome.kappa_opt;
    result.feasible = outcome.any_feasible;
    result.v_applied = update_setpoint(state.v_prev, r, result.kappa_opt);
    state.v_prev = result.v_applied;
    result.diagnostics.wall_us = elapsed_us(start);
    return result;
}

KappaResult robust_rg_sequential(const Plant& plant, std::span<const double> x, GovernorState& state, double r,
                                 const ConstraintSet& set, const ScenarioSet& scenarios,
                                 const GovernorConfig& config) {
    const auto start = Clock::now();
    config.validate();
    require_inputs(plant, x, state, r);
    require_scenarios(plant, scenarios, config);
    if (scenarios.n_sim() != config.n_sim)
        throw std::invalid_argument("robust_rg_sequential: scenario count " + std::to_string(scenarios.n_sim()) +
                                    " differs from governor.n_sim " + std::to_string(config.n_sim));
    const ConstraintSet steady = steady_state_set(set, config.tightening);

    KappaResult result;
    result.kappa_opt = 1.0;
    result.feasible = true;
    for (std::size_t k = 0; k < scenarios.n_sim(); ++k) {
        const auto outcome = bisect_candidates(plant, x, state.v_prev, r, scenarios.scenario(k), set, steady, config,
                                               result.diagnostics);
        result.kappa_opt = std::min(result.kappa_opt, outcome.kappa_opt);
        result.feasible = result.feasible && outcome.any_feasible;
    }
    result.v_applied = update_setpoint(state.v_prev, r, result.kappa_opt);
    state.v_prev = result.v_applied;
    result.diagnostics.wall_us = elapsed_us(start);
    return result;
}

KappaResult robust_rg_parallel(const Plant& plant, std::span<const double> x, GovernorState& state, double r,
                               const ConstraintSet& set, const ScenarioSet& scenarios,
                               const GovernorConfig& config, const FeasibilityBackend& backend) {
    const auto start = Clock::now();
    config.validate();
    require_inputs(plant, x, state, r);
    require_scenarios(plant, scenarios, config);
    const ConstraintSet steady = steady_state_set(set, config.tightening);
    const std::vector<double> grid = kappa_grid(config.m_grid);
    const FillRequest request{plant, x, state.v_prev, r, grid, &scenarios, set, steady, config.j_star,
                              config.early_termination};
    KappaResult result = finish_grid(backend.fill(request), state, r, config);
    result.diagnostics.wall_us = elapsed_us(start);
    return result;
}

KappaResult robust_rg_parallel(const Plant& plant, std::span<const double> x, GovernorState& state, double r,
                               const ConstraintSet& set, const ScenarioSet& scenarios,
                               const GovernorConfig& config) {
    const auto backend = make_backend(config.backend, config.workers);
    return robust_rg_parallel(plant, x, state, r, set, scenarios, config, *backend);
}

KappaResult grid_rg(const Plant& plant, std::span<const double> x, GovernorState& state, double r,
                    const ConstraintSet& set, const GovernorConfig& config, const FeasibilityBackend& backend) {
    const auto start = Clock::now();
    config.validate();
    require_inputs(plant, x, state, r);
    const ConstraintSet steady = steady_state_set(set, config.tightening);
    const std::vector<double> grid = kappa_grid(config.m_grid);
    const FillRequest request{plant, x, state.v_prev, r, grid, nullptr, set, steady, config.j_star,
                              config.early_termination};
    KappaResult result = finish_grid(backend.fill(request), state, r, config);
    result.diagnostics.wall_us = elapsed_us(start);
    return result;
}

}  // namespace refgov
