#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "refgov/backend.hpp"
#include "refgov/constraints.hpp"
#include "refgov/disturbance.hpp"
#include "refgov/dynamics.hpp"
#include "refgov/governor.hpp"

namespace refgov {

/// Piecewise-constant reference r_t.
class ReferenceProfile {
public:
    struct Step {
        std::size_t start = 0;
        double r = 0.0;
    };

    /// Throws std::invalid_argument unless the first step starts at 0 and
    /// start indices are strictly increasing.
    explicit ReferenceProfile(std::vector<Step> steps);

    static ReferenceProfile constant(double r) { return ReferenceProfile({{0, r}}); }

    double at(std::size_t t) const noexcept;
    const std::vector<Step>& steps() const noexcept { return steps_; }

private:
    std::vector<Step> steps_;
};

/// A fully resolved closed-loop experiment.
struct Experiment {
    std::shared_ptr<const Plant> plant;
    ConstraintSet constraint{-kInfinity, 0.9, 0.0};
    DisturbanceModel disturbance = DisturbanceModel::zero(1);
    std::uint64_t seed = 1;
    GovernorConfig governor;
    ReferenceProfile profile = ReferenceProfile::constant(0.0);
    StateVec x0;
    double v0 = 0.0;
    std::size_t steps = 100;
    /// Resolved configuration as JSON text, empty when built in code.
    std::string snapshot;
};

/// The bundled surrogate-plant experiment: r steps 0 -> 2.5 against y <= 0.9,
/// so the ungoverned response settles at tanh(2.5) ~ 0.987 and violates.
Experiment adversarial_surrogate_experiment(std::uint64_t seed = 1);

struct RunRow {
    std::size_t t = 0;
    double r = 0.0;
    double v = 0.0;
    double y = 0.0;
    double kappa_opt = 0.0;
    bool feasible = true;
    bool violation = false;
    std::uint64_t sims_run = 0;
    std::uint64_t early_terms = 0;
    /// Latest predicted violation index in this call, for judging j*.
    std::optional<std::size_t> latest_violation_step;
    /// Distance of y_ss(v) from the tightened set boundary, for judging eps.
    double steady_margin = 0.0;
    double wall_us = 0.0;
};

struct RunRecord {
    std::vector<RunRow> rows;
    std::string config_snapshot;
    std::uint64_t seed = 0;
    bool governor_on = true;
    bool aborted = false;
    std::string abort_reason;

    std::size_t violations() const noexcept;
    std::size_t infeasible_steps() const noexcept;
};

struct RunOptions {
    bool governor_on = true;
};

/// Runs the plant in closed loop for `experiment.steps` steps. Each step draws
/// fresh prediction scenarios from the timestep-derived seed, calls the grid
/// governor, and advances the plant with a disturbance from an independent
/// stream. Integration overflow ends the run early with `aborted` set.
RunRecord run_closed_loop(const Experiment& experiment, const RunOptions& options = {});

enum class TimingMode { kernel_only, end_to_end };

std::string_view to_string(TimingMode mode) noexcept;

struct TimingRecord {
    std::string backend;
    std::size_t n_sim = 0;
    std::size_t m_grid = 0;
    std::size_t repetitions = 0;
    TimingMode mode = TimingMode::kernel_only;
    double mean_us = 0.0;
    double min_us = 0.0;
    double max_us = 0.0;
    bool skipped = false;
};

/// Fixed governor input used for every benchmark repetition.
struct BenchPoint {
    StateVec x;
    double v_prev = 0.0;
    double r = 0.0;
};

struct BenchOptions {
    std::size_t repetitions = 20;
    std::vector<TimingMode> modes{TimingMode::kernel_only, TimingMode::end_to_end};
    /// Defaults to (experiment.x0, experiment.v0, profile.at(0)).
    std::optional<BenchPoint> point;
};

/// Times one governor call per repetition for every (backend, n_sim) cell,
/// strictly sequentially. Kernel-only timing covers the governor call;
/// end-to-end also covers scenario sampling. Unavailable backends yield
/// rows with `skipped` set.
std::vector<TimingRecord> bench_sweep(const Experiment& experiment, std::span<const std::size_t> n_sims,
                                      std::span<const BackendKind> backends, const BenchOptions& options = {});

/// Parses "a:b:step[,a:b:step...]" or plain integers into an ordered list
/// without duplicates, e.g. "1:32:1,32:8192:32".
std::vector<std::size_t> parse_nsim_spec(std::string_view spec);

}  // namespace refgov
