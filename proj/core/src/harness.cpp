#include "refgov/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "refgov/detail/rollout.hpp"

namespace refgov {

namespace {

using Clock = std::chrono::steady_clock;

std::size_t parse_count(std::string_view text) {
    std::size_t value = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end) throw std::invalid_argument("bad n_sim value '" + std::string(text) + "'");
    return value;
}

}  // namespace

ReferenceProfile::ReferenceProfile(std::vector<Step> steps) : steps_(std::move(steps)) {
    if (steps_.empty() || steps_.front().start != 0)
        throw std::invalid_argument("reference profile must start at t = 0");
    for (std::size_t i = 0; i < steps_.size(); ++i) {
        if (!std::isfinite(steps_[i].r)) throw std::invalid_argument("reference values must be finite");
        if (i > 0 && steps_[i].start <= steps_[i - 1].start)
            throw std::invalid_argument("reference profile start indices must be strictly increasing");
    }
}

double ReferenceProfile::at(std::size_t t) const noexcept {
    auto it = std::upper_bound(steps_.begin(), steps_.end(), t,
                               [](std::size_t value, const Step& step) { return value < step.start; });
    return std::prev(it)->r;
}

Experiment adversarial_surrogate_experiment(std::uint64_t seed) {
    Experiment e;
    e.plant = std::make_shared<SurrogateFuelCellPlant>(0.01);
    e.constraint = ConstraintSet::at_most(0.9, 0.0);
    e.disturbance = DisturbanceModel({{-0.002, 0.002}, {-0.002, 0.002}, {-0.002, 0.002}});
    e.seed = seed;
    e.governor.j_star = 256;
    e.governor.m_grid = 32;
    e.governor.n_sim = 64;
    e.governor.tightening.epsilon = Epsilon(0.05);
    e.profile = ReferenceProfile({{0, 2.5}, {1000, 0.3}, {1400, 2.5}});
    e.x0 = {0.0, 0.0, 0.0};
    e.v0 = 0.0;
    e.steps = 2000;
    return e;
}

std::size_t RunRecord::violations() const noexcept {
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const RunRow& r) { return r.violation; }));
}

std::size_t RunRecord::infeasible_steps() const noexcept {
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const RunRow& r) { return !r.feasible; }));
}

RunRecord run_closed_loop(const Experiment& experiment, const RunOptions& options) {
    if (!experiment.plant) throw std::invalid_argument("experiment has no plant");
    const Plant& plant = *experiment.plant;
    const std::size_t n = plant.state_dim();
    if (experiment.x0.size() != n) throw DimensionError("experiment x0 does not match the plant state dimension");
    if (experiment.disturbance.state_dim() != n)
        throw DimensionError("disturbance ranges do not match the plant state dimension");
    experiment.governor.validate();

    RunRecord record;
    record.config_snapshot = experiment.snapshot;
    record.seed = experiment.seed;
    record.governor_on = options.governor_on;
    record.rows.reserve(experiment.steps);

    std::unique_ptr<FeasibilityBackend> backend;
    if (options.governor_on) backend = make_backend(experiment.governor.backend, experiment.governor.workers);

    const std::uint64_t plant_seed = derive_seed(experiment.seed, 0, SeedStream::plant);
    StateVec x = experiment.x0;
    StateVec next(n);
    GovernorState state{experiment.v0};
    const ConstraintSet steady = steady_state_set(experiment.constraint, experiment.governor.tightening);

    for (std::size_t t = 0; t < experiment.steps; ++t) {
        RunRow row;
        row.t = t;
        row.r = experiment.profile.at(t);
        try {
            if (options.governor_on) {
                const ScenarioSet scenarios =
                    sample_scenarios(experiment.disturbance, experiment.governor.n_sim, experiment.governor.j_star + 1,
                                     derive_seed(experiment.seed, t, SeedStream::prediction));
                const KappaResult result = robust_rg_parallel(plant, x, state, row.r, experiment.constraint, scenarios,
                                                              experiment.governor, *backend);
                row.v = result.v_applied;
                row.kappa_opt = result.kappa_opt;
                row.feasible = result.feasible;
                row.sims_run = result.diagnostics.sims_run;
                row.early_terms = result.diagnostics.early_terms;
                row.wall_us = result.diagnostics.wall_us;
                row.latest_violation_step = result.diagnostics.latest_violation_step;
            } else {
                row.v = row.r;
                row.kappa_opt = 1.0;
                state.v_prev = row.r;
            }
            row.steady_margin = constraint_margin(steady, plant.steady_state_output(row.v));
            row.y = plant.output(x, row.v);
            row.violation = !contains(experiment.constraint, row.y);
            record.rows.push_back(row);

            plant.step_into(x, row.v, next);
            for (std::size_t i = 0; i < n; ++i) next[i] += scenario_entry(experiment.disturbance, plant_seed, 0, t, i);
            detail::check_operating_box(plant.operating_bound(), next);
            std::swap(x, next);
        } catch (const IntegrationOverflow& e) {
            record.aborted = true;
            record.abort_reason = "t=" + std::to_string(t) + ": " + e.what();
            break;
        }
    }
    return record;
}

std::string_view to_string(TimingMode mode) noexcept {
    return mode == TimingMode::kernel_only ? "kernel_only" : "end_to_end";
}

std::vector<TimingRecord> bench_sweep(const Experiment& experiment, std::span<const std::size_t> n_sims,
                                      std::span<const BackendKind> backends, const BenchOptions& options) {
    if (n_sims.empty() || backends.empty()) throw std::invalid_argument("bench_sweep needs n_sim values and backends");
    if (options.repetitions < 1) throw std::invalid_argument("bench_sweep needs at least one repetition");
    if (!experiment.plant) throw std::invalid_argument("experiment has no plant");
    const Plant& plant = *experiment.plant;
    const BenchPoint point =
        options.point.value_or(BenchPoint{experiment.x0, experiment.v0, experiment.profile.at(0)});

    std::vector<TimingRecord> records;
    for (BackendKind kind : backends) {
        std::unique_ptr<FeasibilityBackend> backend;
        try {
            backend = make_backend(kind, experiment.governor.workers);
        } catch (const BackendUnavailable&) {
        }
        for (std::size_t n_sim : n_sims) {
            GovernorConfig config = experiment.governor;
            config.n_sim = n_sim;
            for (TimingMode mode : options.modes) {
                TimingRecord rec;
                rec.backend = std::string(to_string(kind));
                rec.n_sim = n_sim;
                rec.m_grid = config.m_grid;
                rec.mode = mode;
                if (!backend) {
                    rec.skipped = true;
                    records.push_back(rec);
                    continue;
                }
                std::vector<double> samples;
                samples.reserve(options.repetitions);
                for (std::size_t rep = 0; rep < options.repetitions; ++rep) {
                    const std::uint64_t seed = derive_seed(experiment.seed, rep, SeedStream::bench);
                    GovernorState state{point.v_prev};
                    if (mode == TimingMode::kernel_only) {
                        const ScenarioSet scenarios =
                            sample_scenarios(experiment.disturbance, n_sim, config.j_star + 1, seed);
                        const auto start = Clock::now();
                        robust_rg_parallel(plant, point.x, state, point.r, experiment.constraint, scenarios, config,
                                           *backend);
                        samples.push_back(std::chrono::duration<double, std::micro>(Clock::now() - start).count());
                    } else {
                        const auto start = Clock::now();
                        const ScenarioSet scenarios =
                            sample_scenarios(experiment.disturbance, n_sim, config.j_star + 1, seed);
                        robust_rg_parallel(plant, point.x, state, point.r, experiment.constraint, scenarios, config,
                                           *backend);
                        samples.push_back(std::chrono::duration<double, std::micro>(Clock::now() - start).count());
                    }
                }
                rec.repetitions = samples.size();
                rec.mean_us = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
                rec.min_us = *std::min_element(samples.begin(), samples.end());
                rec.max_us = *std::max_element(samples.begin(), samples.end());
                records.push_back(rec);
            }
        }
    }
    return records;
}

std::vector<std::size_t> parse_nsim_spec(std::string_view spec) {
    std::vector<std::size_t> values;
    auto push = [&](std::size_t v) {
        if (v == 0) throw std::invalid_argument("n_sim values must be positive");
        if (std::find(values.begin(), values.end(), v) == values.end()) values.push_back(v);
    };
    while (!spec.empty()) {
        const auto comma = spec.find(',');
        const std::string_view item = spec.substr(0, comma);
        spec = comma == std::string_view::npos ? std::string_view{} : spec.substr(comma + 1);
        if (item.empty()) continue;

        std::vector<std::string_view> parts;
        std::string_view rest = item;
        for (;;) {
            const auto colon = rest.find(':');
            parts.push_back(rest.substr(0, colon));
            if (colon == std::string_view::npos) break;
            rest = rest.substr(colon + 1);
        }
        if (parts.size() == 1) {
            push(parse_count(parts[0]));
        } else if (parts.size() == 2 || parts.size() == 3) {
            const std::size_t first = parse_count(parts[0]);
            const std::size_t last = parse_count(parts[1]);
            const std::size_t step = parts.size() == 3 ? parse_count(parts[2]) : 1;
            if (step == 0 || first > last) throw std::invalid_argument("bad n_sim range '" + std::string(item) + "'");
            for (std::size_t v = first; v <= last; v += step) push(v);
        } else {
            throw std::invalid_argument("bad n_sim range '" + std::string(item) + "'");
        }
    }
    if (values.empty()) throw std::invalid_argument("empty n_sim specification");
    return values;
}

}  // namespace refgov
