#include "refgov/backend.hpp"

#include <algorithm>
#include <bit>
#include <exception>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "refgov/governor.hpp"

namespace refgov {

namespace {

struct RowPlan {
    std::vector<double> setpoints;
    std::vector<std::uint8_t> steady_ok;
    // Rows whose setpoint is bitwise equal to an earlier row's (e.g. r == v_prev)
    // produce identical cells; only the first of each group is simulated.
    std::vector<std::size_t> source;
    std::vector<std::size_t> unique_rows;

    void copy_duplicates(std::vector<std::uint8_t>& cells, std::size_t cols) const {
        for (std::size_t i = 0; i < source.size(); ++i) {
            if (source[i] == i) continue;
            std::copy_n(cells.begin() + static_cast<std::ptrdiff_t>(source[i] * cols), cols,
                        cells.begin() + static_cast<std::ptrdiff_t>(i * cols));
        }
    }
};

void validate(const FillRequest& req) {
    const std::size_t n = req.plant.state_dim();
    if (req.x0.size() != n) throw DimensionError("fill: initial state dimension mismatch");
    if (req.kappas.empty()) throw std::invalid_argument("fill: empty kappa grid");
    if (!std::is_sorted(req.kappas.begin(), req.kappas.end()))
        throw std::invalid_argument("fill: kappa grid must be sorted ascending");
    if (req.scenarios) {
        if (req.scenarios->state_dim() != n) throw DimensionError("fill: scenario state dimension mismatch");
        if (req.scenarios->horizon() < req.j_star + 1)
            throw DimensionError("fill: scenarios shorter than j_star + 1 steps");
    }
}

// The steady-state test depends on the row only, so it is evaluated once per
// kappa and shared by every cell in that row.
RowPlan plan_rows(const FillRequest& req) {
    RowPlan plan;
    plan.setpoints.reserve(req.kappas.size());
    plan.steady_ok.reserve(req.kappas.size());
    for (double kappa : req.kappas) {
        const double v = update_setpoint(req.v_prev, req.r, kappa);
        const std::size_t i = plan.setpoints.size();
        std::size_t src = i;
        for (std::size_t u : plan.unique_rows) {
            if (std::bit_cast<std::uint64_t>(plan.setpoints[u]) == std::bit_cast<std::uint64_t>(v)) {
                src = u;
                break;
            }
        }
        plan.setpoints.push_back(v);
        plan.steady_ok.push_back(contains(req.steady_set, req.plant.steady_state_output(v)) ? 1 : 0);
        plan.source.push_back(src);
        if (src == i) plan.unique_rows.push_back(i);
    }
    return plan;
}

std::uint8_t evaluate_cell(const FillRequest& req, const RowPlan& plan, std::size_t i, std::size_t k,
                           std::span<double> scratch, CallDiagnostics& diagnostics) {
    CandidateOutcome outcome;
    outcome.steady_state_ok = plan.steady_ok[i] != 0;
    if (outcome.steady_state_ok || !req.early_termination) {
        outcome.simulated = true;
        outcome.trajectory = check_trajectory(req.plant, req.x0, plan.setpoints[i], req.scenario(k), req.set,
                                              req.j_star + 1, req.early_termination, scratch);
        outcome.feasible = outcome.steady_state_ok && outcome.trajectory.within_set;
    }
    tally(outcome, diagnostics);
    return outcome.feasible ? 1 : 0;
}

struct Registry {
    std::mutex mutex;
    std::map<BackendKind, BackendFactory> factories;

    Registry() {
        factories[BackendKind::serial] = [](std::size_t) { return std::make_unique<SerialBackend>(); };
        factories[BackendKind::multicore] = [](std::size_t workers) {
            return std::make_unique<MulticoreBackend>(workers);
        };
    }
};

Registry& registry() {
    static Registry instance;
    return instance;
}

}  // namespace

BackendKind parse_backend_kind(std::string_view text) {
    if (text == "serial") return BackendKind::serial;
    if (text == "multicore") return BackendKind::multicore;
    if (text == "gpu") return BackendKind::gpu;
    throw std::invalid_argument("unknown backend '" + std::string(text) + "'");
}

std::string_view to_string(BackendKind kind) noexcept {
    switch (kind) {
        case BackendKind::serial: return "serial";
        case BackendKind::multicore: return "multicore";
        case BackendKind::gpu: return "gpu";
    }
    return "unknown";
}

FillResult SerialBackend::fill(const FillRequest& req) const {
    validate(req);
    const RowPlan plan = plan_rows(req);
    const std::size_t rows = req.kappas.size();
    const std::size_t cols = req.columns();
    std::vector<std::uint8_t> cells(rows * cols);
    std::vector<double> scratch(2 * req.plant.state_dim());
    CallDiagnostics diagnostics;
    for (std::size_t i : plan.unique_rows)
        for (std::size_t k = 0; k < cols; ++k) cells[i * cols + k] = evaluate_cell(req, plan, i, k, scratch, diagnostics);
    plan.copy_duplicates(cells, cols);
    return {FeasibilityMatrix(rows, cols, std::move(cells)), diagnostics};
}

MulticoreBackend::MulticoreBackend(std::size_t workers)
    : workers_(workers != 0 ? workers : std::max(1u, std::thread::hardware_concurrency())) {}

FillResult MulticoreBackend::fill(const FillRequest& req) const {
    validate(req);
    const RowPlan plan = plan_rows(req);
    const std::size_t rows = req.kappas.size();
    const std::size_t cols = req.columns();
    const std::size_t unique = plan.unique_rows.size();
    const std::size_t total = unique * cols;
    const std::size_t workers = std::min(workers_, total);

    std::vector<std::uint8_t> cells(rows * cols);
    std::vector<CallDiagnostics> per_worker(workers);
    std::vector<std::exception_ptr> errors(workers);

    auto work = [&](std::size_t w) {
        try {
            std::vector<double> scratch(2 * req.plant.state_dim());
            CallDiagnostics& diagnostics = per_worker[w];
            // Contiguous blocks of unique rows, or cell striding when rows are scarce.
            if (unique >= workers) {
                const std::size_t begin = w * unique / workers;
                const std::size_t end = (w + 1) * unique / workers;
                for (std::size_t u = begin; u < end; ++u) {
                    const std::size_t i = plan.unique_rows[u];
                    for (std::size_t k = 0; k < cols; ++k)
                        cells[i * cols + k] = evaluate_cell(req, plan, i, k, scratch, diagnostics);
                }
            } else {
                for (std::size_t c = w; c < total; c += workers) {
                    const std::size_t i = plan.unique_rows[c / cols];
                    cells[i * cols + c % cols] = evaluate_cell(req, plan, i, c % cols, scratch, diagnostics);
                }
            }
        } catch (...) {
            errors[w] = std::current_exception();
        }
    };

    {
        std::vector<std::jthread> threads;
        threads.reserve(workers - 1);
        for (std::size_t w = 1; w < workers; ++w) threads.emplace_back(work, w);
        work(0);
    }

    CallDiagnostics diagnostics;
    for (const auto& d : per_worker) diagnostics.merge(d);
    for (std::size_t w = 0; w < workers; ++w) {
        if (!errors[w]) continue;
        std::string message = "multicore worker " + std::to_string(w) + " failed";
        try {
            std::rethrow_exception(errors[w]);
        } catch (const std::exception& e) {
            message += ": ";
            message += e.what();
        } catch (...) {
        }
        throw BackendFailure(message, diagnostics);
    }
    plan.copy_duplicates(cells, cols);
    return {FeasibilityMatrix(rows, cols, std::move(cells)), diagnostics};
}

void register_backend(BackendKind kind, BackendFactory factory) {
    auto& reg = registry();
    std::lock_guard lock(reg.mutex);
    if (factory)
        reg.factories[kind] = std::move(factory);
    else
        reg.factories.erase(kind);
}

bool backend_available(BackendKind kind) {
    auto& reg = registry();
    std::lock_guard lock(reg.mutex);
    return reg.factories.contains(kind);
}

std::unique_ptr<FeasibilityBackend> make_backend(BackendKind kind, std::size_t workers) {
    BackendFactory factory;
    {
        auto& reg = registry();
        std::lock_guard lock(reg.mutex);
        auto it = reg.factories.find(kind);
        if (it == reg.factories.end())
            throw BackendUnavailable("backend '" + std::string(to_string(kind)) + "' is not available in this build");
        factory = it->second;
    }
    return factory(workers);
}

FillResult fill_feasibility(const FeasibilityBackend& backend, const Plant& plant, std::span<const double> x0,
                            double v_prev, double r, std::span<const double> kappas,
                            const ScenarioSet* scenarios, const ConstraintSet& set,
                            const Tightening& tightening, std::size_t j_star, bool early_termination) {
    const ConstraintSet steady = steady_state_set(set, tightening);
    const FillRequest request{plant, x0, v_prev, r, kappas, scenarios, set, steady, j_star, early_termination};
    return backend.fill(request);
}

}  // namespace refgov
