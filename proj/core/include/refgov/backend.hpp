#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string_view>

#include "refgov/constraints.hpp"
#include "refgov/disturbance.hpp"
#include "refgov/dynamics.hpp"
#include "refgov/feasibility.hpp"

namespace refgov {

enum class BackendKind { serial, multicore, gpu };

BackendKind parse_backend_kind(std::string_view text);
std::string_view to_string(BackendKind kind) noexcept;

/// Raised when a requested backend is not compiled in or has no device.
class BackendUnavailable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a worker aborts while filling P.
class BackendFailure : public std::runtime_error {
public:
    BackendFailure(const std::string& what, CallDiagnostics partial)
        : std::runtime_error(what), partial_(partial) {}
    const CallDiagnostics& partial_diagnostics() const noexcept { return partial_; }

private:
    CallDiagnostics partial_;
};

/// Everything needed to fill P. Cell (i, k) checks the setpoint
/// v_prev + kappas[i] (r - v_prev) against scenario k. A null `scenarios`
/// means a single nominal column propagated without any disturbance.
struct FillRequest {
    const Plant& plant;
    std::span<const double> x0;
    double v_prev;
    double r;
    std::span<const double> kappas;
    const ScenarioSet* scenarios;
    const ConstraintSet& set;
    const ConstraintSet& steady_set;
    std::size_t j_star;
    bool early_termination = true;

    std::size_t columns() const noexcept { return scenarios ? scenarios->n_sim() : 1; }
    std::span<const double> scenario(std::size_t k) const noexcept {
        return scenarios ? scenarios->scenario(k) : std::span<const double>{};
    }
};

struct FillResult {
    FeasibilityMatrix matrix;
    CallDiagnostics diagnostics;
};

/// Strategy that fills the feasibility matrix. Implementations must produce
/// P as a pure function of the request.
class FeasibilityBackend {
public:
    virtual ~FeasibilityBackend() = default;
    virtual std::string_view name() const noexcept = 0;
    virtual FillResult fill(const FillRequest& request) const = 0;
};

/// Row-major single-threaded fill.
class SerialBackend final : public FeasibilityBackend {
public:
    std::string_view name() const noexcept override { return "serial"; }
    FillResult fill(const FillRequest& request) const override;
};

/// Fans the M x N_sim cells out over worker threads. Each worker owns a
/// contiguous block of kappa rows, or a stride of cells when there are fewer
/// rows than workers, and writes only its own cells.
class MulticoreBackend final : public FeasibilityBackend {
public:
    /// `workers == 0` selects std::thread::hardware_concurrency().
    explicit MulticoreBackend(std::size_t workers = 0);

    std::string_view name() const noexcept override { return "multicore"; }
    std::size_t workers() const noexcept { return workers_; }
    FillResult fill(const FillRequest& request) const override;

private:
    std::size_t workers_;
};

using BackendFactory = std::function<std::unique_ptr<FeasibilityBackend>(std::size_t workers)>;

/// Installs a factory for `kind`, e.g. a device backend living in another
/// library. Serial and multicore are registered by default.
void register_backend(BackendKind kind, BackendFactory factory);

/// Throws BackendUnavailable if nothing is registered for `kind`.
std::unique_ptr<FeasibilityBackend> make_backend(BackendKind kind, std::size_t workers = 0);

bool backend_available(BackendKind kind);

FillResult fill_feasibility(const FeasibilityBackend& backend, const Plant& plant, std::span<const double> x0,
                            double v_prev, double r, std::span<const double> kappas,
                            const ScenarioSet* scenarios, const ConstraintSet& set,
                            const Tightening& tightening, std::size_t j_star, bool early_termination = true);

}  // namespace refgov
