#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace refgov {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Stateless:
/// the output is a pure function of (counter, key).
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter generate(Counter counter, Key key) noexcept;
};

enum class DistributionKind { uniform, gaussian };

struct Range {
    double lo = 0.0;
    double hi = 0.0;
};

/// Per-state additive disturbance distribution. Only uniform sampling is
/// implemented; `gaussian` is reserved and rejected at sampling time.
class DisturbanceModel {
public:
    explicit DisturbanceModel(std::vector<Range> ranges, DistributionKind kind = DistributionKind::uniform);

    std::size_t state_dim() const noexcept { return ranges_.size(); }
    const std::vector<Range>& ranges() const noexcept { return ranges_; }
    DistributionKind kind() const noexcept { return kind_; }

    static DisturbanceModel zero(std::size_t state_dim);

private:
    std::vector<Range> ranges_;
    DistributionKind kind_;
};

/// N_sim disturbance sequences of length `horizon`, stored row-major as
/// [scenario][step][state].
class ScenarioSet {
public:
    ScenarioSet(std::size_t n_sim, std::size_t horizon, std::size_t state_dim, std::uint64_t seed,
                std::vector<double> values);

    std::size_t n_sim() const noexcept { return n_sim_; }
    std::size_t horizon() const noexcept { return horizon_; }
    std::size_t state_dim() const noexcept { return state_dim_; }
    std::uint64_t seed() const noexcept { return seed_; }

    /// Flattened sequence for scenario k, `horizon * state_dim` entries.
    std::span<const double> scenario(std::size_t k) const noexcept {
        const std::size_t stride = horizon_ * state_dim_;
        return std::span<const double>(values_).subspan(k * stride, stride);
    }
    double at(std::size_t k, std::size_t j, std::size_t i) const noexcept {
        return values_[(k * horizon_ + j) * state_dim_ + i];
    }
    std::span<const double> values() const noexcept { return values_; }

    friend bool operator==(const ScenarioSet&, const ScenarioSet&) = default;

private:
    std::size_t n_sim_;
    std::size_t horizon_;
    std::size_t state_dim_;
    std::uint64_t seed_;
    std::vector<double> values_;
};

/// Entry (k, j, i) of the scenario set keyed by `seed`; independent of the
/// order in which entries are produced.
double scenario_entry(const DisturbanceModel& model, std::uint64_t seed, std::size_t k, std::size_t j,
                      std::size_t i);

ScenarioSet sample_scenarios(const DisturbanceModel& model, std::size_t n_sim, std::size_t horizon,
                             std::uint64_t seed);

/// A single all-zeros scenario.
ScenarioSet zero_scenarios(std::size_t state_dim, std::size_t horizon);

/// Independent key streams derived from one experiment seed.
enum class SeedStream : std::uint64_t { prediction = 0, plant = 1, bench = 2 };

/// Seed for timestep/repetition `index` of `stream`.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index, SeedStream stream) noexcept;

/// Binary dump: "RGSC", then n_sim, horizon, state_dim as little-endian
/// uint32, then every entry as a little-endian float32.
void write_scenario_dump(const ScenarioSet& scenarios, const std::filesystem::path& path);
/// Reads a dump back; values are widened from float32 and the seed is 0.
ScenarioSet read_scenario_dump(const std::filesystem::path& path);

}  // namespace refgov
