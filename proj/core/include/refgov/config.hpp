#pragma once

#include <filesystem>
#include <stdexcept>
#include <string_view>

#include "refgov/harness.hpp"

namespace refgov {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Builds an Experiment from JSON text. Recognised blocks:
///
///   preset       "desk" (default: j_star 256, n_sim 64, m_grid 32) or
///                "paper-scale" (j_star 1024, n_sim 8192, m_grid 32)
///   plant        {"type": "surrogate-fc", "step_size": 0.01} or
///                {"type": "linear-oracle", "A": [[..]], "B": [..], "C": [..], "D": 0}
///   constraint   lower / upper (null = unbounded), anchor, epsilon,
///                tighten_mode ("scale" | "margin"), margin
///   disturbance  ranges [[lo, hi], ...], seed
///   governor     j_star, epsilon, n_kappa, m_grid, n_sim, backend,
///                infeasible_policy, prefix_mode, workers, early_termination
///   simulation   steps, x0, v0, profile [[t_start, r], ...]
///
/// Missing keys fall back to the bundled surrogate experiment. Explicit
/// governor keys override the preset. Throws ConfigError.
Experiment parse_experiment(std::string_view json_text);
Experiment load_experiment(const std::filesystem::path& path);

}  // namespace refgov
