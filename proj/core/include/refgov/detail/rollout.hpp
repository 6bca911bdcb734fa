#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>

#include "refgov/dynamics.hpp"

namespace refgov::detail {

inline void check_operating_box(double bound, std::span<const double> x) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        // NaN fails the comparison as well.
        if (!(std::abs(x[i]) <= bound)) throw IntegrationOverflow(i, x[i]);
    }
}

/// Propagates x_{j+1} = f(x_j, v) + d_j and calls `on_output(j, y_j)` for
/// j = 0..horizon-1 until it returns false. `scratch` holds 2 * state_dim
/// doubles. Returns the number of outputs visited.
template <class OnOutput>
std::size_t rollout(const Plant& plant, std::span<const double> x0, double v, std::size_t horizon,
                    std::span<const double> disturbance, std::span<double> scratch,
                    OnOutput&& on_output) {
    const std::size_t n = plant.state_dim();
    std::span<double> current = scratch.first(n);
    std::span<double> next = scratch.subspan(n, n);
    const double bound = plant.operating_bound();
    std::copy(x0.begin(), x0.end(), current.begin());
    check_operating_box(bound, current);

    for (std::size_t j = 0; j < horizon; ++j) {
        if (!on_output(j, plant.output(current, v))) return j + 1;
        if (j + 1 == horizon) break;
        plant.step_into(current, v, next);
        if (!disturbance.empty()) {
            const double* d = disturbance.data() + j * n;
            for (std::size_t i = 0; i < n; ++i) next[i] += d[i];
        }
        check_operating_box(bound, next);
        std::swap(current, next);
    }
    return horizon;
}

}  // namespace refgov::detail
