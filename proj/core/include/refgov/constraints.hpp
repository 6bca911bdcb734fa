#pragma once

#include <limits>
#include <string_view>

namespace refgov {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Closed output interval [lower, upper] with an interior anchor point that
/// steady-state tightening contracts towards. Either bound may be infinite,
/// but not both.
class ConstraintSet {
public:
    /// Throws std::invalid_argument unless lower < anchor < upper and at
    /// least one bound is finite.
    ConstraintSet(double lower, double upper, double anchor);

    static ConstraintSet at_least(double lower, double anchor) { return {lower, kInfinity, anchor}; }
    static ConstraintSet at_most(double upper, double anchor) { return {-kInfinity, upper, anchor}; }

    double lower() const noexcept { return lower_; }
    double upper() const noexcept { return upper_; }
    double anchor() const noexcept { return anchor_; }

    friend bool operator==(const ConstraintSet&, const ConstraintSet&) = default;

private:
    double lower_;
    double upper_;
    double anchor_;
};

/// Tightening factor, strictly inside (0, 1).
class Epsilon {
public:
    explicit Epsilon(double value);
    double value() const noexcept { return value_; }

private:
    double value_;
};

enum class Membership { inside, outside, not_a_number };

/// Inclusive membership test. NaN is reported separately so callers can
/// count it as a diagnostic rather than a regular violation.
Membership classify(const ConstraintSet& set, double y) noexcept;

inline bool contains(const ConstraintSet& set, double y) noexcept {
    return y >= set.lower() && y <= set.upper();
}

/// Scales every finite bound towards the anchor by (1 - eps). With anchor 0
/// this is the plain (1 - eps) Y scaling.
ConstraintSet tighten(const ConstraintSet& set, Epsilon eps);

/// Moves every finite bound inward by `margin` >= 0. Throws
/// std::domain_error if the anchor would no longer be strictly inside.
ConstraintSet tighten_by_margin(const ConstraintSet& set, double margin);

enum class TightenMode { scale, margin };

TightenMode parse_tighten_mode(std::string_view text);
std::string_view to_string(TightenMode mode) noexcept;

/// How the steady-state output set is derived from the output constraint.
struct Tightening {
    TightenMode mode = TightenMode::scale;
    Epsilon epsilon{0.05};
    double margin = 0.0;
};

ConstraintSet steady_state_set(const ConstraintSet& set, const Tightening& tightening);

/// Signed distance from y to the nearest bound; positive inside the set.
double constraint_margin(const ConstraintSet& set, double y) noexcept;

}  // namespace refgov
