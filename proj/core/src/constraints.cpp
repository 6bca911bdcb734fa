#include "refgov/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace refgov {

ConstraintSet::ConstraintSet(double lower, double upper, double anchor)
    : lower_(lower), upper_(upper), anchor_(anchor) {
    if (std::isnan(lower) || std::isnan(upper) || !std::isfinite(anchor))
        throw std::invalid_argument("constraint bounds must not be NaN and the anchor must be finite");
    if (std::isinf(lower) && std::isinf(upper))
        throw std::invalid_argument("constraint set needs at least one finite bound");
    if (!(lower < upper)) throw std::invalid_argument("constraint set requires lower < upper");
    if (!(lower < anchor && anchor < upper))
        throw std::invalid_argument("constraint anchor " + std::to_string(anchor) +
                                    " is not strictly inside the set");
}

Epsilon::Epsilon(double value) : value_(value) {
    if (!(value > 0.0 && value < 1.0))
        throw std::invalid_argument("epsilon must lie strictly inside (0, 1), got " + std::to_string(value));
}

Membership classify(const ConstraintSet& set, double y) noexcept {
    if (std::isnan(y)) return Membership::not_a_number;
    return contains(set, y) ? Membership::inside : Membership::outside;
}

ConstraintSet tighten(const ConstraintSet& set, Epsilon eps) {
    const double factor = 1.0 - eps.value();
    const double anchor = set.anchor();
    auto shrink = [&](double bound) {
        return std::isinf(bound) ? bound : anchor + factor * (bound - anchor);
    };
    const double lower = shrink(set.lower());
    const double upper = shrink(set.upper());
    if (!(lower < anchor && anchor < upper))
        throw std::logic_error("tightened constraint set is empty");
    return ConstraintSet(lower, upper, anchor);
}

ConstraintSet tighten_by_margin(const ConstraintSet& set, double margin) {
    if (!(margin >= 0.0) || !std::isfinite(margin))
        throw std::invalid_argument("tightening margin must be finite and non-negative");
    const double lower = std::isinf(set.lower()) ? set.lower() : set.lower() + margin;
    const double upper = std::isinf(set.upper()) ? set.upper() : set.upper() - margin;
    if (!(lower < set.anchor() && set.anchor() < upper))
        throw std::domain_error("margin " + std::to_string(margin) + " pushes a bound past the anchor");
    return ConstraintSet(lower, upper, set.anchor());
}

TightenMode parse_tighten_mode(std::string_view text) {
    if (text == "scale") return TightenMode::scale;
    if (text == "margin") return TightenMode::margin;
    throw std::invalid_argument("unknown tighten_mode '" + std::string(text) + "'");
}

std::string_view to_string(TightenMode mode) noexcept {
    return mode == TightenMode::scale ? "scale" : "margin";
}

ConstraintSet steady_state_set(const ConstraintSet& set, const Tightening& tightening) {
    switch (tightening.mode) {
        case TightenMode::scale: return tighten(set, tightening.epsilon);
        case TightenMode::margin: return tighten_by_margin(set, tightening.margin);
    }
    throw std::logic_error("unhandled tighten mode");
}

double constraint_margin(const ConstraintSet& set, double y) noexcept {
    return std::min(y - set.lower(), set.upper() - y);
}

}  // namespace refgov
