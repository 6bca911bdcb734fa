#include "refgov/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "refgov/governor.hpp"

namespace refgov::oracle {

namespace {

struct Bounds {
    double lower;
    double upper;
};

Bounds tightened_bounds(const ConstraintSet& set, double eps) {
    if (!(eps >= 0.0 && eps < 1.0)) throw std::invalid_argument("oracle eps must lie in [0, 1)");
    const double a = set.anchor();
    const double lower = std::isinf(set.lower()) ? set.lower() : a + (1.0 - eps) * (set.lower() - a);
    const double upper = std::isinf(set.upper()) ? set.upper() : a + (1.0 - eps) * (set.upper() - a);
    return {lower, upper};
}

bool inside(double lower, double upper, double y) { return y >= lower && y <= upper; }

// Outputs are y_j = alpha_j + beta_j v; alpha/beta come from iterating the
// free and forced responses separately.
struct AffineResponse {
    std::vector<double> alpha;
    std::vector<double> beta;
    double dc_gain = 0.0;
};

AffineResponse affine_response(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::RowVectorXd& c,
                               double d, std::span<const double> x0, std::size_t j_star) {
    const auto n = a.rows();
    if (a.cols() != n || b.size() != n || c.size() != n || static_cast<Eigen::Index>(x0.size()) != n)
        throw std::invalid_argument("oracle: inconsistent linear plant dimensions");
    AffineResponse response;
    Eigen::VectorXd free = Eigen::Map<const Eigen::VectorXd>(x0.data(), n);
    Eigen::VectorXd forced = Eigen::VectorXd::Zero(n);
    for (std::size_t j = 0; j <= j_star; ++j) {
        response.alpha.push_back(c.dot(free));
        response.beta.push_back(c.dot(forced) + d);
        free = a * free;
        forced = a * forced + b;
    }
    const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n, n);
    response.dc_gain = c.dot((identity - a).fullPivLu().solve(b)) + d;
    return response;
}

// Intersects [lo, hi] with {kappa : lower <= p + q kappa <= upper}.
bool clip(double p, double q, double lower, double upper, double& lo, double& hi) {
    if (q == 0.0) return inside(lower, upper, p);
    double k1 = (lower - p) / q;
    double k2 = (upper - p) / q;
    if (q < 0.0) std::swap(k1, k2);
    lo = std::max(lo, k1);
    hi = std::min(hi, k2);
    return lo <= hi;
}

bool linear_point_feasible(const AffineResponse& response, double v, const ConstraintSet& set, Bounds steady) {
    for (std::size_t j = 0; j < response.alpha.size(); ++j)
        if (!inside(set.lower(), set.upper(), response.alpha[j] + response.beta[j] * v)) return false;
    return inside(steady.lower, steady.upper, response.dc_gain * v);
}

}  // namespace

std::optional<double> brute_force_kappa(const Plant& plant, std::span<const double> x0, double v_prev, double r,
                                        const ConstraintSet& set, double eps, std::size_t j_star,
                                        const ScenarioSet* scenarios, std::size_t resolution) {
    if (resolution < 1000) throw std::invalid_argument("brute_force_kappa: resolution must be at least 1000");
    const Bounds steady = tightened_bounds(set, eps);
    const std::size_t columns = scenarios ? scenarios->n_sim() : 1;

    std::optional<double> best;
    for (std::size_t i = 0; i <= resolution; ++i) {
        const double kappa = static_cast<double>(i) / static_cast<double>(resolution);
        const double v = v_prev + kappa * (r - v_prev);
        bool all_ok = inside(steady.lower, steady.upper, plant.steady_state_output(v));
        for (std::size_t k = 0; k < columns; ++k) {
            const auto disturbance = scenarios ? scenarios->scenario(k) : std::span<const double>{};
            std::vector<double> outputs;
            try {
                outputs = simulate_horizon(plant, x0, v, j_star + 1, disturbance);
            } catch (const IntegrationOverflow&) {
                all_ok = false;
                continue;
            }
            for (double y : outputs) all_ok = all_ok && inside(set.lower(), set.upper(), y);
        }
        if (all_ok) best = kappa;
    }
    return best;
}

std::optional<KappaInterval> linear_feasible_interval(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                                      const Eigen::RowVectorXd& c, double d,
                                                      std::span<const double> x0, double v_prev, double r,
                                                      const ConstraintSet& set, double eps, std::size_t j_star) {
    const AffineResponse response = affine_response(a, b, c, d, x0, j_star);
    const Bounds steady = tightened_bounds(set, eps);
    const double delta = r - v_prev;
    double lo = 0.0;
    double hi = 1.0;
    for (std::size_t j = 0; j < response.alpha.size(); ++j) {
        const double p = response.alpha[j] + response.beta[j] * v_prev;
        if (!clip(p, response.beta[j] * delta, set.lower(), set.upper(), lo, hi)) return std::nullopt;
    }
    if (!clip(response.dc_gain * v_prev, response.dc_gain * delta, steady.lower, steady.upper, lo, hi))
        return std::nullopt;
    return KappaInterval{lo, hi};
}

std::optional<double> linear_maximal_kappa(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                           const Eigen::RowVectorXd& c, std::span<const double> x0, double v_prev,
                                           double r, const ConstraintSet& set, double eps, std::size_t j_star,
                                           double d) {
    const auto interval = linear_feasible_interval(a, b, c, d, x0, v_prev, r, set, eps, j_star);
    if (!interval) return std::nullopt;
    const AffineResponse response = affine_response(a, b, c, d, x0, j_star);
    const Bounds steady = tightened_bounds(set, eps);
    const double points = static_cast<double>(kLinearGridPoints);

    // Start at the grid point just above the analytic upper end and walk
    // down until direct evaluation confirms feasibility.
    auto index = static_cast<std::int64_t>(std::min(std::ceil(interval->hi * points), points));
    const auto floor_index = static_cast<std::int64_t>(std::max(std::floor(interval->lo * points) - 1.0, 0.0));
    for (; index >= floor_index; --index) {
        const double kappa = static_cast<double>(index) / points;
        if (linear_point_feasible(response, v_prev + kappa * (r - v_prev), set, steady)) return kappa;
    }
    return std::nullopt;
}

LinearCase random_linear_case(std::mt19937_64& rng, std::size_t j_star) {
    std::uniform_int_distribution<int> dim_dist(1, 3);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

    for (;;) {
        const int n = dim_dist(rng);
        LinearCase out;
        out.j_star = j_star;
        out.a = Eigen::MatrixXd(n, n);
        out.b = Eigen::VectorXd(n);
        out.c = Eigen::RowVectorXd(n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) out.a(i, j) = normal(rng);
            out.b[i] = normal(rng);
            out.c[i] = normal(rng);
        }
        const double rho = spectral_radius(out.a);
        if (rho < 1e-6) continue;
        out.a *= uniform(0.3, 0.9) / rho;

        const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n, n);
        const Eigen::VectorXd unit_equilibrium = (identity - out.a).fullPivLu().solve(out.b);
        const double gain = out.c.dot(unit_equilibrium);
        if (std::abs(gain) < 0.2 || std::abs(gain) > 20.0) continue;

        out.v_prev = uniform(-1.0, 1.0);
        out.r = uniform(-3.0, 3.0);
        out.eps = uniform(0.02, 0.2);
        out.x0.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            out.x0[static_cast<std::size_t>(i)] = unit_equilibrium[i] * out.v_prev + uniform(-0.1, 0.1);

        const double y_prev = gain * out.v_prev;
        const double scale = std::abs(gain);
        const double upper = y_prev + uniform(0.3, 1.5) * scale;
        const double lower = unit(rng) < 0.5 ? -kInfinity : y_prev - uniform(0.3, 1.5) * scale;
        out.set = ConstraintSet(lower, upper, y_prev);

        const auto interval =
            linear_feasible_interval(out.a, out.b, out.c, 0.0, out.x0, out.v_prev, out.r, out.set, out.eps, j_star);
        if (interval && interval->lo <= 0.0) return out;
    }
}

std::vector<OracleReport> run_linear_suite(std::size_t cases, std::uint64_t seed, std::size_t m_grid) {
    std::mt19937_64 rng(seed);
    const SerialBackend backend;
    const double tolerance = 1.0 / static_cast<double>(m_grid - 1) + 1e-3;
    std::vector<OracleReport> reports;
    reports.reserve(cases);
    for (std::size_t i = 0; i < cases; ++i) {
        const LinearCase lc = random_linear_case(rng);
        const LinearOraclePlant plant(lc.a, lc.b, lc.c);

        GovernorConfig config;
        config.j_star = lc.j_star;
        config.m_grid = m_grid;
        config.n_sim = 1;
        config.tightening.epsilon = Epsilon(lc.eps);
        GovernorState state{lc.v_prev};
        const auto governed = robust_rg_parallel(plant, lc.x0, state, lc.r, lc.set,
                                                 zero_scenarios(plant.state_dim(), lc.j_star + 1), config, backend);
        const auto expected =
            linear_maximal_kappa(lc.a, lc.b, lc.c, lc.x0, lc.v_prev, lc.r, lc.set, lc.eps, lc.j_star);

        OracleReport report;
        report.case_name = "linear-" + std::to_string(i);
        report.expected = expected.value_or(-1.0);
        report.actual = governed.feasible ? governed.kappa_opt : -1.0;
        report.tolerance = tolerance;
        if (expected.has_value() != governed.feasible)
            report.pass = false;
        else
            report.pass = std::abs(report.expected - report.actual) <= tolerance;
        reports.push_back(report);
    }
    return reports;
}

}  // namespace refgov::oracle
