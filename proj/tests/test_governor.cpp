#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "refgov/governor.hpp"
#include "refgov/oracle.hpp"
#include "support/generators.hpp"

namespace refgov {
namespace {

using testing::for_all;
using testing::Gen;
using testing::scalar_plant;

TEST(UpdateSetpoint, ConvexCombination) {
    EXPECT_EQ(update_setpoint(2.0, 4.0, 0.5), 3.0);
    EXPECT_EQ(update_setpoint(-1.3, 7.9, 0.0), -1.3);
    EXPECT_EQ(update_setpoint(-1.3, 7.9, 1.0), 7.9);
    EXPECT_EQ(update_setpoint(0.1, 0.7, 1.0), 0.7);
    EXPECT_THROW(update_setpoint(0.0, 1.0, -0.01), std::domain_error);
    EXPECT_THROW(update_setpoint(0.0, 1.0, 1.01), std::domain_error);
    EXPECT_THROW(update_setpoint(0.0, 1.0, std::nan("")), std::domain_error);
}

TEST(KappaGrid, UniformAndEndpointsExact) {
    const auto g = kappa_grid(32);
    ASSERT_EQ(g.size(), 32u);
    EXPECT_EQ(g.front(), 0.0);
    EXPECT_EQ(g.back(), 1.0);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(g[i], static_cast<double>(i) / 31.0);
    EXPECT_THROW(kappa_grid(1), std::invalid_argument);
}

TEST(ExtractKappa, AllRowsFeasible) {
    FeasibilityMatrix p(5, 3);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t k = 0; k < 3; ++k) p.set(i, k, true);
    const auto sel = extract_kappa_opt(p);
    EXPECT_EQ(sel.row, 4u);
    EXPECT_EQ(sel.kappa, 1.0);
}

TEST(ExtractKappa, NonContiguousRowsHonoured) {
    const auto p = FeasibilityMatrix::from_rows({{1, 1}, {1, 0}, {1, 1}});
    const auto sel = extract_kappa_opt(p);
    EXPECT_EQ(sel.row, 2u);
    EXPECT_EQ(sel.kappa, 1.0);
    const auto prefix = extract_kappa_prefix(p);
    EXPECT_EQ(prefix.row, 0u);
    EXPECT_EQ(prefix.kappa, 0.0);
}

TEST(ExtractKappa, LargestAllOnesRow) {
    const auto p = FeasibilityMatrix::from_rows({{1, 1}, {1, 1}, {0, 1}, {0, 0}});
    const auto sel = extract_kappa_opt(p);
    EXPECT_EQ(sel.row, 1u);
    EXPECT_DOUBLE_EQ(*sel.kappa, 1.0 / 3.0);
    EXPECT_EQ(extract_kappa_prefix(p).row, 1u);
}

TEST(ExtractKappa, NothingFeasibleAndSingleRow) {
    const auto none = extract_kappa_opt(FeasibilityMatrix::from_rows({{0, 1}, {1, 0}}));
    EXPECT_FALSE(none.row);
    EXPECT_FALSE(none.kappa);
    EXPECT_EQ(extract_kappa_opt(FeasibilityMatrix::from_rows({{1}})).kappa, 1.0);
    EXPECT_FALSE(extract_kappa_prefix(FeasibilityMatrix::from_rows({{0}, {1}})).kappa);
}

TEST(ExtractKappa, AgreesWithDirectScanOnRandomMatrices) {
    for_all(300, 51, [](Gen& g) {
        const std::size_t m = g.index(2, 12), n = g.index(1, 5);
        FeasibilityMatrix p(m, n);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t k = 0; k < n; ++k) p.set(i, k, g.coin(0.8));
        std::optional<std::size_t> best;
        for (std::size_t i = 0; i < m; ++i) {
            bool all = true;
            for (std::size_t k = 0; k < n; ++k) all = all && p(i, k);
            if (all) best = i;
        }
        const auto sel = extract_kappa_opt(p);
        EXPECT_EQ(sel.row, best);
        if (best) EXPECT_EQ(*sel.kappa, static_cast<double>(*best) / static_cast<double>(m - 1));
        const auto prefix = extract_kappa_prefix(p);
        if (prefix.kappa) EXPECT_LE(*prefix.kappa, *sel.kappa);
    });
}

GovernorConfig config_with(std::size_t j_star, std::size_t n_kappa, double eps, std::size_t m = 32,
                           std::size_t n_sim = 1) {
    GovernorConfig c;
    c.j_star = j_star;
    c.n_kappa = n_kappa;
    c.m_grid = m;
    c.n_sim = n_sim;
    c.tightening.epsilon = Epsilon(eps);
    return c;
}

TEST(Bisection, FeasibleAtOneStopsAfterFirstProbe) {
    const auto plant = scalar_plant(0.5, 0.5);
    const StateVec x{0.0};
    GovernorState state{0.0};
    const auto result = bisection_rg(plant, x, state, 0.5, ConstraintSet::at_most(1.0, 0.0), config_with(30, 8, 0.05));
    EXPECT_EQ(result.kappa_opt, 1.0);
    EXPECT_TRUE(result.feasible);
    EXPECT_EQ(result.diagnostics.sims_run, 1u);
    EXPECT_EQ(state.v_prev, 0.5);
}

TEST(Bisection, NothingFeasibleReturnsZero) {
    const auto plant = scalar_plant(0.5, 0.5);
    const StateVec x{5.0};
    GovernorState state{0.2};
    const auto result = bisection_rg(plant, x, state, 3.0, ConstraintSet::at_most(2.0, 0.0), config_with(30, 8, 0.05));
    EXPECT_EQ(result.kappa_opt, 0.0);
    EXPECT_FALSE(result.feasible);
    EXPECT_EQ(state.v_prev, 0.2);
}

TEST(Bisection, WithinResolutionBelowExactThreshold) {
    std::mt19937_64 rng(52);
    for (int c = 0; c < 50; ++c) {
        const auto lc = oracle::random_linear_case(rng, 48);
        const auto interval = oracle::linear_feasible_interval(lc.a, lc.b, lc.c, 0.0, lc.x0, lc.v_prev, lc.r, lc.set,
                                                               lc.eps, lc.j_star);
        ASSERT_TRUE(interval) << "case " << c;
        const LinearOraclePlant plant(lc.a, lc.b, lc.c);
        GovernorState state{lc.v_prev};
        const auto result = bisection_rg(plant, lc.x0, state, lc.r, lc.set, config_with(lc.j_star, 8, lc.eps));
        EXPECT_LE(result.kappa_opt, interval->hi + 1e-9) << "case " << c;
        EXPECT_GE(result.kappa_opt, interval->hi - std::pow(0.5, 8) - 1e-9) << "case " << c;
    }
}

TEST(Sequential, MinimumOverScenarios) {
    // x+ = 0.5 x + 0.5 v + d, y <= 2. A constant d = 0.87 settles at v + 1.74,
    // leaving room for v <= 0.26; bisection with four halvings lands on 0.25.
    const auto plant = scalar_plant(0.5, 0.5);
    const std::size_t j_star = 20;
    std::vector<double> values(2 * (j_star + 1), 0.0);
    std::fill(values.begin() + static_cast<std::ptrdiff_t>(j_star + 1), values.end(), 0.87);
    const ScenarioSet scenarios(2, j_star + 1, 1, 0, values);
    const auto config = config_with(j_star, 4, 0.05, 32, 2);
    const auto set = ConstraintSet::at_most(2.0, 0.0);
    const StateVec x{0.0};

    const ScenarioSet benign(1, j_star + 1, 1, 0, std::vector<double>(values.begin(), values.begin() + j_star + 1));
    const ScenarioSet harsh(1, j_star + 1, 1, 0, std::vector<double>(values.begin() + j_star + 1, values.end()));
    auto single = config_with(j_star, 4, 0.05, 32, 1);
    GovernorState s1{0.0}, s2{0.0}, s3{0.0};
    EXPECT_EQ(robust_rg_sequential(plant, x, s1, 1.0, set, benign, single).kappa_opt, 1.0);
    EXPECT_EQ(robust_rg_sequential(plant, x, s2, 1.0, set, harsh, single).kappa_opt, 0.25);
    const auto both = robust_rg_sequential(plant, x, s3, 1.0, set, scenarios, config);
    EXPECT_EQ(both.kappa_opt, 0.25);
    EXPECT_EQ(s3.v_prev, 0.25);
}

TEST(Sequential, DuplicatedScenarioMatchesSingle) {
    for_all(10, 53, [](Gen& g) {
        const SurrogateFuelCellPlant plant;
        const std::size_t j_star = 60;
        const auto base = sample_scenarios(DisturbanceModel({{-0.01, 0.01}, {-0.01, 0.01}, {-0.01, 0.01}}), 1,
                                           j_star + 1, g.bits());
        const std::size_t copies = g.index(2, 6);
        std::vector<double> repeated;
        for (std::size_t c = 0; c < copies; ++c) repeated.insert(repeated.end(), base.values().begin(), base.values().end());
        const ScenarioSet dup(copies, j_star + 1, 3, 0, repeated);
        const StateVec x{g.uniform(0, 0.5), g.uniform(0, 0.5), 0.0};
        const double r = g.uniform(0, 3);
        const auto set = ConstraintSet::at_most(0.9, 0.0);
        GovernorState a{0.1}, b{0.1};
        const double one = robust_rg_sequential(plant, x, a, r, set, base, config_with(j_star, 10, 0.05, 32, 1)).kappa_opt;
        const double many =
            robust_rg_sequential(plant, x, b, r, set, dup, config_with(j_star, 10, 0.05, 32, copies)).kappa_opt;
        EXPECT_EQ(one, many);
    });
}

TEST(Sequential, ZeroScenarioCollapsesToBisection) {
    std::mt19937_64 rng(54);
    for (int c = 0; c < 30; ++c) {
        const auto lc = oracle::random_linear_case(rng, 40);
        const LinearOraclePlant plant(lc.a, lc.b, lc.c);
        const auto config = config_with(lc.j_star, 12, lc.eps);
        GovernorState a{lc.v_prev}, b{lc.v_prev};
        const auto bis = bisection_rg(plant, lc.x0, a, lc.r, lc.set, config);
        const auto seq =
            robust_rg_sequential(plant, lc.x0, b, lc.r, lc.set, zero_scenarios(lc.x0.size(), lc.j_star + 1), config);
        EXPECT_EQ(bis.kappa_opt, seq.kappa_opt) << "case " << c;
    }
}

TEST(Sequential, RejectsScenarioCountMismatch) {
    const auto plant = scalar_plant(0.5, 0.5);
    const StateVec x{0.0};
    GovernorState s{0.0};
    EXPECT_THROW(robust_rg_sequential(plant, x, s, 1.0, ConstraintSet::at_most(2, 0), zero_scenarios(1, 11),
                                      config_with(10, 4, 0.05, 32, 3)),
                 std::invalid_argument);
}

TEST(Parallel, AllFeasibleGivesOne) {
    const auto plant = scalar_plant(0.5, 0.5);
    const StateVec x{0.0};
    GovernorState s{0.0};
    const auto scen = sample_scenarios(DisturbanceModel({{-0.01, 0.01}}), 8, 21, 3);
    const auto result =
        robust_rg_parallel(plant, x, s, 0.5, ConstraintSet::at_most(1.0, 0.0), scen, config_with(20, 8, 0.05, 32, 8));
    EXPECT_EQ(result.kappa_opt, 1.0);
    EXPECT_EQ(result.feasibility.count_ones(), 32u * 8u);
}

TEST(Parallel, GridAgreesWithBisectionOnLinearPlants) {
    std::mt19937_64 rng(55);
    for (int c = 0; c < 50; ++c) {
        const auto lc = oracle::random_linear_case(rng, 48);
        const LinearOraclePlant plant(lc.a, lc.b, lc.c);
        const auto config = config_with(lc.j_star, 16, lc.eps);
        GovernorState a{lc.v_prev}, b{lc.v_prev};
        const double grid = grid_rg(plant, lc.x0, a, lc.r, lc.set, config, SerialBackend{}).kappa_opt;
        const double bis = bisection_rg(plant, lc.x0, b, lc.r, lc.set, config).kappa_opt;
        EXPECT_LE(std::abs(grid - bis), 1.0 / 31.0 + 1e-12) << "case " << c;
        EXPECT_EQ(std::round(grid * 31.0), grid * 31.0);
    }
}

TEST(Parallel, ZeroScenarioCollapsesToNominalGrid) {
    std::mt19937_64 rng(56);
    for (int c = 0; c < 30; ++c) {
        const auto lc = oracle::random_linear_case(rng, 40);
        const LinearOraclePlant plant(lc.a, lc.b, lc.c);
        const auto config = config_with(lc.j_star, 8, lc.eps);
        GovernorState a{lc.v_prev}, b{lc.v_prev};
        const auto robust = robust_rg_parallel(plant, lc.x0, a, lc.r, lc.set,
                                               zero_scenarios(lc.x0.size(), lc.j_star + 1), config, SerialBackend{});
        const auto nominal = grid_rg(plant, lc.x0, b, lc.r, lc.set, config, SerialBackend{});
        EXPECT_EQ(robust.kappa_opt, nominal.kappa_opt);
        EXPECT_EQ(robust.feasibility, nominal.feasibility);
    }
}

TEST(Parallel, AddingScenariosNeverRaisesKappa) {
    for_all(10, 57, [](Gen& g) {
        const SurrogateFuelCellPlant plant;
        const std::size_t j_star = 80;
        const double w = g.uniform(0.005, 0.05);
        const DisturbanceModel model({{-w, w}, {-w, w}, {-w, w}});
        const std::uint64_t seed = g.bits();
        const StateVec x{g.uniform(0, 0.8), g.uniform(0, 1), g.uniform(0, 0.4)};
        const double v_prev = x[1];
        const double r = g.uniform(0.5, 3);
        const auto set = ConstraintSet::at_most(0.9, 0.0);
        double previous = 1.0;
        for (std::size_t n_sim : {1u, 4u, 16u, 48u}) {
            GovernorState s{v_prev};
            const auto result = robust_rg_parallel(plant, x, s, r, set, sample_scenarios(model, n_sim, j_star + 1, seed),
                                                   config_with(j_star, 8, 0.05, 32, n_sim), SerialBackend{});
            const double kappa = result.feasible ? result.kappa_opt : -1.0;
            EXPECT_LE(kappa, previous) << "n_sim " << n_sim;
            previous = kappa;
        }
    });
}

TEST(Parallel, InfeasiblePolicyHoldAndError) {
    const auto plant = scalar_plant(0.5, 0.5);
    const StateVec x{5.0};
    const auto set = ConstraintSet::at_most(2.0, 0.0);
    auto config = config_with(10, 4, 0.05);
    GovernorState s{0.4};
    const auto held = grid_rg(plant, x, s, 1.0, set, config, SerialBackend{});
    EXPECT_FALSE(held.feasible);
    EXPECT_EQ(held.kappa_opt, 0.0);
    EXPECT_EQ(held.v_applied, 0.4);
    EXPECT_EQ(s.v_prev, 0.4);

    config.infeasible_policy = InfeasiblePolicy::error;
    EXPECT_THROW(grid_rg(plant, x, s, 1.0, set, config, SerialBackend{}), InfeasibleError);
    EXPECT_EQ(parse_infeasible_policy("error"), InfeasiblePolicy::error);
    EXPECT_THROW(parse_infeasible_policy("panic"), std::invalid_argument);
}

TEST(Parallel, ConfigBackendSelection) {
    const auto plant = scalar_plant(0.5, 0.5);
    const StateVec x{0.0};
    auto config = config_with(10, 4, 0.05);
    config.backend = BackendKind::gpu;
    GovernorState s{0.0};
    EXPECT_THROW(robust_rg_parallel(plant, x, s, 1.0, ConstraintSet::at_most(2, 0), zero_scenarios(1, 11), config),
                 BackendUnavailable);
    config.backend = BackendKind::multicore;
    config.workers = 3;
    EXPECT_EQ(robust_rg_parallel(plant, x, s, 1.0, ConstraintSet::at_most(2, 0), zero_scenarios(1, 11), config).kappa_opt,
              1.0);
}

TEST(GovernorConfig, Validation) {
    GovernorConfig c;
    EXPECT_NO_THROW(c.validate());
    c.m_grid = 1;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = {};
    c.j_star = 0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = {};
    c.n_kappa = 0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = {};
    c.n_sim = 0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(CheckCandidate, SteadyStateOutsideTightenedSetFails) {
    const SurrogateFuelCellPlant plant;
    const StateVec x0{0.0, 0.0, 0.0};
    const auto set = ConstraintSet::at_most(0.9, 0.0);
    // tanh(1.4) ~ 0.885 is inside Y but outside (1 - 0.05) Y.
    EXPECT_FALSE(check_candidate(plant, x0, 1.4, {}, set, Tightening{}, 256));
    EXPECT_FALSE(check_candidate(plant, x0, 2.5, {}, set, Tightening{}, 256));
}

TEST(CheckCandidate, StationaryFeasiblePoint) {
    const SurrogateFuelCellPlant plant;
    const double v = 0.5;
    const StateVec eq{std::tanh(v), v, std::tanh(v) / 2};
    const std::vector<double> zeros(257 * 3, 0.0);
    EXPECT_TRUE(check_candidate(plant, eq, v, zeros, ConstraintSet::at_most(0.9, 0.0), Tightening{}, 256));
}

TEST(CheckCandidate, OvershootTerminatesAtFirstViolation) {
    // Lightly damped pair of poles at 0.9 e^{+-0.5i}: step response overshoots
    // the DC gain of 1 by roughly 40 percent.
    const double rho = 0.9, theta = 0.5;
    Eigen::MatrixXd a(2, 2);
    a << 2 * rho * std::cos(theta), -rho * rho, 1.0, 0.0;
    Eigen::VectorXd b(2);
    b << 1.0, 0.0;
    Eigen::RowVectorXd c(2);
    c << 0.0, 1.0;
    const double gain = (c * (Eigen::MatrixXd::Identity(2, 2) - a).inverse() * b)(0);
    c /= gain;
    const LinearOraclePlant plant(a, b, c);
    const StateVec x0{0.0, 0.0};
    const auto set = ConstraintSet::at_most(1.2, 0.0);
    const double v = 1.0;

    const auto y = simulate_horizon(plant, x0, v, 61);
    std::size_t first = 0;
    while (first < y.size() && y[first] <= 1.2) ++first;
    ASSERT_LT(first, y.size()) << "test plant should overshoot";

    const auto outcome = evaluate_candidate(plant, x0, v, {}, set, tighten(set, Epsilon(0.05)), 60);
    EXPECT_FALSE(outcome.feasible);
    EXPECT_TRUE(outcome.steady_state_ok);
    EXPECT_TRUE(outcome.trajectory.early_terminated);
    EXPECT_EQ(outcome.trajectory.first_violation, first);
    EXPECT_EQ(outcome.trajectory.steps, first + 1);
    EXPECT_FALSE(check_candidate(plant, x0, v, {}, set, Tightening{}, 60));

    const auto full = evaluate_candidate(plant, x0, v, {}, set, tighten(set, Epsilon(0.05)), 60, false);
    EXPECT_FALSE(full.trajectory.early_terminated);
    EXPECT_EQ(full.trajectory.first_violation, first);
    EXPECT_EQ(full.trajectory.steps, 61u);
}

}  // namespace
}  // namespace refgov
