#include <cmath>

#include <gtest/gtest.h>

#include "refgov/config.hpp"

namespace refgov {
namespace {

TEST(Config, EmptyObjectGivesBundledExperiment) {
    const auto e = parse_experiment("{}");
    EXPECT_EQ(e.plant->name(), "surrogate-fc");
    EXPECT_EQ(e.governor.j_star, 256u);
    EXPECT_EQ(e.governor.n_sim, 64u);
    EXPECT_EQ(e.governor.m_grid, 32u);
    EXPECT_EQ(e.constraint.upper(), 0.9);
    EXPECT_EQ(e.steps, 2000u);
    EXPECT_FALSE(e.snapshot.empty());
}

TEST(Config, NamedPresetWithOverride) {
    const auto e = parse_experiment(R"({"preset": "paper-scale", "governor": {"m_grid": 16}})");
    EXPECT_EQ(e.governor.j_star, 1024u);
    EXPECT_EQ(e.governor.n_sim, 8192u);
    EXPECT_EQ(e.governor.m_grid, 16u);
}

TEST(Config, ExplicitConstraintBlock) {
    const auto e = parse_experiment(
        R"({"constraint": {"lower": 1.9, "anchor": 2.5, "epsilon": 0.2, "tighten_mode": "margin", "margin": 0.1}})");
    EXPECT_EQ(e.constraint.lower(), 1.9);
    EXPECT_TRUE(std::isinf(e.constraint.upper()));
    EXPECT_EQ(e.constraint.anchor(), 2.5);
    EXPECT_EQ(e.governor.tightening.epsilon.value(), 0.2);
    EXPECT_EQ(e.governor.tightening.mode, TightenMode::margin);
    EXPECT_EQ(e.governor.tightening.margin, 0.1);
}

TEST(Config, LinearOraclePlantFromArrays) {
    const auto e = parse_experiment(R"({
        "plant": {"type": "linear-oracle", "A": [[0.5, 0.1], [0.0, 0.3]], "B": [1, 0.5], "C": [[1, 0]], "D": 0.2},
        "constraint": {"lower": -1, "upper": 1},
        "disturbance": {"ranges": [[-0.1, 0.1], [0, 0]], "seed": 42},
        "simulation": {"steps": 10, "x0": [0.1, 0.2], "v0": 0.1, "profile": [[0, 0.5], [5, -0.5]]}
    })");
    const auto* plant = dynamic_cast<const LinearOraclePlant*>(e.plant.get());
    ASSERT_NE(plant, nullptr);
    EXPECT_EQ(plant->state_dim(), 2u);
    EXPECT_EQ(plant->a()(0, 1), 0.1);
    EXPECT_EQ(plant->b()(1), 0.5);
    EXPECT_EQ(plant->d(), 0.2);
    EXPECT_EQ(e.seed, 42u);
    EXPECT_EQ(e.profile.at(7), -0.5);
    EXPECT_EQ(e.x0, (StateVec{0.1, 0.2}));
}

TEST(Config, ErrorsAreConfigErrors) {
    EXPECT_THROW(parse_experiment("not json"), ConfigError);
    EXPECT_THROW(parse_experiment("[]"), ConfigError);
    EXPECT_THROW(parse_experiment(R"({"preset": "huge"})"), ConfigError);
    EXPECT_THROW(parse_experiment(R"({"plant": {"type": "turbine"}})"), ConfigError);
    EXPECT_THROW(parse_experiment(R"({"plant": {"type": "linear-oracle", "A": [[1.5]], "B": [1], "C": [1]}})"),
                 ConfigError);
    EXPECT_THROW(parse_experiment(R"({"governor": {"backend": "tpu"}})"), ConfigError);
    EXPECT_THROW(parse_experiment(R"({"governor": {"m_grid": 1}})"), ConfigError);
    EXPECT_THROW(parse_experiment(R"({"constraint": {"upper": 0.9, "epsilon": 1.5}})"), ConfigError);
    EXPECT_THROW(parse_experiment(R"({"disturbance": {"ranges": [[0, 1]]}})"), ConfigError);
    EXPECT_THROW(parse_experiment(R"({"simulation": {"x0": [0]}})"), ConfigError);
    EXPECT_THROW(load_experiment("/nonexistent/config.json"), ConfigError);
}

TEST(Config, GpuBackendParsesButIsNotBuilt) {
    const auto e = parse_experiment(R"({"governor": {"backend": "gpu"}})");
    EXPECT_EQ(e.governor.backend, BackendKind::gpu);
    EXPECT_FALSE(backend_available(BackendKind::gpu));
}

TEST(Config, SnapshotRoundTrips) {
    const auto first = parse_experiment(R"({"governor": {"n_sim": 7}, "disturbance": {"seed": 3}})");
    const auto second = parse_experiment(first.snapshot);
    EXPECT_EQ(second.snapshot, first.snapshot);
    EXPECT_EQ(second.governor.n_sim, 7u);
    EXPECT_EQ(second.seed, 3u);
}

}  // namespace
}  // namespace refgov
