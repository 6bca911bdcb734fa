#include "refgov/config.hpp"

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace refgov {

namespace {

using nlohmann::json;

double bound_or(const json& block, const char* key, double unbounded) {
    if (!block.contains(key) || block.at(key).is_null()) return unbounded;
    return block.at(key).get<double>();
}

Eigen::MatrixXd to_matrix(const json& value, const char* name) {
    if (!value.is_array() || value.empty()) throw ConfigError(std::string("plant.") + name + " must be a non-empty array");
    // A flat array is read as a column (B) or a row (C) by the caller.
    if (!value.front().is_array()) {
        Eigen::MatrixXd m(1, static_cast<Eigen::Index>(value.size()));
        for (std::size_t j = 0; j < value.size(); ++j) m(0, static_cast<Eigen::Index>(j)) = value[j].get<double>();
        return m;
    }
    const auto rows = static_cast<Eigen::Index>(value.size());
    const auto cols = static_cast<Eigen::Index>(value.front().size());
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const json& row = value[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw ConfigError(std::string("plant.") + name + " has ragged rows");
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = row[static_cast<std::size_t>(j)].get<double>();
    }
    return m;
}

std::shared_ptr<const Plant> make_plant(const json& block) {
    const std::string type = block.value("type", std::string("surrogate-fc"));
    if (type == "surrogate-fc") return std::make_shared<SurrogateFuelCellPlant>(block.value("step_size", 0.01));
    if (type == "linear-oracle") {
        for (const char* key : {"A", "B", "C"})
            if (!block.contains(key)) throw ConfigError(std::string("linear-oracle plant needs ") + key);
        const Eigen::MatrixXd a = to_matrix(block.at("A"), "A");
        const Eigen::MatrixXd b = to_matrix(block.at("B"), "B");
        const Eigen::MatrixXd c = to_matrix(block.at("C"), "C");
        const Eigen::VectorXd b_col = b.cols() == 1 ? Eigen::VectorXd(b.col(0)) : Eigen::VectorXd(b.row(0).transpose());
        const Eigen::RowVectorXd c_row = c.rows() == 1 ? Eigen::RowVectorXd(c.row(0)) : Eigen::RowVectorXd(c.col(0).transpose());
        if (b.rows() != 1 && b.cols() != 1) throw ConfigError("plant.B must be n x 1");
        if (c.rows() != 1 && c.cols() != 1) throw ConfigError("plant.C must be 1 x n");
        double d = 0.0;
        if (block.contains("D")) {
            const json& dv = block.at("D");
            d = dv.is_array() ? to_matrix(dv, "D")(0, 0) : dv.get<double>();
        }
        return std::make_shared<LinearOraclePlant>(a, b_col, c_row, d);
    }
    throw ConfigError("unknown plant type '" + type + "' (expected \"linear-oracle\" or \"surrogate-fc\")");
}

void apply_preset(const std::string& preset, GovernorConfig& g) {
    if (preset == "desk") {
        g.j_star = 256;
        g.n_sim = 64;
        g.m_grid = 32;
    } else if (preset == "paper-scale") {
        g.j_star = 1024;
        g.n_sim = 8192;
        g.m_grid = 32;
    } else {
        throw ConfigError("unknown preset '" + preset + "' (expected \"desk\" or \"paper-scale\")");
    }
}

json resolved_snapshot(const Experiment& e, const std::string& preset, const json& plant_block) {
    json snap;
    snap["preset"] = preset;
    snap["plant"] = plant_block;
    snap["plant"]["type"] = std::string(e.plant->name());
    auto bound = [](double v) { return std::isinf(v) ? json(nullptr) : json(v); };
    snap["constraint"] = {{"lower", bound(e.constraint.lower())},
                          {"upper", bound(e.constraint.upper())},
                          {"anchor", e.constraint.anchor()},
                          {"epsilon", e.governor.tightening.epsilon.value()},
                          {"tighten_mode", std::string(to_string(e.governor.tightening.mode))},
                          {"margin", e.governor.tightening.margin}};
    json ranges = json::array();
    for (const auto& r : e.disturbance.ranges()) ranges.push_back({r.lo, r.hi});
    snap["disturbance"] = {{"ranges", ranges}, {"seed", e.seed}};
    const auto& g = e.governor;
    snap["governor"] = {{"j_star", g.j_star},
                        {"n_kappa", g.n_kappa},
                        {"m_grid", g.m_grid},
                        {"n_sim", g.n_sim},
                        {"backend", std::string(to_string(g.backend))},
                        {"infeasible_policy", std::string(to_string(g.infeasible_policy))},
                        {"prefix_mode", g.prefix_mode},
                        {"workers", g.workers},
                        {"early_termination", g.early_termination}};
    json profile = json::array();
    for (const auto& step : e.profile.steps()) profile.push_back({step.start, step.r});
    snap["simulation"] = {{"steps", e.steps}, {"x0", e.x0}, {"v0", e.v0}, {"profile", profile}};
    return snap;
}

Experiment build(const json& root) {
    if (!root.is_object()) throw ConfigError("config root must be a JSON object");
    Experiment e = adversarial_surrogate_experiment();

    const json plant_block = root.value("plant", json::object());
    e.plant = make_plant(plant_block);
    const std::size_t n = e.plant->state_dim();

    const std::string preset = root.value("preset", std::string("desk"));
    apply_preset(preset, e.governor);

    const json constraint = root.value("constraint", json::object());
    if (root.contains("constraint")) {
        // Inside an explicit block, a missing bound means unbounded.
        e.constraint = ConstraintSet(bound_or(constraint, "lower", -kInfinity), bound_or(constraint, "upper", kInfinity),
                                     constraint.value("anchor", 0.0));
    }

    const json governor = root.value("governor", json::object());
    auto& g = e.governor;
    double epsilon = g.tightening.epsilon.value();
    if (constraint.contains("epsilon")) epsilon = constraint.at("epsilon").get<double>();
    if (governor.contains("epsilon")) epsilon = governor.at("epsilon").get<double>();
    g.tightening.epsilon = Epsilon(epsilon);
    g.tightening.mode = parse_tighten_mode(constraint.value("tighten_mode", std::string("scale")));
    g.tightening.margin = constraint.value("margin", 0.0);
    g.j_star = governor.value("j_star", g.j_star);
    g.n_kappa = governor.value("n_kappa", g.n_kappa);
    g.m_grid = governor.value("m_grid", g.m_grid);
    g.n_sim = governor.value("n_sim", g.n_sim);
    g.backend = parse_backend_kind(governor.value("backend", std::string(to_string(g.backend))));
    g.infeasible_policy =
        parse_infeasible_policy(governor.value("infeasible_policy", std::string(to_string(g.infeasible_policy))));
    g.prefix_mode = governor.value("prefix_mode", g.prefix_mode);
    g.workers = governor.value("workers", g.workers);
    g.early_termination = governor.value("early_termination", g.early_termination);
    g.validate();
    // Surface an empty tightened set at load time.
    (void)steady_state_set(e.constraint, g.tightening);

    const json disturbance = root.value("disturbance", json::object());
    if (disturbance.contains("ranges")) {
        std::vector<Range> ranges;
        for (const json& item : disturbance.at("ranges")) {
            if (!item.is_array() || item.size() != 2) throw ConfigError("disturbance.ranges entries must be [lo, hi]");
            ranges.push_back({item[0].get<double>(), item[1].get<double>()});
        }
        e.disturbance = DisturbanceModel(std::move(ranges));
    } else if (e.disturbance.state_dim() != n) {
        e.disturbance = DisturbanceModel::zero(n);
    }
    if (e.disturbance.state_dim() != n)
        throw ConfigError("disturbance.ranges has " + std::to_string(e.disturbance.state_dim()) +
                          " entries, plant has " + std::to_string(n) + " states");
    e.seed = disturbance.value("seed", e.seed);

    const json simulation = root.value("simulation", json::object());
    e.steps = simulation.value("steps", e.steps);
    e.x0 = simulation.contains("x0") ? simulation.at("x0").get<StateVec>() : StateVec(n, 0.0);
    if (e.x0.size() != n) throw ConfigError("simulation.x0 must have one entry per plant state");
    e.v0 = simulation.value("v0", e.v0);
    if (simulation.contains("profile")) {
        std::vector<ReferenceProfile::Step> steps;
        for (const json& item : simulation.at("profile")) {
            if (!item.is_array() || item.size() != 2) throw ConfigError("simulation.profile entries must be [t, r]");
            steps.push_back({item[0].get<std::size_t>(), item[1].get<double>()});
        }
        e.profile = ReferenceProfile(std::move(steps));
    }

    e.snapshot = resolved_snapshot(e, preset, plant_block).dump();
    return e;
}

}  // namespace

Experiment parse_experiment(std::string_view json_text) {
    try {
        return build(json::parse(json_text));
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("invalid config: ") + e.what());
    }
}

Experiment load_experiment(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_experiment(text.str());
}

}  // namespace refgov
