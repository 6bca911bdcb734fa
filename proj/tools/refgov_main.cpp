// refgov: closed-loop runs, benchmark sweeps and oracle checks for the
// scenario-robust reference governor.
//
// Exit codes: 0 success, 1 constraint violation (govern --strict) or failed
// oracle case, 2 configuration error, 3 backend unavailable.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "refgov/config.hpp"
#include "refgov/csv.hpp"
#include "refgov/harness.hpp"
#include "refgov/oracle.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitConfig = 2;
constexpr int kExitBackend = 3;

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string current;
    for (char ch : text) {
        if (ch == sep) {
            if (!current.empty()) parts.push_back(current);
            current.clear();
        } else if (ch != ' ') {
            current += ch;
        }
    }
    if (!current.empty()) parts.push_back(current);
    return parts;
}

struct GovernArgs {
    std::string config;
    std::string out;
    std::string diagnostics;
    std::string snapshot;
    bool governor_off = false;
    bool strict = false;
};

int run_govern(const GovernArgs& args) {
    const refgov::Experiment experiment = refgov::load_experiment(args.config);
    const refgov::RunRecord record = refgov::run_closed_loop(experiment, {.governor_on = !args.governor_off});
    refgov::emit_csv(args.out, record);
    if (!args.diagnostics.empty()) refgov::emit_diagnostics_csv(args.diagnostics, record);
    if (!args.snapshot.empty()) {
        std::ofstream snap(args.snapshot);
        if (!snap) throw std::runtime_error("cannot write " + args.snapshot);
        snap << record.config_snapshot << '\n';
    }

    std::cout << "steps=" << record.rows.size() << " violations=" << record.violations()
              << " infeasible_steps=" << record.infeasible_steps() << " seed=" << record.seed
              << " governor=" << (record.governor_on ? "on" : "off") << '\n';
    if (record.aborted) std::cerr << "run aborted: " << record.abort_reason << '\n';
    if (args.strict && (record.violations() > 0 || record.aborted)) return kExitViolation;
    return kExitOk;
}

struct BenchArgs {
    std::string config;
    std::string nsim = "1:32:1,32:8192:32";
    std::string backends = "serial,multicore,gpu";
    std::string modes = "kernel_only,end_to_end";
    std::size_t reps = 20;
    std::string out;
};

int run_bench(const BenchArgs& args) {
    const refgov::Experiment experiment = refgov::load_experiment(args.config);
    const auto n_sims = refgov::parse_nsim_spec(args.nsim);
    std::vector<refgov::BackendKind> backends;
    for (const auto& name : split(args.backends, ',')) backends.push_back(refgov::parse_backend_kind(name));

    refgov::BenchOptions options;
    options.repetitions = args.reps;
    options.modes.clear();
    for (const auto& name : split(args.modes, ',')) {
        if (name == "kernel_only")
            options.modes.push_back(refgov::TimingMode::kernel_only);
        else if (name == "end_to_end")
            options.modes.push_back(refgov::TimingMode::end_to_end);
        else
            throw refgov::ConfigError("unknown timing mode '" + name + "'");
    }

    const auto records = refgov::bench_sweep(experiment, n_sims, backends, options);
    refgov::emit_csv(args.out, records);
    for (const auto& rec : records) {
        if (rec.skipped) {
            std::cout << rec.backend << " n_sim=" << rec.n_sim << " skipped (backend unavailable)\n";
            continue;
        }
        std::cout << rec.backend << " n_sim=" << rec.n_sim << ' ' << refgov::to_string(rec.mode)
                  << " mean_us=" << rec.mean_us << " min_us=" << rec.min_us << '\n';
    }
    return kExitOk;
}

struct OracleArgs {
    std::string suite = "linear";
    std::size_t cases = 100;
    std::uint64_t seed = 7;
    std::string out;
};

int run_oracle(const OracleArgs& args) {
    if (args.suite != "linear") throw refgov::ConfigError("unknown oracle suite '" + args.suite + "'");
    const auto reports = refgov::oracle::run_linear_suite(args.cases, args.seed);
    if (!args.out.empty()) refgov::emit_csv(args.out, reports);
    std::size_t failures = 0;
    for (const auto& report : reports) {
        if (report.pass) continue;
        ++failures;
        std::cout << "FAIL " << report.case_name << " expected=" << report.expected << " actual=" << report.actual
                  << " tolerance=" << report.tolerance << '\n';
    }
    std::cout << "oracle suite '" << args.suite << "': " << reports.size() - failures << '/' << reports.size()
              << " cases passed\n";
    return failures == 0 ? kExitOk : kExitViolation;
}

struct ScenarioArgs {
    std::string config;
    std::string out;
    std::size_t step = 0;
};

int run_scenarios(const ScenarioArgs& args) {
    const refgov::Experiment experiment = refgov::load_experiment(args.config);
    const auto scenarios = refgov::sample_scenarios(
        experiment.disturbance, experiment.governor.n_sim, experiment.governor.j_star + 1,
        refgov::derive_seed(experiment.seed, args.step, refgov::SeedStream::prediction));
    refgov::write_scenario_dump(scenarios, args.out);
    std::cout << "wrote " << scenarios.n_sim() << " x " << scenarios.horizon() << " x " << scenarios.state_dim()
              << " scenarios to " << args.out << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Scenario-robust reference governor toolkit"};
    app.require_subcommand(1);

    GovernArgs govern;
    auto* govern_cmd = app.add_subcommand("govern", "Run the closed-loop experiment described by a config file");
    govern_cmd->add_option("--config", govern.config, "Experiment JSON")->required()->check(CLI::ExistingFile);
    govern_cmd->add_option("--out", govern.out, "Per-step CSV output")->required();
    govern_cmd->add_option("--diagnostics", govern.diagnostics, "Per-call governor diagnostics CSV");
    govern_cmd->add_option("--snapshot", govern.snapshot, "Write the resolved config as JSON");
    govern_cmd->add_flag("--governor-off", govern.governor_off, "Pass the reference straight through");
    govern_cmd->add_flag("--strict", govern.strict, "Exit with 1 if any constraint violation is recorded");

    BenchArgs bench;
    auto* bench_cmd = app.add_subcommand("bench", "Time governor calls over an N_sim sweep");
    bench_cmd->add_option("--config", bench.config, "Experiment JSON")->required()->check(CLI::ExistingFile);
    bench_cmd->add_option("--nsim", bench.nsim, "N_sim ranges, e.g. 1:32:1,32:8192:32")->capture_default_str();
    bench_cmd->add_option("--backends", bench.backends, "Comma-separated backends")->capture_default_str();
    bench_cmd->add_option("--modes", bench.modes, "kernel_only,end_to_end")->capture_default_str();
    bench_cmd->add_option("--reps", bench.reps, "Repetitions per cell")->capture_default_str()->check(CLI::PositiveNumber);
    bench_cmd->add_option("--out", bench.out, "Timing CSV output")->required();

    OracleArgs oracle;
    auto* oracle_cmd = app.add_subcommand("oracle", "Check the governor against brute-force references");
    oracle_cmd->add_option("--suite", oracle.suite, "Oracle suite")->capture_default_str();
    oracle_cmd->add_option("--cases", oracle.cases, "Randomized cases")->capture_default_str();
    oracle_cmd->add_option("--seed", oracle.seed, "Case generator seed")->capture_default_str();
    oracle_cmd->add_option("--out", oracle.out, "OracleReport CSV output");

    ScenarioArgs scen;
    auto* scen_cmd = app.add_subcommand("scenarios", "Dump one timestep's prediction scenarios as RGSC binary");
    scen_cmd->add_option("--config", scen.config, "Experiment JSON")->required()->check(CLI::ExistingFile);
    scen_cmd->add_option("--out", scen.out, "Binary output path")->required();
    scen_cmd->add_option("--step", scen.step, "Timestep whose seed is used")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*govern_cmd) return run_govern(govern);
        if (*bench_cmd) return run_bench(bench);
        if (*oracle_cmd) return run_oracle(oracle);
        if (*scen_cmd) return run_scenarios(scen);
    } catch (const refgov::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const refgov::BackendUnavailable& e) {
        std::cerr << "backend unavailable: " << e.what() << '\n';
        return kExitBackend;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitViolation;
    }
    return kExitOk;
}
