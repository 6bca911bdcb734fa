#pragma once

#include <filesystem>
#include <ostream>
#include <span>
#include <string>

#include "refgov/harness.hpp"
#include "refgov/oracle.hpp"

namespace refgov {

// All writers emit a header row followed by one row per record, with a fixed
// column order. Doubles use the shortest round-trip representation.

/// t,r,v,y,kappa_opt,feasible,wall_us
void emit_csv(std::ostream& out, const RunRecord& record);
/// t,kappa_opt,v,feasible,sims_run,early_terms,latest_violation_step,steady_margin,wall_us
/// (latest_violation_step is empty when no prediction left the set)
void emit_diagnostics_csv(std::ostream& out, const RunRecord& record);
/// backend,n_sim,mode,mean_us,min_us,max_us,reps
void emit_csv(std::ostream& out, std::span<const TimingRecord> records);
/// case,expected,actual,tolerance,pass
void emit_csv(std::ostream& out, std::span<const oracle::OracleReport> reports);

/// File variants; I/O failures throw std::runtime_error naming the path.
void emit_csv(const std::filesystem::path& path, const RunRecord& record);
void emit_diagnostics_csv(const std::filesystem::path& path, const RunRecord& record);
void emit_csv(const std::filesystem::path& path, std::span<const TimingRecord> records);
void emit_csv(const std::filesystem::path& path, std::span<const oracle::OracleReport> reports);

std::string format_double(double value);

}  // namespace refgov
