#include "refgov/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace refgov {

namespace {

template <class Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    writer(out);
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
    return std::string(buffer, ptr);
}

void emit_csv(std::ostream& out, const RunRecord& record) {
    out << "t,r,v,y,kappa_opt,feasible,wall_us\n";
    for (const RunRow& row : record.rows) {
        out << row.t << ',' << format_double(row.r) << ',' << format_double(row.v) << ',' << format_double(row.y)
            << ',' << format_double(row.kappa_opt) << ',' << (row.feasible ? 1 : 0) << ','
            << format_double(row.wall_us) << '\n';
    }
}

void emit_diagnostics_csv(std::ostream& out, const RunRecord& record) {
    out << "t,kappa_opt,v,feasible,sims_run,early_terms,latest_violation_step,steady_margin,wall_us\n";
    for (const RunRow& row : record.rows) {
        out << row.t << ',' << format_double(row.kappa_opt) << ',' << format_double(row.v) << ','
            << (row.feasible ? 1 : 0) << ',' << row.sims_run << ',' << row.early_terms << ',';
        if (row.latest_violation_step) out << *row.latest_violation_step;
        out << ',' << format_double(row.steady_margin) << ',' << format_double(row.wall_us) << '\n';
    }
}

void emit_csv(std::ostream& out, std::span<const TimingRecord> records) {
    out << "backend,n_sim,mode,mean_us,min_us,max_us,reps\n";
    for (const TimingRecord& rec : records) {
        out << rec.backend << ',' << rec.n_sim << ',';
        if (rec.skipped) {
            out << "skipped,,,,0\n";
            continue;
        }
        out << to_string(rec.mode) << ',' << format_double(rec.mean_us) << ',' << format_double(rec.min_us) << ','
            << format_double(rec.max_us) << ',' << rec.repetitions << '\n';
    }
}

void emit_csv(std::ostream& out, std::span<const oracle::OracleReport> reports) {
    out << "case,expected,actual,tolerance,pass\n";
    for (const auto& report : reports) {
        out << report.case_name << ',' << format_double(report.expected) << ',' << format_double(report.actual)
            << ',' << format_double(report.tolerance) << ',' << (report.pass ? 1 : 0) << '\n';
    }
}

void emit_csv(const std::filesystem::path& path, const RunRecord& record) {
    write_file(path, [&](std::ostream& out) { emit_csv(out, record); });
}

void emit_diagnostics_csv(const std::filesystem::path& path, const RunRecord& record) {
    write_file(path, [&](std::ostream& out) { emit_diagnostics_csv(out, record); });
}

void emit_csv(const std::filesystem::path& path, std::span<const TimingRecord> records) {
    write_file(path, [&](std::ostream& out) { emit_csv(out, records); });
}

void emit_csv(const std::filesystem::path& path, std::span<const oracle::OracleReport> reports) {
    write_file(path, [&](std::ostream& out) { emit_csv(out, reports); });
}

}  // namespace refgov
