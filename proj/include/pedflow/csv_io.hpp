#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pedflow/macro_solver.hpp"
#include "pedflow/metrics.hpp"
#include "pedflow/micro_sim.hpp"

namespace pedflow {

/// Shortest decimal text that parses back to the same double.
std::string format_number(double v);
/// Snapshot label used in file names, e.g. 5 -> "5.000".
std::string time_label(double t);

std::filesystem::path snapshot_path(const std::filesystem::path& dir, const std::string& tier,
                                    double t);

// Density snapshots: <dir>/micro_t<time>.csv with i,j,x_center,y_center,u_mic
// and <dir>/macro_t<time>.csv with i,j,x_center,y_center,u0,u1.
void write_micro_snapshots(const std::filesystem::path& dir, const EnsembleResult& result);
void write_macro_snapshots(const std::filesystem::path& dir, const MacroRun& run);

// micro_replicates.csv (replicate,t,stopped_fraction) and
// micro_crossing.csv (replicate,cut,crossing_time; empty when not reached).
void write_micro_statistics(const std::filesystem::path& dir, const EnsembleResult& result);

// macro_diagnostics.csv: t,dt,total_mass,mb_<cut>...
void write_macro_diagnostics(const std::filesystem::path& dir, const MacroRun& run,
                             const std::vector<double>& cuts);

// error_vs_time.csv (t,l1,l2), mass_balance.csv (t,cut,micro,macro) and
// crossing_times.csv (cut,macro,micro_mean,micro_reached,micro_total).
void write_comparison(const std::filesystem::path& dir, const ComparisonReport& report);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
/// Plain comma-separated reader (no quoting). Throws ConfigError on ragged rows.
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace pedflow
