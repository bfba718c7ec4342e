#include "pedflow/csv_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pedflow/errors.hpp"

namespace pedflow {

namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeFailure("cannot write " + path.string());
  return out;
}

std::string optional_number(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string time_label(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", t);
  return buf;
}

fs::path snapshot_path(const fs::path& dir, const std::string& tier, double t) {
  return dir / (tier + "_t" + time_label(t) + ".csv");
}

void write_micro_snapshots(const fs::path& dir, const EnsembleResult& result) {
  const Grid& g = result.grid;
  for (std::size_t s = 0; s < result.snapshot_times.size(); ++s) {
    const std::vector<double> u = result.density(s);
    auto out = open_output(snapshot_path(dir, "micro", result.snapshot_times[s]));
    out << "i,j,x_center,y_center,u_mic\n";
    for (std::size_t i = 0; i < g.nx(); ++i) {
      for (std::size_t j = 0; j < g.ny(); ++j) {
        const Vec2 c = g.center(i, j);
        out << i << ',' << j << ',' << format_number(c.x) << ',' << format_number(c.y) << ','
            << format_number(u[g.index(i, j)]) << '\n';
      }
    }
  }
}

void write_macro_snapshots(const fs::path& dir, const MacroRun& run) {
  const Grid& g = run.grid;
  for (const MacroField& f : run.snapshots) {
    auto out = open_output(snapshot_path(dir, "macro", f.t));
    out << "i,j,x_center,y_center,u0,u1\n";
    for (std::size_t i = 0; i < g.nx(); ++i) {
      for (std::size_t j = 0; j < g.ny(); ++j) {
        const Vec2 c = g.center(i, j);
        const std::size_t k = g.index(i, j);
        out << i << ',' << j << ',' << format_number(c.x) << ',' << format_number(c.y) << ','
            << format_number(f.u0[k]) << ',' << format_number(f.u1[k]) << '\n';
      }
    }
  }
}

void write_micro_statistics(const fs::path& dir, const EnsembleResult& result) {
  auto stats = open_output(dir / "micro_replicates.csv");
  stats << "replicate,t,stopped_fraction\n";
  for (std::size_t m = 0; m < result.replicates; ++m) {
    for (std::size_t s = 0; s < result.snapshot_times.size(); ++s) {
      stats << m << ',' << format_number(result.snapshot_times[s]) << ','
            << format_number(result.stopped_fraction[m][s]) << '\n';
    }
  }
  auto crossing = open_output(dir / "micro_crossing.csv");
  crossing << "replicate,cut,crossing_time\n";
  for (std::size_t m = 0; m < result.replicates; ++m) {
    for (std::size_t c = 0; c < result.cuts.size(); ++c) {
      crossing << m << ',' << format_number(result.cuts[c]) << ','
               << optional_number(result.crossing[m][c]) << '\n';
    }
  }
}

void write_macro_diagnostics(const fs::path& dir, const MacroRun& run,
                             const std::vector<double>& cuts) {
  auto out = open_output(dir / "macro_diagnostics.csv");
  out << "t,dt,total_mass";
  for (double c : cuts) out << ",mb_" << format_number(c);
  out << '\n';
  for (const MacroDiagnostic& d : run.diagnostics) {
    out << format_number(d.t) << ',' << format_number(d.dt) << ',' << format_number(d.total_mass);
    for (double mb : d.mass_balance) out << ',' << format_number(mb);
    out << '\n';
  }
}

void write_comparison(const fs::path& dir, const ComparisonReport& report) {
  auto errors = open_output(dir / "error_vs_time.csv");
  errors << "t,l1,l2\n";
  for (std::size_t s = 0; s < report.times.size(); ++s) {
    errors << format_number(report.times[s]) << ',' << format_number(report.l1[s]) << ','
           << format_number(report.l2[s]) << '\n';
  }
  auto balance = open_output(dir / "mass_balance.csv");
  balance << "t,cut,micro,macro\n";
  for (std::size_t s = 0; s < report.times.size(); ++s) {
    for (std::size_t c = 0; c < report.cuts.size(); ++c) {
      balance << format_number(report.times[s]) << ',' << format_number(report.cuts[c]) << ','
              << format_number(report.mb_micro[c][s]) << ',' << format_number(report.mb_macro[c][s])
              << '\n';
    }
  }
  auto crossing = open_output(dir / "crossing_times.csv");
  crossing << "cut,macro,micro_mean,micro_reached,micro_total\n";
  for (const CrossingSummary& c : report.crossing) {
    crossing << format_number(c.cut) << ',' << optional_number(c.macro) << ','
             << optional_number(c.micro_mean) << ',' << c.micro_reached << ',' << c.micro_total
             << '\n';
  }
}

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
  };
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path.string() + ": empty file");
  table.header = split(line);
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != table.header.size()) {
      throw ConfigError(path.string() + ":" + std::to_string(number) + ": expected " +
                        std::to_string(table.header.size()) + " fields");
    }
    table.rows.push_back(std::move(cells));
  }
  return table;
}

}  // namespace pedflow
