#include "pedflow/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "pedflow/errors.hpp"
#include "pedflow/macro_solver.hpp"
#include "pedflow/micro_sim.hpp"

namespace pedflow {

double lp_error(const Grid& grid_a, std::span<const double> a, const Grid& grid_b,
                std::span<const double> b, double p) {
  if (!grid_a.same_shape(grid_b) || a.size() != grid_a.size() || b.size() != grid_b.size()) {
    throw ConfigError("lp_error: fields live on different grids");
  }
  if (!(p >= 1.0)) throw ConfigError("lp_error: p must be >= 1");
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) sum += std::pow(std::abs(a[k] - b[k]), p);
  return std::pow(grid_a.cell_area() * sum, 1.0 / p);
}

double total_mass(const Grid& grid, std::span<const double> u) {
  double sum = 0.0;
  for (double v : u) sum += v;
  return sum * grid.cell_area();
}

double mass_balance(const Grid& grid, std::span<const double> u, double cut) {
  double sum = 0.0;
  const double x0 = grid.window().x_min;
  for (std::size_t i = 0; i < grid.nx(); ++i) {
    const double left = x0 + static_cast<double>(i) * grid.dx();
    const double fraction = std::clamp((cut - left) / grid.dx(), 0.0, 1.0);
    if (fraction == 0.0) continue;
    double column = 0.0;
    for (std::size_t j = 0; j < grid.ny(); ++j) column += u[grid.index(i, j)];
    sum += fraction * column;
  }
  return sum * grid.cell_area();
}

std::optional<double> crossing_time(std::span<const double> times, std::span<const double> mb,
                                    double theta) {
  const std::size_t n = std::min(times.size(), mb.size());
  for (std::size_t k = 0; k < n; ++k) {
    const double crossed = 1.0 - mb[k];
    if (crossed < theta) continue;
    if (k == 0) return times[0];
    const double before = 1.0 - mb[k - 1];
    const double w = (theta - before) / (crossed - before);
    return times[k - 1] + w * (times[k] - times[k - 1]);
  }
  return std::nullopt;
}

ComparisonReport compare_runs(const EnsembleResult& micro, const MacroRun& macro) {
  if (!micro.grid.same_shape(macro.grid)) {
    throw ConfigError("compare: micro and macro runs use different grids");
  }
  if (micro.snapshot_times.size() != macro.snapshots.size()) {
    throw ConfigError("compare: micro and macro runs have different snapshot times");
  }
  ComparisonReport report;
  report.cuts = micro.cuts;
  report.mb_micro.assign(report.cuts.size(), {});
  report.mb_macro.assign(report.cuts.size(), {});
  const Grid& grid = micro.grid;

  for (std::size_t s = 0; s < macro.snapshots.size(); ++s) {
    const double t = micro.snapshot_times[s];
    if (std::abs(t - macro.snapshots[s].t) > 1e-9) {
      throw ConfigError("compare: snapshot times differ between tiers");
    }
    const std::vector<double> u_mic = micro.density(s);
    const std::vector<double> u_mac = macro.snapshots[s].total();
    report.times.push_back(t);
    report.l1.push_back(lp_error(grid, u_mic, grid, u_mac, 1.0));
    report.l2.push_back(lp_error(grid, u_mic, grid, u_mac, 2.0));
    for (std::size_t c = 0; c < report.cuts.size(); ++c) {
      report.mb_micro[c].push_back(mass_balance(grid, u_mic, report.cuts[c]));
      report.mb_macro[c].push_back(mass_balance(grid, u_mac, report.cuts[c]));
    }
  }

  std::vector<double> times;
  for (const MacroDiagnostic& d : macro.diagnostics) times.push_back(d.t);
  for (std::size_t c = 0; c < report.cuts.size(); ++c) {
    CrossingSummary summary;
    summary.cut = report.cuts[c];
    std::vector<double> mb;
    for (const MacroDiagnostic& d : macro.diagnostics) mb.push_back(d.mass_balance.at(c));
    summary.macro = crossing_time(times, mb, kMacroCrossingTheta);
    double sum = 0.0;
    summary.micro_total = micro.crossing.size();
    for (const auto& per_cut : micro.crossing) {
      if (per_cut.at(c)) {
        sum += *per_cut[c];
        ++summary.micro_reached;
      }
    }
    if (summary.micro_reached > 0) summary.micro_mean = sum / static_cast<double>(summary.micro_reached);
    report.crossing.push_back(summary);
  }
  return report;
}

}  // namespace pedflow
