#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pedflow/grid.hpp"

namespace pedflow {

struct EnsembleResult;
struct MacroRun;

/// (dx dy sum |a - b|^p)^(1/p). Throws ConfigError on grid mismatch or p < 1.
double lp_error(const Grid& grid_a, std::span<const double> a, const Grid& grid_b,
                std::span<const double> b, double p);

double total_mass(const Grid& grid, std::span<const double> u);

/// Mass at first coordinate <= cut; a straddling cell contributes the
/// fraction of its width left of the cut.
double mass_balance(const Grid& grid, std::span<const double> u, double cut);

/// First time at which 1 - mb >= theta, interpolated linearly between
/// samples; nullopt if never reached.
std::optional<double> crossing_time(std::span<const double> times, std::span<const double> mb,
                                    double theta);

/// Fraction of mass treated as "everyone crossed" for density curves.
inline constexpr double kMacroCrossingTheta = 0.999;

struct CrossingSummary {
  double cut = 0.0;
  std::optional<double> macro;        // theta = kMacroCrossingTheta on per-step diagnostics
  std::optional<double> micro_mean;   // over replicates that crossed
  std::size_t micro_reached = 0;
  std::size_t micro_total = 0;
};

struct ComparisonReport {
  std::vector<double> times;
  std::vector<double> l1;
  std::vector<double> l2;
  std::vector<double> cuts;
  std::vector<std::vector<double>> mb_micro;  // [cut][time]
  std::vector<std::vector<double>> mb_macro;  // [cut][time]
  std::vector<CrossingSummary> crossing;
};

/// Throws ConfigError if the runs use different grids or snapshot times.
ComparisonReport compare_runs(const EnsembleResult& micro, const MacroRun& macro);

}  // namespace pedflow
