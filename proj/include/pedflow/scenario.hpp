#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pedflow/forces.hpp"
#include "pedflow/geometry.hpp"
#include "pedflow/rates.hpp"

namespace pedflow {

/// Uniform initial law on `region` with the given density; each pedestrian
/// starts stopped with probability p_stop.
struct InitialLaw {
  Rect region;
  double density = 0.0;  // 1/m^2
  double p_stop = 0.0;
  friend bool operator==(const InitialLaw&, const InitialLaw&) = default;
};

struct MicroSettings {
  std::size_t pedestrians = 50;
  std::size_t replicates = 200;
  std::optional<double> dt;  // defaults to min(0.01, 0.5 / ||lambda||_inf)
  friend bool operator==(const MicroSettings&, const MicroSettings&) = default;
};

struct MacroSettings {
  double dx = 0.05;
  double dy = 0.05;
  double cfl = 0.45;
  std::optional<double> max_dt;
  friend bool operator==(const MacroSettings&, const MacroSettings&) = default;
};

struct Scenario {
  std::string name;
  WalkableDomain domain;
  ReflectionParams reflection;
  ForceParams forces;
  RateFunction rates;
  InitialLaw initial;
  MicroSettings micro;
  MacroSettings macro;
  double horizon = 0.0;
  std::vector<double> snapshots;
  std::vector<double> cuts;
  std::uint64_t seed = 0;
  std::string output;

  double micro_dt() const;
  /// Checks every invariant eagerly; throws ConfigError naming the violated bound.
  void validate() const;
  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Parses and validates scenario text. Throws ConfigError on parse or
/// validation failure.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);
std::string dump_scenario(const Scenario& scenario);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

}  // namespace pedflow
