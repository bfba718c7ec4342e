#pragma once

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include "pedflow/scenario.hpp"

namespace pedflow::test {

inline std::filesystem::path scenario_path(const std::string& name) {
  return std::filesystem::path(PEDFLOW_SCENARIO_DIR) / (name + ".json");
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("pedflow_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// Classical RK4 for d/dt (a, b) = (-l0 a + l1 b, l0 a - l1 b) with many small
/// steps. Kept independent of the solver's closed-form reaction.
inline std::array<double, 2> rk4_reaction(double l0, double l1, double a, double b, double t,
                                          int steps) {
  const auto rhs = [&](double x, double y) {
    return std::array<double, 2>{-l0 * x + l1 * y, l0 * x - l1 * y};
  };
  const double h = t / steps;
  for (int s = 0; s < steps; ++s) {
    const auto k1 = rhs(a, b);
    const auto k2 = rhs(a + 0.5 * h * k1[0], b + 0.5 * h * k1[1]);
    const auto k3 = rhs(a + 0.5 * h * k2[0], b + 0.5 * h * k2[1]);
    const auto k4 = rhs(a + h * k3[0], b + h * k3[1]);
    a += h / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
    b += h / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
  }
  return {a, b};
}

/// Small closed box with homogeneous rates, used by solver tests.
inline Scenario box_scenario(double stopped_rate = 6.0, double walking_rate = 5.0) {
  Scenario s;
  s.name = "box";
  s.domain = WalkableDomain(Rect{-2.0, 2.0, -1.0, 1.0}, {}, true);
  s.rates = RateFunction::homogeneous(stopped_rate, walking_rate);
  s.initial = InitialLaw{Rect{-1.5, -0.5, -0.5, 0.5}, 1.0, 0.5};
  s.micro = MicroSettings{20, 4, 0.01};
  s.macro = MacroSettings{0.1, 0.1, 0.45, std::nullopt};
  s.horizon = 1.0;
  s.snapshots = {0.0, 0.5, 1.0};
  s.cuts = {0.0};
  s.seed = 7;
  s.output = "runs/box";
  return s;
}

}  // namespace pedflow::test
