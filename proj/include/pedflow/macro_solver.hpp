#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "pedflow/forces.hpp"
#include "pedflow/geometry.hpp"
#include "pedflow/grid.hpp"
#include "pedflow/rates.hpp"
#include "pedflow/scenario.hpp"

namespace pedflow {

/// Cell means of the stopped (u0) and walking (u1) densities.
struct MacroField {
  std::vector<double> u0;
  std::vector<double> u1;
  double t = 0.0;

  MacroField() = default;
  explicit MacroField(std::size_t cells) : u0(cells, 0.0), u1(cells, 0.0) {}
  std::vector<double> total() const;
};

/// Exact solution of d/dt (u0, u1) = Lambda (u0, u1) over `dt` for one cell.
std::pair<double, double> exact_reaction(double stopped_rate, double walking_rate, double u0,
                                         double u1, double dt);

struct AdvectionReport {
  double outflow_left = 0.0;   // mass that left through x = x_min
  double outflow_right = 0.0;  // mass that left through x = x_max
  std::size_t substeps = 0;
};

/// Fractional-step finite-volume solver for the two-status density system.
///
/// Advection of u1 is first-order upwind on each axis (dimension splitting,
/// sweep order alternating between calls) with interface speed equal to the
/// mean of the adjacent cell velocities. Walls and masked faces carry no
/// flux; open x ends let mass leave but not enter.
class MacroSolver {
 public:
  MacroSolver(WalkableDomain domain, ReflectionParams reflection, ForceParams forces,
              RateFunction rates, const Grid& grid, double cfl = 0.45);
  explicit MacroSolver(const Scenario& scenario);

  const Grid& grid() const { return grid_; }
  const RateFunction& rates() const { return rates_; }
  double cfl() const { return cfl_; }

  /// V(x, tau F(x, u) / (1 + tau lambda(1, x))) with F from the direct sum.
  Vec2 closure_velocity(const Vec2& x, const MacroField& field) const;
  /// closure_velocity at every unmasked cell center through the FFT
  /// convolution; masked cells get zero.
  void velocity_field(const MacroField& field, std::span<Vec2> out);
  /// Largest step with cfl * ... bound: cfl / max_k (|a_x|/dx + |a_y|/dy); +inf if all zero.
  double stable_dt(std::span<const Vec2> velocity) const;

  /// Advects u1 over dt with the velocity frozen at the start; sub-steps as
  /// needed to honor the CFL bound. Throws RuntimeFailure on non-finite velocity.
  AdvectionReport advection_step(MacroField& field, double dt);
  /// Advects u1 over dt with a prescribed cell velocity field, sub-stepping
  /// to the CFL bound and alternating the sweep order.
  AdvectionReport advect_frozen(MacroField& field, std::span<const Vec2> velocity, double dt);
  /// One x/y sweep pair with a prescribed cell velocity field, no CFL check.
  AdvectionReport advect_with(MacroField& field, std::span<const Vec2> velocity, double dt,
                              bool x_first) const;
  void reaction_step(MacroField& field, double dt) const;
  /// Advection then reaction (Godunov splitting).
  AdvectionReport fractional_step(MacroField& field, double dt);

 private:
  void sweep_x(std::vector<double>& u, std::span<const Vec2> a, double dt,
               AdvectionReport& report) const;
  void sweep_y(std::vector<double>& u, std::span<const Vec2> a, double dt) const;

  WalkableDomain domain_;
  ReflectionParams reflection_;
  ForceParams forces_;
  RateFunction rates_;
  Grid grid_;
  double cfl_;
  InteractionField interaction_;
  std::vector<double> stopped_rate_;  // lambda(0, x_k)
  std::vector<double> walking_rate_;  // lambda(1, x_k)
  bool x_first_ = true;
};

/// Initial cell means g0 = p_stop * rho, g1 = (1 - p_stop) * rho with exact
/// cell averaging. Throws ConfigError if mass overlaps masked cells or does
/// not integrate to 1 within 1e-12.
MacroField initial_field(const Scenario& scenario, const Grid& grid);

struct MacroDiagnostic {
  double t = 0.0;
  double dt = 0.0;
  double total_mass = 0.0;        // mass inside the window
  std::vector<double> mass_balance;  // per cut, counting mass that left on the left
  double outflow = 0.0;           // cumulative mass that left the window
};

struct MacroRun {
  Grid grid;
  std::vector<MacroField> snapshots;  // at scenario snapshot times
  std::vector<MacroDiagnostic> diagnostics;  // t = 0 and after every step
};

/// Advances the scenario from t = 0 to the horizon with adaptive
/// dt = min(cfl / max(|a_x|/dx + |a_y|/dy), 1 / max(lambda0 + lambda1), max_dt),
/// shortened to land on snapshot times.
MacroRun run_macro(const Scenario& scenario);

}  // namespace pedflow
