#include "pedflow/macro_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pedflow/errors.hpp"
#include "pedflow/metrics.hpp"

namespace pedflow {

std::vector<double> MacroField::total() const {
  std::vector<double> u(u0.size());
  for (std::size_t k = 0; k < u.size(); ++k) u[k] = u0[k] + u1[k];
  return u;
}

std::pair<double, double> exact_reaction(double stopped_rate, double walking_rate, double u0,
                                         double u1, double dt) {
  const double sum = stopped_rate + walking_rate;
  if (sum == 0.0) return {u0, u1};
  const double decay = std::exp(-dt * sum);
  const double relaxed = -std::expm1(-dt * sum);
  const double next0 =
      ((walking_rate + stopped_rate * decay) * u0 + walking_rate * relaxed * u1) / sum;
  const double next1 =
      (stopped_rate * relaxed * u0 + (stopped_rate + walking_rate * decay) * u1) / sum;
  return {next0, next1};
}

MacroSolver::MacroSolver(WalkableDomain domain, ReflectionParams reflection, ForceParams forces,
                         RateFunction rates, const Grid& grid, double cfl)
    : domain_(std::move(domain)),
      reflection_(reflection),
      forces_(std::move(forces)),
      rates_(std::move(rates)),
      grid_(grid),
      cfl_(cfl),
      interaction_(forces_, grid_),
      stopped_rate_(grid_.size(), 0.0),
      walking_rate_(grid_.size(), 0.0) {
  if (!(cfl_ > 0.0 && cfl_ <= 1.0)) throw ConfigError("CFL number must lie in (0, 1]");
  rates_.validate();
  for (std::size_t k = 0; k < grid_.size(); ++k) {
    const Vec2 c = grid_.center(k);
    stopped_rate_[k] = rates_(Status::Stopped, c);
    walking_rate_[k] = rates_(Status::Walking, c);
  }
}

MacroSolver::MacroSolver(const Scenario& s)
    : MacroSolver(s.domain, s.reflection, s.forces, s.rates, Grid(s.domain, s.macro.dx, s.macro.dy),
                  s.macro.cfl) {}

Vec2 MacroSolver::closure_velocity(const Vec2& x, const MacroField& field) const {
  const double tau = forces_.relaxation_time;
  const Vec2 mean_force = macro_mean_force(forces_, grid_, x, field.total());
  const double scale = tau / (1.0 + tau * rates_(Status::Walking, x));
  return reflect_velocity(domain_, reflection_, x, mean_force * scale);
}

void MacroSolver::velocity_field(const MacroField& field, std::span<Vec2> out) {
  if (out.size() != grid_.size() || field.u0.size() != grid_.size() ||
      field.u1.size() != grid_.size()) {
    throw ConfigError("macro field does not match the grid");
  }
  const std::vector<double> density = field.total();
  interaction_.apply(density, out);
  const double tau = forces_.relaxation_time;
  const double drive = forces_.comfort_speed / tau;
  for (std::size_t k = 0; k < grid_.size(); ++k) {
    if (grid_.masked(k)) {
      out[k] = Vec2{};
      continue;
    }
    const Vec2 x = grid_.center(k);
    const Vec2 mean_force = drive * destination_direction(forces_, x) + out[k];
    const Vec2 v = reflect_velocity(domain_, reflection_, x,
                                    mean_force * (tau / (1.0 + tau * walking_rate_[k])));
    if (!std::isfinite(v.x) || !std::isfinite(v.y)) {
      std::ostringstream os;
      os << "non-finite closure velocity at cell " << k << " (" << x.x << ", " << x.y << ")";
      throw RuntimeFailure(os.str());
    }
    out[k] = v;
  }
}

double MacroSolver::stable_dt(std::span<const Vec2> velocity) const {
  double rate = 0.0;
  for (std::size_t k = 0; k < grid_.size(); ++k) {
    if (grid_.masked(k)) continue;
    rate = std::max(rate, std::abs(velocity[k].x) / grid_.dx() + std::abs(velocity[k].y) / grid_.dy());
  }
  return rate > 0.0 ? cfl_ / rate : std::numeric_limits<double>::infinity();
}

void MacroSolver::sweep_x(std::vector<double>& u, std::span<const Vec2> a, double dt,
                          AdvectionReport& report) const {
  const std::size_t nx = grid_.nx();
  const std::size_t ny = grid_.ny();
  const bool open = !domain_.closed();
  const double ratio = dt / grid_.dx();
  std::vector<double> flux(nx + 1);
  for (std::size_t j = 0; j < ny; ++j) {
    const auto cell = [&](std::size_t i) { return grid_.index(i, j); };
    flux[0] = 0.0;
    flux[nx] = 0.0;
    if (open && !grid_.masked(cell(0))) flux[0] = std::min(a[cell(0)].x, 0.0) * u[cell(0)];
    if (open && !grid_.masked(cell(nx - 1))) {
      flux[nx] = std::max(a[cell(nx - 1)].x, 0.0) * u[cell(nx - 1)];
    }
    for (std::size_t i = 1; i < nx; ++i) {
      const std::size_t left = cell(i - 1);
      const std::size_t right = cell(i);
      if (grid_.masked(left) || grid_.masked(right)) {
        flux[i] = 0.0;
        continue;
      }
      const double speed = 0.5 * (a[left].x + a[right].x);
      flux[i] = std::max(speed, 0.0) * u[left] + std::min(speed, 0.0) * u[right];
    }
    for (std::size_t i = 0; i < nx; ++i) u[cell(i)] -= ratio * (flux[i + 1] - flux[i]);
    report.outflow_left -= flux[0] * dt * grid_.dy();
    report.outflow_right += flux[nx] * dt * grid_.dy();
  }
}

void MacroSolver::sweep_y(std::vector<double>& u, std::span<const Vec2> a, double dt) const {
  const std::size_t nx = grid_.nx();
  const std::size_t ny = grid_.ny();
  const double ratio = dt / grid_.dy();
  std::vector<double> flux(ny + 1, 0.0);
  for (std::size_t i = 0; i < nx; ++i) {
    const auto cell = [&](std::size_t j) { return grid_.index(i, j); };
    for (std::size_t j = 1; j < ny; ++j) {
      const std::size_t below = cell(j - 1);
      const std::size_t above = cell(j);
      if (grid_.masked(below) || grid_.masked(above)) {
        flux[j] = 0.0;
        continue;
      }
      const double speed = 0.5 * (a[below].y + a[above].y);
      flux[j] = std::max(speed, 0.0) * u[below] + std::min(speed, 0.0) * u[above];
    }
    for (std::size_t j = 0; j < ny; ++j) u[cell(j)] -= ratio * (flux[j + 1] - flux[j]);
  }
}

AdvectionReport MacroSolver::advect_with(MacroField& field, std::span<const Vec2> velocity,
                                         double dt, bool x_first) const {
  AdvectionReport report;
  report.substeps = 1;
  if (x_first) {
    sweep_x(field.u1, velocity, dt, report);
    sweep_y(field.u1, velocity, dt);
  } else {
    sweep_y(field.u1, velocity, dt);
    sweep_x(field.u1, velocity, dt, report);
  }
  return report;
}

AdvectionReport MacroSolver::advect_frozen(MacroField& field, std::span<const Vec2> velocity,
                                           double dt) {
  const double limit = stable_dt(velocity);
  const auto substeps =
      std::isfinite(limit) ? std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(dt / limit)))
                           : std::size_t{1};
  const double h = dt / static_cast<double>(substeps);
  AdvectionReport total;
  for (std::size_t s = 0; s < substeps; ++s) {
    const AdvectionReport r = advect_with(field, velocity, h, x_first_);
    x_first_ = !x_first_;
    total.outflow_left += r.outflow_left;
    total.outflow_right += r.outflow_right;
  }
  total.substeps = substeps;
  return total;
}

AdvectionReport MacroSolver::advection_step(MacroField& field, double dt) {
  std::vector<Vec2> velocity(grid_.size());
  velocity_field(field, velocity);
  return advect_frozen(field, velocity, dt);
}

void MacroSolver::reaction_step(MacroField& field, double dt) const {
  for (std::size_t k = 0; k < grid_.size(); ++k) {
    if (grid_.masked(k)) continue;
    const auto [u0, u1] =
        exact_reaction(stopped_rate_[k], walking_rate_[k], field.u0[k], field.u1[k], dt);
    field.u0[k] = u0;
    field.u1[k] = u1;
  }
}

AdvectionReport MacroSolver::fractional_step(MacroField& field, double dt) {
  const AdvectionReport report = advection_step(field, dt);
  reaction_step(field, dt);
  field.t += dt;
  return report;
}

MacroField initial_field(const Scenario& scenario, const Grid& grid) {
  const InitialLaw& law = scenario.initial;
  MacroField field(grid.size());
  double mass = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double fraction = grid.overlap_fraction(k, law.region);
    if (fraction == 0.0) continue;
    if (grid.masked(k) && fraction > 1e-9) {
      throw ConfigError("initial mass overlaps an obstacle cell");
    }
    field.u0[k] = law.p_stop * law.density * fraction;
    field.u1[k] = (1.0 - law.p_stop) * law.density * fraction;
    mass += (field.u0[k] + field.u1[k]) * grid.cell_area();
  }
  if (std::abs(mass - 1.0) > 1e-12) {
    std::ostringstream os;
    os.precision(17);
    os << "discretized initial mass " << mass << " differs from 1 by more than 1e-12";
    throw ConfigError(os.str());
  }
  return field;
}

namespace {

MacroDiagnostic diagnose(const Grid& grid, const MacroField& field, const std::vector<double>& cuts,
                         double dt, double outflow_left, double outflow_right) {
  MacroDiagnostic d;
  d.t = field.t;
  d.dt = dt;
  const std::vector<double> u = field.total();
  d.total_mass = total_mass(grid, u);
  for (double cut : cuts) d.mass_balance.push_back(mass_balance(grid, u, cut) + outflow_left);
  d.outflow = outflow_left + outflow_right;
  return d;
}

void check_field(const Grid& grid, const MacroField& field, std::size_t step) {
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double a = field.u0[k];
    const double b = field.u1[k];
    if (!std::isfinite(a) || !std::isfinite(b) || a < -1e-12 || b < -1e-12) {
      const Vec2 c = grid.center(k);
      std::ostringstream os;
      os.precision(17);
      os << "invalid density at step " << step << ", t = " << field.t << ", cell " << k << " ("
         << c.x << ", " << c.y << "): u0 = " << a << ", u1 = " << b;
      throw RuntimeFailure(os.str());
    }
  }
}

}  // namespace

MacroRun run_macro(const Scenario& scenario) {
  scenario.validate();
  MacroSolver solver(scenario);
  const Grid& grid = solver.grid();

  MacroRun run;
  run.grid = grid;
  MacroField field = initial_field(scenario, grid);

  const double horizon = scenario.horizon;
  const double reaction_cap = scenario.rates.sup_total() > 0.0
                                  ? 1.0 / scenario.rates.sup_total()
                                  : std::numeric_limits<double>::infinity();
  const double max_dt = scenario.macro.max_dt.value_or(std::numeric_limits<double>::infinity());
  constexpr double kTimeSnap = 1e-12;

  double outflow_left = 0.0;
  double outflow_right = 0.0;
  std::size_t next_snapshot = 0;
  const auto& snaps = scenario.snapshots;
  auto take_snapshots = [&]() {
    while (next_snapshot < snaps.size() && std::abs(snaps[next_snapshot] - field.t) <= kTimeSnap) {
      run.snapshots.push_back(field);
      run.snapshots.back().t = snaps[next_snapshot];
      ++next_snapshot;
    }
  };
  run.diagnostics.push_back(diagnose(grid, field, scenario.cuts, 0.0, 0.0, 0.0));
  take_snapshots();

  std::vector<Vec2> velocity(grid.size());
  std::size_t step = 0;
  while (field.t < horizon - kTimeSnap) {
    solver.velocity_field(field, velocity);
    double target = horizon;
    if (next_snapshot < snaps.size()) target = std::min(target, snaps[next_snapshot]);
    double dt = std::min({solver.stable_dt(velocity), reaction_cap, max_dt, target - field.t});
    if (!std::isfinite(dt)) dt = target - field.t;

    const AdvectionReport report = solver.advect_frozen(field, velocity, dt);
    solver.reaction_step(field, dt);
    outflow_left += report.outflow_left;
    outflow_right += report.outflow_right;
    field.t = std::abs(target - (field.t + dt)) <= kTimeSnap ? target : field.t + dt;
    ++step;

    check_field(grid, field, step);
    run.diagnostics.push_back(diagnose(grid, field, scenario.cuts, dt, outflow_left, outflow_right));
    take_snapshots();
  }
  return run;
}

}  // namespace pedflow
