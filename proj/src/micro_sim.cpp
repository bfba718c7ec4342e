#include "pedflow/micro_sim.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

#include "pedflow/errors.hpp"

namespace pedflow {

namespace {

std::size_t step_index(double t, double dt, const char* what) {
  const double n = std::round(t / dt);
  if (std::abs(n * dt - t) > 1e-9 * std::max(1.0, std::abs(t))) {
    throw ConfigError(std::string(what) + " " + std::to_string(t) +
                      " is not a multiple of the micro time step");
  }
  return static_cast<std::size_t>(n);
}

void accumulate(std::span<const Vec2> positions, const Grid& grid,
                std::vector<std::uint64_t>& counts, std::uint64_t& outside) {
  for (const Vec2& p : positions) {
    if (const auto cell = grid.locate(p)) {
      ++counts[*cell];
    } else {
      ++outside;
    }
  }
}

std::vector<double> to_density(const std::vector<std::uint64_t>& counts, std::size_t pedestrians,
                               std::size_t replicates, const Grid& grid) {
  const double scale = 1.0 / (static_cast<double>(pedestrians) * static_cast<double>(replicates) *
                              grid.cell_area());
  std::vector<double> out(counts.size());
  for (std::size_t k = 0; k < counts.size(); ++k) out[k] = static_cast<double>(counts[k]) * scale;
  return out;
}

}  // namespace

std::size_t MicroState::stopped_count() const {
  return static_cast<std::size_t>(std::count(statuses.begin(), statuses.end(), Status::Stopped));
}

MicroModel::MicroModel(WalkableDomain domain, ReflectionParams reflection, ForceParams forces,
                       RateFunction rates, double dt)
    : domain_(std::move(domain)),
      reflection_(reflection),
      forces_(std::move(forces)),
      rates_(std::move(rates)),
      dt_(dt) {
  if (!(dt_ > 0.0)) throw ConfigError("micro time step must be > 0");
  rates_.validate();
  if (dt_ * rates_.sup_bound() > 1.0) {
    throw ConfigError("micro time step violates dt * ||lambda||_inf <= 1");
  }
}

MicroModel::MicroModel(const Scenario& s)
    : MicroModel(s.domain, s.reflection, s.forces, s.rates, s.micro_dt()) {}

TransitionMatrix transition_probabilities(double stopped_rate, double walking_rate, double dt) {
  const double leave_stopped = dt * stopped_rate;
  const double leave_walking = dt * walking_rate;
  return {{{1.0 - leave_stopped, leave_stopped}, {leave_walking, 1.0 - leave_walking}}};
}

MicroState sample_initial(const MicroModel& model, const InitialLaw& law, std::size_t pedestrians,
                          CounterRng& rng) {
  MicroState s;
  s.positions.resize(pedestrians);
  s.velocities.resize(pedestrians);
  s.statuses.resize(pedestrians);
  for (std::size_t i = 0; i < pedestrians; ++i) {
    s.positions[i] = {rng.uniform(law.region.x_min, law.region.x_max),
                      rng.uniform(law.region.y_min, law.region.y_max)};
    s.statuses[i] = rng.uniform() < law.p_stop ? Status::Stopped : Status::Walking;
    if (!model.domain().is_walkable(s.positions[i])) {
      throw ConfigError("initial region is not inside the walkable set");
    }
  }

  const ForceParams& f = model.forces();
  const double tau = f.relaxation_time;
  const double weight = 1.0 / static_cast<double>(pedestrians);
  for (std::size_t i = 0; i < pedestrians; ++i) {
    if (s.statuses[i] == Status::Stopped) continue;
    const Vec2& x = s.positions[i];
    Vec2 mean_force = (f.comfort_speed / tau) * destination_direction(f, x);
    if (f.kernel.amplitude != 0.0) {
      Vec2 sum;
      for (std::size_t j = 0; j < pedestrians; ++j) sum += interaction_kernel(f, x - s.positions[j]);
      mean_force += sum * weight;
    }
    s.velocities[i] = mean_force * (tau / (1.0 + tau * model.rates()(Status::Walking, x)));
  }
  return s;
}

MicroState step(const MicroModel& model, const MicroState& state, CounterRng& rng,
                StepDiagnostics* diagnostics) {
  const std::size_t n = state.size();
  const double dt = model.dt();
  std::vector<Vec2> forces(n);
  micro_forces(model.forces(), state.positions, state.velocities, forces);

  MicroState next;
  next.positions.resize(n);
  next.velocities.resize(n);
  next.statuses.resize(n);
  next.step = state.step + 1;
  next.time = static_cast<double>(next.step) * dt;

  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& x = state.positions[i];
    const Status r = state.statuses[i];
    Vec2 x_next = x;
    Vec2 v_next;
    if (r == Status::Walking) {
      x_next = x + dt * reflect_velocity(model.domain(), model.reflection(), x, state.velocities[i]);
      v_next = state.velocities[i] + dt * forces[i];
    }
    // P(U < p) = p for U uniform on the 53-bit lattice in [0, 1).
    const bool flip = rng.uniform() < dt * model.rates()(r, x);
    const Status r_next = flip ? flipped(r) : r;

    if (!model.domain().is_walkable(x_next)) {
      x_next = model.domain().project_to_walkable(x_next);
      if (diagnostics) ++diagnostics->projections;
    }
    if (diagnostics && norm(model.forces().destination - x_next) < kArrivalTolerance) {
      ++diagnostics->arrivals;
    }
    next.positions[i] = x_next;
    // A velocity carried into the stopped state is never read again, so it is
    // stored as zero.
    next.velocities[i] = r_next == Status::Walking ? v_next : Vec2{};
    next.statuses[i] = r_next;
  }
  return next;
}

DensityEstimate empirical_density(std::span<const std::vector<Vec2>> replicates, const Grid& grid) {
  DensityEstimate out;
  if (replicates.empty()) {
    out.density.assign(grid.size(), 0.0);
    return out;
  }
  const std::size_t n = replicates.front().size();
  std::vector<std::uint64_t> counts(grid.size(), 0);
  for (const auto& positions : replicates) {
    if (positions.size() != n) throw ConfigError("replicates hold different pedestrian counts");
    accumulate(positions, grid, counts, out.outside);
  }
  out.density = to_density(counts, n, replicates.size(), grid);
  return out;
}

std::vector<double> EnsembleResult::density(std::size_t snapshot) const {
  return to_density(counts.at(snapshot), pedestrians, replicates, grid);
}

EnsembleResult run_ensemble(const Scenario& scenario, const EnsembleOptions& options) {
  const MicroModel model(scenario);
  const double dt = model.dt();
  const std::size_t total_steps = step_index(scenario.horizon, dt, "horizon");

  EnsembleResult result;
  result.grid = Grid(scenario.domain, scenario.macro.dx, scenario.macro.dy);
  result.pedestrians = scenario.micro.pedestrians;
  result.replicates = scenario.micro.replicates;
  result.dt = dt;
  result.snapshot_times = scenario.snapshots;
  result.cuts = scenario.cuts;

  std::vector<std::size_t> snapshot_steps;
  for (double t : scenario.snapshots) snapshot_steps.push_back(step_index(t, dt, "snapshot time"));

  const std::size_t snaps = snapshot_steps.size();
  const std::size_t cuts = scenario.cuts.size();
  result.stopped_fraction.assign(result.replicates, std::vector<double>(snaps, 0.0));
  result.crossing.assign(result.replicates, std::vector<std::optional<double>>(cuts));

  struct WorkerTotals {
    std::vector<std::vector<std::uint64_t>> counts;
    std::vector<std::uint64_t> outside;
    StepDiagnostics diagnostics;
    std::exception_ptr error;
  };
  const unsigned workers = static_cast<unsigned>(
      std::clamp<std::size_t>(options.workers == 0 ? 1 : options.workers, 1, result.replicates));
  std::vector<WorkerTotals> totals(workers);

  auto run_replicate = [&](std::size_t m, WorkerTotals& acc) {
    CounterRng rng(replicate_key(scenario.seed, m));
    MicroState state = sample_initial(model, scenario.initial, result.pedestrians, rng);
    auto& crossing = result.crossing[m];
    auto record = [&](const MicroState& s) {
      for (std::size_t c = 0; c < cuts; ++c) {
        if (crossing[c]) continue;
        const double cut = scenario.cuts[c];
        if (std::all_of(s.positions.begin(), s.positions.end(),
                        [cut](const Vec2& p) { return p.x > cut; })) {
          crossing[c] = s.time;
        }
      }
      for (std::size_t k = 0; k < snaps; ++k) {
        if (snapshot_steps[k] != s.step) continue;
        accumulate(s.positions, result.grid, acc.counts[k], acc.outside[k]);
        result.stopped_fraction[m][k] =
            static_cast<double>(s.stopped_count()) / static_cast<double>(s.size());
      }
    };
    record(state);
    for (std::size_t n = 0; n < total_steps; ++n) {
      state = step(model, state, rng, &acc.diagnostics);
      record(state);
    }
  };

  auto worker_body = [&](unsigned w) {
    WorkerTotals& acc = totals[w];
    acc.counts.assign(snaps, std::vector<std::uint64_t>(result.grid.size(), 0));
    acc.outside.assign(snaps, 0);
    try {
      for (std::size_t m = w; m < result.replicates; m += workers) run_replicate(m, acc);
    } catch (...) {
      acc.error = std::current_exception();
    }
  };

  if (workers == 1) {
    worker_body(0);
  } else {
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < workers; ++w) threads.emplace_back(worker_body, w);
    for (auto& t : threads) t.join();
  }

  result.counts.assign(snaps, std::vector<std::uint64_t>(result.grid.size(), 0));
  result.outside.assign(snaps, 0);
  for (const WorkerTotals& acc : totals) {
    if (acc.error) std::rethrow_exception(acc.error);
    for (std::size_t k = 0; k < snaps; ++k) {
      for (std::size_t c = 0; c < result.grid.size(); ++c) result.counts[k][c] += acc.counts[k][c];
      result.outside[k] += acc.outside[k];
    }
    result.projections += acc.diagnostics.projections;
    result.arrivals += acc.diagnostics.arrivals;
  }
  return result;
}

}  // namespace pedflow
