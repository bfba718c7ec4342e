#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pedflow/forces.hpp"
#include "pedflow/geometry.hpp"
#include "pedflow/grid.hpp"
#include "pedflow/random.hpp"
#include "pedflow/rates.hpp"
#include "pedflow/scenario.hpp"

namespace pedflow {

/// Positions, velocities and statuses of N pedestrians at t = step * dt.
struct MicroState {
  std::vector<Vec2> positions;
  std::vector<Vec2> velocities;
  std::vector<Status> statuses;
  std::size_t step = 0;
  double time = 0.0;

  std::size_t size() const { return positions.size(); }
  std::size_t stopped_count() const;
};

/// Everything one Euler step needs. Construction refuses dt * ||lambda||_inf > 1.
class MicroModel {
 public:
  MicroModel(WalkableDomain domain, ReflectionParams reflection, ForceParams forces,
             RateFunction rates, double dt);
  explicit MicroModel(const Scenario& scenario);

  const WalkableDomain& domain() const { return domain_; }
  const ReflectionParams& reflection() const { return reflection_; }
  const ForceParams& forces() const { return forces_; }
  const RateFunction& rates() const { return rates_; }
  double dt() const { return dt_; }

 private:
  WalkableDomain domain_;
  ReflectionParams reflection_;
  ForceParams forces_;
  RateFunction rates_;
  double dt_;
};

struct StepDiagnostics {
  std::uint64_t projections = 0;  // positions pulled back into the walkable set
  std::uint64_t arrivals = 0;     // pedestrians within tolerance of the destination
};

/// One-step status law: row r gives P(next = 0 | r) and P(next = 1 | r).
using TransitionMatrix = std::array<std::array<double, 2>, 2>;
TransitionMatrix transition_probabilities(double stopped_rate, double walking_rate, double dt);

/// Uniform positions on the initial region, Bernoulli(p_stop) stopped
/// statuses, and closure velocities with a 1/N interaction weight.
MicroState sample_initial(const MicroModel& model, const InitialLaw& law, std::size_t pedestrians,
                          CounterRng& rng);

/// One synchronous Euler step; every force reads the old state.
MicroState step(const MicroModel& model, const MicroState& state, CounterRng& rng,
                StepDiagnostics* diagnostics = nullptr);

/// Empirical density of positions pooled over replicates, per cell:
/// count / (N M dx dy). Cells are half-open; points outside the window only
/// increase `outside`.
struct DensityEstimate {
  std::vector<double> density;
  std::uint64_t outside = 0;
};
DensityEstimate empirical_density(std::span<const std::vector<Vec2>> replicates, const Grid& grid);

struct EnsembleOptions {
  unsigned workers = 1;  // result does not depend on this
};

struct EnsembleResult {
  Grid grid;
  std::size_t pedestrians = 0;
  std::size_t replicates = 0;
  double dt = 0.0;
  std::vector<double> snapshot_times;
  std::vector<std::vector<std::uint64_t>> counts;  // [snapshot][cell]
  std::vector<std::uint64_t> outside;              // [snapshot]
  std::vector<std::vector<double>> stopped_fraction;            // [replicate][snapshot]
  std::vector<double> cuts;
  std::vector<std::vector<std::optional<double>>> crossing;     // [replicate][cut]
  std::uint64_t projections = 0;
  std::uint64_t arrivals = 0;

  std::vector<double> density(std::size_t snapshot) const;
};

/// Runs all replicates to the horizon. Replicate m draws from
/// CounterRng(replicate_key(seed, m)), so results are bitwise reproducible.
EnsembleResult run_ensemble(const Scenario& scenario, const EnsembleOptions& options = {});

}  // namespace pedflow
