#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "pedflow/errors.hpp"
#include "pedflow/micro_sim.hpp"
#include "pedflow/random.hpp"
#include "pedflow/scenario.hpp"
#include "support.hpp"

using namespace pedflow;

namespace {

WalkableDomain bottleneck() {
  return WalkableDomain(Rect{-4.0, 6.0, -1.5, 1.5},
                        {Rect{-1.0, 1.0, 0.5, 1.5}, Rect{-1.0, 1.0, -1.5, -0.5}});
}

MicroModel quiet_model(double stopped_rate, double walking_rate, double dt = 0.01) {
  ForceParams f;
  f.kernel.amplitude = 0.0;
  return MicroModel(WalkableDomain(Rect{-4.0, 6.0, -50.0, 50.0}, {}), ReflectionParams{}, f,
                    RateFunction::homogeneous(stopped_rate, walking_rate), dt);
}

const InitialLaw kLaw{Rect{-2.0, -1.0, -1.0, 1.0}, 0.5, 0.5};

}  // namespace

TEST_CASE("time step bound is enforced") {
  CHECK_THROWS_AS(quiet_model(150.0, 1.0, 0.01), ConfigError);
  CHECK_NOTHROW(quiet_model(100.0, 1.0, 0.01));
}

TEST_CASE("transition probabilities form a stochastic matrix") {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 10000; ++k) {
    const double l0 = 20.0 * u(gen);
    const double l1 = 20.0 * u(gen);
    const double dt = u(gen) / std::max(l0, l1);
    const TransitionMatrix p = transition_probabilities(l0, l1, dt);
    for (const auto& row : p) {
      CHECK(row[0] >= 0.0);
      CHECK(row[1] >= 0.0);
      CHECK(row[0] + row[1] == 1.0);
    }
  }
  const TransitionMatrix p = transition_probabilities(6.0, 4.0, 0.01);
  CHECK(p[1][0] == doctest::Approx(0.04));
}

TEST_CASE("initial sampling special cases") {
  const MicroModel model = quiet_model(1.0, 0.0);
  CounterRng rng(5);
  const MicroState all_stopped = sample_initial(model, InitialLaw{kLaw.region, 0.5, 1.0}, 500, rng);
  CHECK(all_stopped.stopped_count() == 500);
  for (const Vec2& v : all_stopped.velocities) CHECK(norm(v) == 0.0);

  const MicroState walking = sample_initial(model, InitialLaw{kLaw.region, 0.5, 0.0}, 500, rng);
  CHECK(walking.stopped_count() == 0);
  for (std::size_t i = 0; i < walking.size(); ++i) {
    const Vec2 expected = destination_direction(model.forces(), walking.positions[i]);
    CHECK(walking.velocities[i].x == doctest::Approx(expected.x));
    CHECK(walking.velocities[i].y == doctest::Approx(expected.y));
    CHECK(kLaw.region.contains(walking.positions[i]));
  }
}

TEST_CASE("initial stopped fraction lies in the binomial interval") {
  const MicroModel model = quiet_model(1.0, 1.0);
  CounterRng rng(replicate_key(2024, 0));
  const MicroState s = sample_initial(model, kLaw, 10000, rng);
  const double fraction = static_cast<double>(s.stopped_count()) / 10000.0;
  CHECK(fraction >= 0.485);
  CHECK(fraction <= 0.515);
}

TEST_CASE("initial velocities use the closure formula with a 1/N weight") {
  ForceParams f;
  const RateFunction rates = RateFunction::homogeneous(2.0, 3.0);
  const MicroModel model(WalkableDomain(Rect{-4, 6, -1.5, 1.5}, {}), ReflectionParams{}, f, rates,
                         0.01);
  CounterRng rng(8);
  const MicroState s = sample_initial(model, InitialLaw{kLaw.region, 0.5, 0.3}, 30, rng);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.statuses[i] == Status::Stopped) {
      CHECK(norm(s.velocities[i]) == 0.0);
      continue;
    }
    Vec2 sum;
    for (std::size_t j = 0; j < s.size(); ++j) sum += interaction_kernel(f, s.positions[i] - s.positions[j]);
    const Vec2 expected = (1.0 / (1.0 + 3.0)) * (destination_direction(f, s.positions[i]) + sum / 30.0);
    CHECK(s.velocities[i].x == doctest::Approx(expected.x).epsilon(1e-12));
    CHECK(s.velocities[i].y == doctest::Approx(expected.y).epsilon(1e-12));
  }
}

TEST_CASE("stopped pedestrians keep position and zero velocity") {
  const MicroModel model = quiet_model(0.0, 0.0);
  MicroState s;
  s.positions = {{0.0, 0.0}, {1.0, 0.5}};
  s.velocities = {{0.0, 0.0}, {0.3, 0.1}};
  s.statuses = {Status::Stopped, Status::Walking};
  CounterRng rng(1);
  const MicroState n = step(model, s, rng);
  CHECK(n.positions[0].x == 0.0);
  CHECK(n.positions[0].y == 0.0);
  CHECK(norm(n.velocities[0]) == 0.0);
  CHECK(n.positions[1].x == doctest::Approx(1.003));
  CHECK(n.statuses[1] == Status::Walking);
  CHECK(n.step == 1);
  CHECK(n.time == doctest::Approx(0.01));
}

TEST_CASE("a single step is explicit Euler on the old state") {
  ForceParams f;
  const MicroModel model(WalkableDomain(Rect{-4, 6, -10, 10}, {}), ReflectionParams{}, f,
                         RateFunction::homogeneous(0.0, 0.0), 0.02);
  MicroState s;
  s.positions = {{0.0, 0.0}, {0.5, 0.2}, {-0.4, 0.9}};
  s.velocities = {{0.1, 0.0}, {0.0, 0.2}, {0.5, -0.5}};
  s.statuses.assign(3, Status::Walking);
  CounterRng rng(3);
  const MicroState n = step(model, s, rng);
  for (std::size_t i = 0; i < 3; ++i) {
    const Vec2 a = micro_force(f, i, s.positions, s.velocities);
    CHECK(n.positions[i].x == doctest::Approx(s.positions[i].x + 0.02 * s.velocities[i].x));
    CHECK(n.positions[i].y == doctest::Approx(s.positions[i].y + 0.02 * s.velocities[i].y));
    CHECK(n.velocities[i].x == doctest::Approx(s.velocities[i].x + 0.02 * a.x));
    CHECK(n.velocities[i].y == doctest::Approx(s.velocities[i].y + 0.02 * a.y));
  }
}

TEST_CASE("one-step flip frequency from walking at rate 4") {
  const MicroModel model = quiet_model(0.0, 4.0);
  const std::size_t n = 100000;
  MicroState s;
  s.positions.assign(n, Vec2{0.0, 0.0});
  s.velocities.assign(n, Vec2{0.0, 0.0});
  s.statuses.assign(n, Status::Walking);
  CounterRng rng(replicate_key(77, 0));
  const MicroState next = step(model, s, rng);
  const double freq = static_cast<double>(next.stopped_count()) / static_cast<double>(n);
  const double se = std::sqrt(0.04 * 0.96 / static_cast<double>(n));
  CHECK(std::abs(freq - 0.04) <= 3.0 * se);
}

TEST_CASE("consistency and containment along interacting runs in the bottleneck") {
  ForceParams f;
  f.relaxation_time = 0.2;
  RateFunction rates;
  rates.stopped = RateMap{10.0, {RateRegion{SlabX{-1.0, 1.0}, 1.0}}};
  rates.walking = RateMap{0.01, {RateRegion{SlabX{-1.0, 1.0}, 1.0}}};
  const MicroModel model(bottleneck(), ReflectionParams{}, f, rates, 0.01);
  CounterRng rng(replicate_key(5, 5));
  MicroState s = sample_initial(model, InitialLaw{Rect{-2.5, -1.0, -0.5, 0.5}, 2.0 / 3.0, 0.3}, 50, rng);
  for (int k = 0; k < 600; ++k) {
    const MicroState n = step(model, s, rng);
    for (std::size_t i = 0; i < n.size(); ++i) {
      REQUIRE(model.domain().is_walkable(n.positions[i]));
      if (n.statuses[i] == Status::Stopped) REQUIRE(norm(n.velocities[i]) == 0.0);
      if (s.statuses[i] == Status::Stopped) {
        REQUIRE(n.positions[i].x == s.positions[i].x);
        REQUIRE(n.positions[i].y == s.positions[i].y);
      }
    }
    s = n;
  }
}

TEST_CASE("empirical density examples") {
  const Grid grid(WalkableDomain(Rect{0.0, 1.0, 0.0, 1.0}, {}), 0.25, 0.25);
  std::vector<std::vector<Vec2>> reps(3, std::vector<Vec2>(4, Vec2{0.3, 0.6}));
  const DensityEstimate one = empirical_density(reps, grid);
  const std::size_t k = *grid.locate({0.3, 0.6});
  for (std::size_t c = 0; c < grid.size(); ++c) {
    CHECK(one.density[c] == (c == k ? 16.0 : 0.0));
  }

  reps[1][2] = {5.0, 0.5};
  reps[2][0] = {0.5, -0.1};
  const DensityEstimate some = empirical_density(reps, grid);
  double mass = 0.0;
  for (double d : some.density) mass += d * grid.cell_area();
  CHECK(mass == doctest::Approx(10.0 / 12.0));
  CHECK(some.outside == 2);

  // Half-open cells: a point on an interior edge belongs to the upper cell.
  std::vector<std::vector<Vec2>> edge(1, std::vector<Vec2>{Vec2{0.25, 0.5}});
  const DensityEstimate e = empirical_density(edge, grid);
  CHECK(e.density[grid.index(1, 2)] == 16.0);

  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t n = 1000, m = 40;
  std::vector<std::vector<Vec2>> cloud(m, std::vector<Vec2>(n));
  for (auto& r : cloud) {
    for (auto& p : r) p = {u(gen), u(gen)};
  }
  const DensityEstimate d = empirical_density(cloud, grid);
  const double se = std::sqrt((1.0 / 16.0) * (15.0 / 16.0) / (n * m)) * 16.0;
  for (double v : d.density) CHECK(std::abs(v - 1.0) <= 4.0 * se);
}

TEST_CASE("ensembles are reproducible and worker-count independent") {
  Scenario s = test::box_scenario();
  s.domain = WalkableDomain(Rect{-2.0, 2.0, -1.0, 1.0}, {});
  s.micro.replicates = 5;
  const EnsembleResult a = run_ensemble(s, {1});
  const EnsembleResult b = run_ensemble(s, {1});
  const EnsembleResult c = run_ensemble(s, {3});
  CHECK(a.counts == b.counts);
  CHECK(a.counts == c.counts);
  CHECK(a.stopped_fraction == c.stopped_fraction);
  CHECK(a.crossing == c.crossing);
  s.seed += 1;
  const EnsembleResult d = run_ensemble(s, {1});
  CHECK(a.counts != d.counts);

  for (std::size_t k = 0; k < a.snapshot_times.size(); ++k) {
    double mass = 0.0;
    for (double v : a.density(k)) {
      CHECK(v >= 0.0);
      mass += v * a.grid.cell_area();
    }
    CHECK(mass <= 1.0 + 1e-12);
  }
}

TEST_CASE("frozen crowd never moves") {
  Scenario s = test::box_scenario(0.0, 3.0);
  s.initial.p_stop = 1.0;
  s.micro.replicates = 3;
  const EnsembleResult r = run_ensemble(s);
  for (std::size_t k = 1; k < r.counts.size(); ++k) CHECK(r.counts[k] == r.counts[0]);
  for (const auto& rep : r.stopped_fraction) {
    for (double f : rep) CHECK(f == 1.0);
  }
}

TEST_CASE("crossing times record the first step with everyone past the cut") {
  Scenario s = test::box_scenario(0.0, 0.0);
  s.domain = WalkableDomain(Rect{-2.0, 2.0, -1.0, 1.0}, {});
  s.forces.kernel.amplitude = 0.0;
  s.initial.p_stop = 0.0;
  s.cuts = {-1.4, 0.0};
  s.horizon = 2.0;
  s.snapshots = {0.0, 2.0};
  s.micro.replicates = 2;
  const EnsembleResult r = run_ensemble(s);
  for (const auto& rep : r.crossing) {
    REQUIRE(rep[1].has_value());
    // Everyone walks at speed 1 from x >= -1.5, so the last crosses 0 near t = 1.5.
    CHECK(*rep[1] >= 1.4);
    CHECK(*rep[1] <= 1.5);
    CHECK(*rep[0] < *rep[1]);
  }
}
