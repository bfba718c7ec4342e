#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>

#include "pedflow/grid.hpp"
#include "pedflow/vec2.hpp"

namespace pedflow {

/// Morse-type pairwise kernel
///   G(d) = -C (exp(-(|d| - r0) / la) - exp(-(|d| - r0) / lr)) d / |d|.
struct MorseKernel {
  double amplitude = 2.0;         // C
  double attraction_range = 1.0;  // la
  double repulsion_range = 0.5;   // lr
  double offset = 0.9;            // r0, zero-force distance
  friend bool operator==(const MorseKernel&, const MorseKernel&) = default;
};

struct ForceParams {
  double comfort_speed = 1.0;    // v^C, m/s
  double relaxation_time = 1.0;  // tau, s
  Vec2 destination{100.0, 0.0};  // x^D
  MorseKernel kernel;
  /// Convolution cut-off; defaults to the radius where |G| < 1e-8.
  std::optional<double> truncation_radius;

  double cutoff() const;
  friend bool operator==(const ForceParams&, const ForceParams&) = default;
};

/// Distance below which a pedestrian counts as arrived (zero direction).
inline constexpr double kArrivalTolerance = 1e-9;

Vec2 destination_direction(const ForceParams& params, const Vec2& x);
Vec2 interaction_kernel(const ForceParams& params, const Vec2& d);
/// Relaxation toward the comfort velocity, (v^C D(x) - v) / tau.
Vec2 destination_force(const ForceParams& params, const Vec2& x, const Vec2& v);

/// Total acceleration of pedestrian i: destination force plus the
/// 1/(N-1)-weighted interaction sum.
Vec2 micro_force(const ForceParams& params, std::size_t i, std::span<const Vec2> positions,
                 std::span<const Vec2> velocities);

/// All micro_force values at once; uses G(-d) = -G(d) to halve the pair work.
void micro_forces(const ForceParams& params, std::span<const Vec2> positions,
                  std::span<const Vec2> velocities, std::span<Vec2> out);

/// (v^C/tau) D(x) + sum_cells G(x - y_c) u(y_c) dx dy, by direct rectangular rule.
/// `density` holds u = u0 + u1 per cell. Throws ConfigError on shape mismatch.
Vec2 macro_mean_force(const ForceParams& params, const Grid& grid, const Vec2& x,
                      std::span<const double> density);

/// Rectangular-rule convolution G * u evaluated at every cell center at once.
///
/// Evaluates exactly the same discrete sum as macro_mean_force (self cell and
/// cells beyond the cut-off skipped) through a zero-padded FFT.
class InteractionField {
 public:
  InteractionField(const ForceParams& params, const Grid& grid);
  ~InteractionField();
  InteractionField(InteractionField&&) noexcept;
  InteractionField& operator=(InteractionField&&) noexcept;
  InteractionField(const InteractionField&) = delete;
  InteractionField& operator=(const InteractionField&) = delete;

  /// out[k] = sum_m G(center(k) - center(m)) density[m] dx dy.
  void apply(std::span<const double> density, std::span<Vec2> out);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace pedflow
