#include "pedflow/forces.hpp"

#include <cmath>

#include "pedflow/errors.hpp"

namespace pedflow {

double ForceParams::cutoff() const {
  if (truncation_radius) return *truncation_radius;
  if (kernel.amplitude <= 0.0) return 0.0;
  return kernel.offset + kernel.attraction_range * std::log(kernel.amplitude / 1e-8);
}

Vec2 destination_direction(const ForceParams& params, const Vec2& x) {
  const Vec2 d = params.destination - x;
  const double len = norm(d);
  if (len < kArrivalTolerance) return Vec2{};
  return d / len;
}

Vec2 interaction_kernel(const ForceParams& params, const Vec2& d) {
  const double r = norm(d);
  if (r == 0.0) return Vec2{};
  const MorseKernel& k = params.kernel;
  const double s = r - k.offset;
  const double magnitude =
      -k.amplitude * (std::exp(-s / k.attraction_range) - std::exp(-s / k.repulsion_range));
  return d * (magnitude / r);
}

Vec2 destination_force(const ForceParams& params, const Vec2& x, const Vec2& v) {
  return (params.comfort_speed * destination_direction(params, x) - v) / params.relaxation_time;
}

Vec2 micro_force(const ForceParams& params, std::size_t i, std::span<const Vec2> positions,
                 std::span<const Vec2> velocities) {
  const std::size_t n = positions.size();
  Vec2 force = destination_force(params, positions[i], velocities[i]);
  if (n < 2 || params.kernel.amplitude == 0.0) return force;
  Vec2 sum;
  for (std::size_t j = 0; j < n; ++j) {
    if (j != i) sum += interaction_kernel(params, positions[i] - positions[j]);
  }
  return force + sum / static_cast<double>(n - 1);
}

void micro_forces(const ForceParams& params, std::span<const Vec2> positions,
                  std::span<const Vec2> velocities, std::span<Vec2> out) {
  const std::size_t n = positions.size();
  for (std::size_t i = 0; i < n; ++i) out[i] = Vec2{};
  if (n >= 2 && params.kernel.amplitude != 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const Vec2 g = interaction_kernel(params, positions[i] - positions[j]);
        out[i] += g;
        out[j] -= g;
      }
    }
    const double weight = 1.0 / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] *= weight;
  }
  for (std::size_t i = 0; i < n; ++i) {
    out[i] += destination_force(params, positions[i], velocities[i]);
  }
}

Vec2 macro_mean_force(const ForceParams& params, const Grid& grid, const Vec2& x,
                      std::span<const double> density) {
  if (density.size() != grid.size()) {
    throw ConfigError("density field size does not match the grid");
  }
  Vec2 conv;
  const double cutoff = params.cutoff();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (density[k] == 0.0) continue;
    const Vec2 d = x - grid.center(k);
    const double r = norm(d);
    if (r < 1e-9 || r > cutoff) continue;
    conv += interaction_kernel(params, d) * density[k];
  }
  return (params.comfort_speed / params.relaxation_time) * destination_direction(params, x) +
         conv * grid.cell_area();
}

}  // namespace pedflow
