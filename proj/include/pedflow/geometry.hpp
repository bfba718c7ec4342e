#pragma once

#include <cstddef>
#include <vector>

#include "pedflow/vec2.hpp"

namespace pedflow {

/// Axis-aligned rectangle [x_min, x_max] x [y_min, y_max] in meters.
struct Rect {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  bool contains(const Vec2& p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }
  bool contains_strictly(const Vec2& p) const {
    return p.x > x_min && p.x < x_max && p.y > y_min && p.y < y_max;
  }
  bool contains(const Rect& r) const {
    return r.x_min >= x_min && r.x_max <= x_max && r.y_min >= y_min && r.y_max <= y_max;
  }
  friend bool operator==(const Rect&, const Rect&) = default;
};

/// Nearest boundary element of a walkable point.
struct BoundaryHit {
  double distance = 0.0;
  Vec2 normal;              // unit, pointing out of the walkable set
  std::size_t element = 0;  // walls first, then obstacles in declaration order
};

/// Corridor with walls along y = y_min and y = y_max and rectangular obstacles.
///
/// The x extent of `bounds` is the recording window; pedestrians may leave it.
/// A closed domain additionally has walls along x = x_min and x = x_max.
class WalkableDomain {
 public:
  WalkableDomain() = default;
  /// Throws ConfigError for degenerate bounds, obstacles outside the strip or
  /// overlapping obstacles.
  WalkableDomain(Rect bounds, std::vector<Rect> obstacles, bool closed = false);

  const Rect& bounds() const { return bounds_; }
  const std::vector<Rect>& obstacles() const { return obstacles_; }
  bool closed() const { return closed_; }

  bool is_walkable(const Vec2& p) const;
  /// Throws DomainError if `p` is not walkable.
  BoundaryHit nearest_boundary(const Vec2& p) const;
  /// Nearest walkable point; identity on walkable points.
  Vec2 project_to_walkable(const Vec2& p) const;

  friend bool operator==(const WalkableDomain&, const WalkableDomain&) = default;

 private:
  Rect bounds_;
  std::vector<Rect> obstacles_;
  bool closed_ = false;
};

struct ReflectionParams {
  double epsilon = 0.1;  // comfort-zone width, meters
  friend bool operator==(const ReflectionParams&, const ReflectionParams&) = default;
};

/// Blend function J(s) = 3s^2 - 2s^3 on [0, 1], 0 below and 1 above.
double comfort_blend(double s);

double distance_to_boundary(const WalkableDomain& domain, const Vec2& x);
Vec2 outward_normal(const WalkableDomain& domain, const Vec2& x);
inline Vec2 tangent_of(const Vec2& normal) { return perp(normal); }

/// Boundary-steered velocity V(x, v). Norm preserving; inward velocities and
/// points farther than epsilon from the boundary are returned unchanged.
Vec2 reflect_velocity(const WalkableDomain& domain, const ReflectionParams& params,
                      const Vec2& x, const Vec2& v);

}  // namespace pedflow
