#include "pedflow/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <utility>

#include "pedflow/errors.hpp"

namespace pedflow {

namespace {

std::string describe(const Vec2& p) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << p.x << ", " << p.y << ")";
  return os.str();
}

bool interiors_overlap(const Rect& a, const Rect& b) {
  return a.x_min < b.x_max && b.x_min < a.x_max && a.y_min < b.y_max && b.y_min < a.y_max;
}

// Distance from an exterior point to the rectangle, and the face whose
// half-plane the point lies farthest in (0 left, 1 right, 2 bottom, 3 top).
std::pair<double, int> obstacle_distance(const Rect& r, const Vec2& p) {
  const std::array<double, 4> side{r.x_min - p.x, p.x - r.x_max, r.y_min - p.y, p.y - r.y_max};
  int face = 0;
  for (int k = 1; k < 4; ++k) {
    if (side[k] > side[face]) face = k;
  }
  const double dx = std::max({side[0], side[1], 0.0});
  const double dy = std::max({side[2], side[3], 0.0});
  return {std::hypot(dx, dy), face};
}

constexpr std::array<Vec2, 4> kIntoObstacle{Vec2{1.0, 0.0}, Vec2{-1.0, 0.0}, Vec2{0.0, 1.0},
                                            Vec2{0.0, -1.0}};

}  // namespace

WalkableDomain::WalkableDomain(Rect bounds, std::vector<Rect> obstacles, bool closed)
    : bounds_(bounds), obstacles_(std::move(obstacles)), closed_(closed) {
  if (!(bounds_.width() > 0.0) || !(bounds_.height() > 0.0)) {
    throw ConfigError("domain bounds must have positive width and height");
  }
  for (std::size_t k = 0; k < obstacles_.size(); ++k) {
    const Rect& o = obstacles_[k];
    if (!(o.width() > 0.0) || !(o.height() > 0.0)) {
      throw ConfigError("obstacle " + std::to_string(k) + " has non-positive extent");
    }
    if (o.y_min < bounds_.y_min || o.y_max > bounds_.y_max ||
        (closed_ && (o.x_min < bounds_.x_min || o.x_max > bounds_.x_max))) {
      throw ConfigError("obstacle " + std::to_string(k) + " lies outside the corridor");
    }
    for (std::size_t m = 0; m < k; ++m) {
      if (interiors_overlap(o, obstacles_[m])) {
        throw ConfigError("obstacles " + std::to_string(m) + " and " + std::to_string(k) +
                          " overlap");
      }
    }
  }
}

bool WalkableDomain::is_walkable(const Vec2& p) const {
  if (!(p.y >= bounds_.y_min && p.y <= bounds_.y_max)) return false;
  if (closed_ && !(p.x >= bounds_.x_min && p.x <= bounds_.x_max)) return false;
  if (!std::isfinite(p.x)) return false;
  return std::none_of(obstacles_.begin(), obstacles_.end(),
                      [&](const Rect& o) { return o.contains_strictly(p); });
}

BoundaryHit WalkableDomain::nearest_boundary(const Vec2& p) const {
  if (!is_walkable(p)) throw DomainError("point " + describe(p) + " is outside the walkable set");

  BoundaryHit best{p.y - bounds_.y_min, Vec2{0.0, -1.0}, 0};
  std::size_t element = 1;
  auto consider = [&](double d, Vec2 n) {
    if (d < best.distance) best = BoundaryHit{d, n, element};
    ++element;
  };
  consider(bounds_.y_max - p.y, Vec2{0.0, 1.0});
  if (closed_) {
    consider(p.x - bounds_.x_min, Vec2{-1.0, 0.0});
    consider(bounds_.x_max - p.x, Vec2{1.0, 0.0});
  }
  for (const Rect& o : obstacles_) {
    const auto [d, face] = obstacle_distance(o, p);
    consider(d, kIntoObstacle[face]);
  }
  return best;
}

Vec2 WalkableDomain::project_to_walkable(const Vec2& p) const {
  Vec2 q{p.x, std::clamp(p.y, bounds_.y_min, bounds_.y_max)};
  if (closed_) q.x = std::clamp(q.x, bounds_.x_min, bounds_.x_max);
  for (const Rect& o : obstacles_) {
    if (!o.contains_strictly(q)) continue;
    const std::array<double, 4> depth{q.x - o.x_min, o.x_max - q.x, q.y - o.y_min, o.y_max - q.y};
    const auto face = std::min_element(depth.begin(), depth.end()) - depth.begin();
    switch (face) {
      case 0: q.x = o.x_min; break;
      case 1: q.x = o.x_max; break;
      case 2: q.y = o.y_min; break;
      default: q.y = o.y_max; break;
    }
  }
  return q;
}

double comfort_blend(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  return s * s * (3.0 - 2.0 * s);
}

double distance_to_boundary(const WalkableDomain& domain, const Vec2& x) {
  return domain.nearest_boundary(x).distance;
}

Vec2 outward_normal(const WalkableDomain& domain, const Vec2& x) {
  return domain.nearest_boundary(x).normal;
}

Vec2 reflect_velocity(const WalkableDomain& domain, const ReflectionParams& params,
                      const Vec2& x, const Vec2& v) {
  const double speed = norm(v);
  if (speed == 0.0) return Vec2{};
  const BoundaryHit hit = domain.nearest_boundary(x);
  if (dot(v, hit.normal) < 0.0) return v;
  const double s = hit.distance / params.epsilon;
  if (s >= 1.0) return v;

  const Vec2 tangent = perp(hit.normal);
  const double sign = dot(v, tangent) >= 0.0 ? 1.0 : -1.0;
  const Vec2 projected = tangent * (speed * sign);
  const Vec2 blended = projected + comfort_blend(s) * (v - projected);
  return blended * (speed / norm(blended));
}

}  // namespace pedflow
