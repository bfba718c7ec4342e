#pragma once

#include <variant>
#include <vector>

#include "pedflow/geometry.hpp"
#include "pedflow/vec2.hpp"

namespace pedflow {

/// Pedestrian status: stopped (0) or walking (1).
enum class Status : int { Stopped = 0, Walking = 1 };

constexpr Status flipped(Status s) {
  return s == Status::Walking ? Status::Stopped : Status::Walking;
}

/// Closed disc ||x - center|| <= radius.
struct Disc {
  Vec2 center;
  double radius = 0.0;
  friend bool operator==(const Disc&, const Disc&) = default;
};

/// Vertical slab x_min <= x^(1) <= x_max.
struct SlabX {
  double x_min = 0.0;
  double x_max = 0.0;
  friend bool operator==(const SlabX&, const SlabX&) = default;
};

using RegionShape = std::variant<Disc, SlabX, Rect>;

bool region_contains(const RegionShape& shape, const Vec2& x);

struct RateRegion {
  RegionShape shape;
  double value = 0.0;  // 1/s
  friend bool operator==(const RateRegion&, const RateRegion&) = default;
};

/// Piecewise-constant spatial rate: first matching region wins, else the default.
struct RateMap {
  double default_value = 0.0;
  std::vector<RateRegion> regions;

  double at(const Vec2& x) const;
  double sup() const;
  /// Throws ConfigError for negative or non-finite values.
  void validate(const char* name) const;
  friend bool operator==(const RateMap&, const RateMap&) = default;
};

/// Switching rate lambda(r, x): `stopped` is the 0 -> 1 rate, `walking` the 1 -> 0 rate.
struct RateFunction {
  RateMap stopped;
  RateMap walking;

  double operator()(Status r, const Vec2& x) const {
    return r == Status::Walking ? walking.at(x) : stopped.at(x);
  }
  /// Uniform bound ||lambda||_inf over both statuses.
  double sup_bound() const;
  /// Largest lambda(0, x) + lambda(1, x) over all x (upper bound).
  double sup_total() const;
  void validate() const;

  static RateFunction homogeneous(double stopped_rate, double walking_rate);
  friend bool operator==(const RateFunction&, const RateFunction&) = default;
};

}  // namespace pedflow
