#include "pedflow/rates.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pedflow/errors.hpp"

namespace pedflow {

namespace {

struct Contains {
  const Vec2& x;
  bool operator()(const Disc& d) const { return norm(x - d.center) <= d.radius; }
  bool operator()(const SlabX& s) const { return x.x >= s.x_min && x.x <= s.x_max; }
  bool operator()(const Rect& r) const { return r.contains(x); }
};

}  // namespace

bool region_contains(const RegionShape& shape, const Vec2& x) {
  return std::visit(Contains{x}, shape);
}

double RateMap::at(const Vec2& x) const {
  for (const RateRegion& r : regions) {
    if (region_contains(r.shape, x)) return r.value;
  }
  return default_value;
}

double RateMap::sup() const {
  double s = default_value;
  for (const RateRegion& r : regions) s = std::max(s, r.value);
  return s;
}

void RateMap::validate(const char* name) const {
  auto check = [&](double v) {
    if (!std::isfinite(v) || v < 0.0) {
      throw ConfigError(std::string("rate '") + name + "' must be finite and >= 0");
    }
  };
  check(default_value);
  for (const RateRegion& r : regions) check(r.value);
}

double RateFunction::sup_bound() const { return std::max(stopped.sup(), walking.sup()); }

double RateFunction::sup_total() const { return stopped.sup() + walking.sup(); }

void RateFunction::validate() const {
  stopped.validate("stopped");
  walking.validate("walking");
}

RateFunction RateFunction::homogeneous(double stopped_rate, double walking_rate) {
  return RateFunction{RateMap{stopped_rate, {}}, RateMap{walking_rate, {}}};
}

}  // namespace pedflow
