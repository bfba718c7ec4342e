#include "pedflow/grid.hpp"

#include <algorithm>
#include <cmath>

#include "pedflow/errors.hpp"

namespace pedflow {

namespace {

std::size_t whole_cells(double length, double h, const char* axis) {
  if (!(h > 0.0)) throw ConfigError(std::string("grid spacing d") + axis + " must be positive");
  const double n = std::round(length / h);
  if (n < 1.0 || std::abs(n * h - length) > 1e-9 * std::max(1.0, length)) {
    throw ConfigError(std::string("grid spacing d") + axis + " does not divide the window");
  }
  return static_cast<std::size_t>(n);
}

}  // namespace

Grid::Grid(const WalkableDomain& domain, double dx, double dy)
    : window_(domain.bounds()),
      nx_(whole_cells(window_.width(), dx, "x")),
      ny_(whole_cells(window_.height(), dy, "y")),
      dx_(dx),
      dy_(dy),
      mask_(nx_ * ny_, 0) {
  for (std::size_t k = 0; k < size(); ++k) {
    const Vec2 c = center(k);
    mask_[k] = std::any_of(domain.obstacles().begin(), domain.obstacles().end(),
                           [&](const Rect& o) { return o.contains(c); })
                   ? 1
                   : 0;
  }
}

std::optional<std::size_t> Grid::locate(const Vec2& p) const {
  const double fx = std::floor((p.x - window_.x_min) / dx_);
  const double fy = std::floor((p.y - window_.y_min) / dy_);
  if (!(fx >= 0.0 && fy >= 0.0)) return std::nullopt;
  const auto i = static_cast<std::size_t>(fx);
  const auto j = static_cast<std::size_t>(fy);
  if (i >= nx_ || j >= ny_) return std::nullopt;
  return index(i, j);
}

double Grid::overlap_fraction(std::size_t k, const Rect& r) const {
  const std::size_t i = k / ny_;
  const std::size_t j = k % ny_;
  const double x0 = window_.x_min + static_cast<double>(i) * dx_;
  const double y0 = window_.y_min + static_cast<double>(j) * dy_;
  const double wx = std::max(0.0, std::min(x0 + dx_, r.x_max) - std::max(x0, r.x_min));
  const double wy = std::max(0.0, std::min(y0 + dy_, r.y_max) - std::max(y0, r.y_min));
  return (wx / dx_) * (wy / dy_);
}

}  // namespace pedflow
