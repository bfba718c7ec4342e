#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "pedflow/geometry.hpp"
#include "pedflow/vec2.hpp"

namespace pedflow {

/// Uniform cell-centered grid over the recording window.
///
/// Cell (i, j) covers [x_min + i dx, x_min + (i+1) dx) x [y_min + j dy, y_min + (j+1) dy)
/// and is stored at index i * ny + j. Cells whose center lies inside an
/// obstacle are masked.
class Grid {
 public:
  Grid() = default;
  /// Throws ConfigError unless dx, dy > 0 divide the window into whole cells.
  Grid(const WalkableDomain& domain, double dx, double dy);

  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  std::size_t size() const { return nx_ * ny_; }
  double dx() const { return dx_; }
  double dy() const { return dy_; }
  double cell_area() const { return dx_ * dy_; }
  const Rect& window() const { return window_; }

  std::size_t index(std::size_t i, std::size_t j) const { return i * ny_ + j; }
  Vec2 center(std::size_t i, std::size_t j) const {
    return {window_.x_min + (static_cast<double>(i) + 0.5) * dx_,
            window_.y_min + (static_cast<double>(j) + 0.5) * dy_};
  }
  Vec2 center(std::size_t k) const { return center(k / ny_, k % ny_); }
  bool masked(std::size_t k) const { return mask_[k] != 0; }
  bool masked(std::size_t i, std::size_t j) const { return masked(index(i, j)); }
  /// Half-open cell lookup; nullopt outside the window.
  std::optional<std::size_t> locate(const Vec2& p) const;
  /// Fraction of cell k covered by rectangle r.
  double overlap_fraction(std::size_t k, const Rect& r) const;

  bool same_shape(const Grid& o) const {
    return nx_ == o.nx_ && ny_ == o.ny_ && dx_ == o.dx_ && dy_ == o.dy_ && window_ == o.window_;
  }

 private:
  Rect window_;
  std::size_t nx_ = 0;
  std::size_t ny_ = 0;
  double dx_ = 0.0;
  double dy_ = 0.0;
  std::vector<std::uint8_t> mask_;
};

}  // namespace pedflow
