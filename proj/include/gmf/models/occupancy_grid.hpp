#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gmf {

/// Boolean raster over the plane. Cell (ix, iy) covers
/// [origin.x + ix*cell, origin.x + (ix+1)*cell) x [origin.y + iy*cell, ...).
class OccupancyGrid {
 public:
  OccupancyGrid(double cell_size, Eigen::Vector2d origin, int width, int height);

  /// Text raster: one row of '0'/'1' characters per line, first line is the
  /// top row (largest y). Blank lines and lines starting with '#' are skipped.
  static OccupancyGrid from_text(std::istream& in, double cell_size, Eigen::Vector2d origin);
  static OccupancyGrid load(const std::string& path, double cell_size, Eigen::Vector2d origin);

  [[nodiscard]] int width() const noexcept { return width_; }
  [[nodiscard]] int height() const noexcept { return height_; }
  [[nodiscard]] double cell_size() const noexcept { return cell_size_; }
  [[nodiscard]] const Eigen::Vector2d& origin() const noexcept { return origin_; }
  [[nodiscard]] Eigen::Vector2d extent() const noexcept { return {width_ * cell_size_, height_ * cell_size_}; }
  [[nodiscard]] double diagonal() const noexcept { return extent().norm(); }

  [[nodiscard]] bool contains(const Eigen::Vector2d& p) const noexcept;
  /// Cell indices of a point; throws BoundsError outside the extent.
  [[nodiscard]] Eigen::Vector2i cell_of(const Eigen::Vector2d& p) const;

  [[nodiscard]] bool occupied(int ix, int iy) const;
  void set_occupied(int ix, int iy, bool value = true);

 private:
  double cell_size_;
  Eigen::Vector2d origin_;
  int width_;
  int height_;
  std::vector<std::uint8_t> cells_;
};

/// True iff no occupied cell lies on the Bresenham rasterization of a -> b.
bool grid_los(const OccupancyGrid& grid, const Eigen::Vector2d& a, const Eigen::Vector2d& b);

}  // namespace gmf
