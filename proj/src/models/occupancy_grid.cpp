#include "gmf/models/occupancy_grid.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>

#include "gmf/errors.hpp"

namespace gmf {

OccupancyGrid::OccupancyGrid(double cell_size, Eigen::Vector2d origin, int width, int height)
    : cell_size_(cell_size), origin_(std::move(origin)), width_(width), height_(height) {
  if (!(cell_size_ > 0.0)) {
    throw DomainError("OccupancyGrid: cell_size must be positive");
  }
  if (width_ <= 0 || height_ <= 0) {
    throw DomainError("OccupancyGrid: raster must be non-empty");
  }
  cells_.assign(static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_), 0);
}

OccupancyGrid OccupancyGrid::from_text(std::istream& in, double cell_size, Eigen::Vector2d origin) {
  std::vector<std::string> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty() || line.front() == '#') {
      continue;
    }
    for (char c : line) {
      if (c != '0' && c != '1') {
        throw IngestError(line_no, "raster rows may only contain '0' and '1'");
      }
    }
    if (!rows.empty() && line.size() != rows.front().size()) {
      throw IngestError(line_no, "raster row length differs from the first row");
    }
    rows.push_back(line);
  }
  if (rows.empty()) {
    throw IngestError(line_no, "raster is empty");
  }
  const int height = static_cast<int>(rows.size());
  const int width = static_cast<int>(rows.front().size());
  OccupancyGrid grid(cell_size, std::move(origin), width, height);
  for (int r = 0; r < height; ++r) {
    const int iy = height - 1 - r;
    for (int ix = 0; ix < width; ++ix) {
      grid.set_occupied(ix, iy, rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(ix)] == '1');
    }
  }
  return grid;
}

OccupancyGrid OccupancyGrid::load(const std::string& path, double cell_size, Eigen::Vector2d origin) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open occupancy grid '" + path + "'");
  }
  return from_text(in, cell_size, std::move(origin));
}

bool OccupancyGrid::contains(const Eigen::Vector2d& p) const noexcept {
  const Eigen::Vector2d rel = p - origin_;
  return rel.x() >= 0.0 && rel.y() >= 0.0 && rel.x() <= width_ * cell_size_ && rel.y() <= height_ * cell_size_;
}

Eigen::Vector2i OccupancyGrid::cell_of(const Eigen::Vector2d& p) const {
  if (!contains(p)) {
    throw BoundsError("point (" + std::to_string(p.x()) + ", " + std::to_string(p.y()) + ") is outside the grid");
  }
  const Eigen::Vector2d rel = (p - origin_) / cell_size_;
  // The far edges belong to the last row/column.
  const int ix = std::min(static_cast<int>(std::floor(rel.x())), width_ - 1);
  const int iy = std::min(static_cast<int>(std::floor(rel.y())), height_ - 1);
  return {ix, iy};
}

bool OccupancyGrid::occupied(int ix, int iy) const {
  if (ix < 0 || iy < 0 || ix >= width_ || iy >= height_) {
    throw BoundsError("cell index outside the grid");
  }
  return cells_[static_cast<std::size_t>(iy) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(ix)] != 0;
}

void OccupancyGrid::set_occupied(int ix, int iy, bool value) {
  if (ix < 0 || iy < 0 || ix >= width_ || iy >= height_) {
    throw BoundsError("cell index outside the grid");
  }
  cells_[static_cast<std::size_t>(iy) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(ix)] =
      value ? 1 : 0;
}

bool grid_los(const OccupancyGrid& grid, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  const Eigen::Vector2i from = grid.cell_of(a);
  const Eigen::Vector2i to = grid.cell_of(b);
  int x = from.x();
  int y = from.y();
  const int dx = std::abs(to.x() - x);
  const int dy = -std::abs(to.y() - y);
  const int sx = x < to.x() ? 1 : -1;
  const int sy = y < to.y() ? 1 : -1;
  int err = dx + dy;
  while (true) {
    if (grid.occupied(x, y)) {
      return false;
    }
    if (x == to.x() && y == to.y()) {
      return true;
    }
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y += sy;
    }
  }
}

}  // namespace gmf
