#include "gshape/grid.hpp"

#include <cmath>
#include <numbers>

#include "gshape/error.hpp"

namespace gshape {

double norm(Vec2 a) { return std::hypot(a.x, a.y); }

Grid2D Grid2D::from_cells(int nx, int ny, int resolution) {
  if (resolution < 4) {
    throw InvalidArgument("grid resolution must be at least 4 cells/um");
  }
  if (nx < 8 || ny < 8) {
    throw InvalidArgument("grid needs at least 8 cells along each axis");
  }
  return Grid2D(nx, ny, resolution);
}

Vec2 Grid2D::cell_center(int i, int j) const {
  return {x_min() + (i + 0.5) * h(), y_min() + (j + 0.5) * h()};
}

Vec2 Grid2D::node(int i, int j) const { return {x_min() + i * h(), y_min() + j * h()}; }

bool Grid2D::contains(Vec2 p) const {
  return p.x >= x_min() && p.x <= -x_min() && p.y >= y_min() && p.y <= -y_min();
}

std::optional<NodeIndex> Grid2D::node_at(Vec2 p) const {
  const double fi = (p.x - x_min()) / h();
  const double fj = (p.y - y_min()) / h();
  const double ri = std::round(fi);
  const double rj = std::round(fj);
  if (std::abs(fi - ri) > 1e-6 || std::abs(fj - rj) > 1e-6) return std::nullopt;
  if (ri < 0 || rj < 0 || ri > nx_ || rj > ny_) return std::nullopt;
  return NodeIndex{static_cast<int>(ri), static_cast<int>(rj)};
}

Grid2D make_grid(double extent_x, double extent_y, int resolution) {
  if (!(extent_x > 0.0) || !(extent_y > 0.0)) {
    throw InvalidArgument("grid extents must be positive");
  }
  if (resolution < 4) {
    throw InvalidArgument("grid resolution must be at least 4 cells/um");
  }
  const auto nx = static_cast<int>(std::lround(extent_x * resolution));
  const auto ny = static_cast<int>(std::lround(extent_y * resolution));
  return Grid2D::from_cells(nx, ny, resolution);
}

namespace units {

double frequency(double wavelength) {
  if (!(wavelength > 0.0)) throw InvalidArgument("wavelength must be positive");
  return 1.0 / wavelength;
}

double angular_frequency(double wavelength) {
  return 2.0 * std::numbers::pi * frequency(wavelength);
}

}  // namespace units
}  // namespace gshape
