#pragma once

#include <cstddef>
#include <optional>

namespace gshape {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
double norm(Vec2 a);

struct NodeIndex {
  int i = 0;
  int j = 0;

  friend bool operator==(const NodeIndex&, const NodeIndex&) = default;
};

/// Uniform square-cell grid centred on the origin.
///
/// Cells are indexed (i, j) with i along x. Cell (i, j) spans
/// [x_min + i h, x_min + (i+1) h] and likewise in y. Grid nodes are the
/// cell corners, (nx+1) x (ny+1) of them; dipoles and point sources live
/// on nodes, level-set and permittivity samples live at cell centres.
class Grid2D {
 public:
  Grid2D() = default;

  /// Grid with the given cell counts. Throws InvalidArgument if either
  /// count is below 8 or the resolution is below 4.
  static Grid2D from_cells(int nx, int ny, int resolution);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int resolution() const { return resolution_; }
  double h() const { return 1.0 / resolution_; }
  double extent_x() const { return nx_ * h(); }
  double extent_y() const { return ny_ * h(); }
  double x_min() const { return -0.5 * extent_x(); }
  double y_min() const { return -0.5 * extent_y(); }
  std::size_t cell_count() const { return static_cast<std::size_t>(nx_) * ny_; }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx_ + i; }

  Vec2 cell_center(int i, int j) const;
  Vec2 node(int i, int j) const;

  bool contains(Vec2 p) const;

  /// Node that coincides with p to within 1e-6 h, if any.
  std::optional<NodeIndex> node_at(Vec2 p) const;

  friend bool operator==(const Grid2D&, const Grid2D&) = default;

 private:
  Grid2D(int nx, int ny, int resolution) : nx_(nx), ny_(ny), resolution_(resolution) {}

  int nx_ = 0;
  int ny_ = 0;
  int resolution_ = 0;
};

/// nx = round(extent_x * resolution), likewise ny.
Grid2D make_grid(double extent_x, double extent_y, int resolution);

// Internal units: lengths in um, c = 1, frequencies in c/um.
namespace units {
double frequency(double wavelength);
double angular_frequency(double wavelength);
}  // namespace units

}  // namespace gshape
