#pragma once

#include <span>
#include <vector>

#include "gshape/grid.hpp"

namespace gshape {

/// Real scalar sampled at every cell centre of a Grid2D.
class CellField {
 public:
  CellField() = default;
  explicit CellField(const Grid2D& grid, double fill = 0.0)
      : grid_(grid), values_(grid.cell_count(), fill) {}
  CellField(const Grid2D& grid, std::vector<double> values);

  const Grid2D& grid() const { return grid_; }
  double& operator()(int i, int j) { return values_[grid_.index(i, j)]; }
  double operator()(int i, int j) const { return values_[grid_.index(i, j)]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  double max_abs() const;

 private:
  Grid2D grid_;
  std::vector<double> values_;
};

/// Level-set function: negative inside material, positive outside.
struct LevelSetField : CellField {
  using CellField::CellField;
};

/// Boundary-normal speed; positive values grow the material region.
struct VelocityField : CellField {
  using CellField::CellField;
};

/// Relative permittivity per cell.
struct MaterialMap : CellField {
  using CellField::CellField;
};

}  // namespace gshape
