#include "gshape/field.hpp"

#include <algorithm>
#include <cmath>

#include "gshape/error.hpp"

namespace gshape {

CellField::CellField(const Grid2D& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.cell_count()) {
    throw InvalidArgument("cell field size does not match its grid");
  }
}

double CellField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace gshape
