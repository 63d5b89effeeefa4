#include "gshape/material.hpp"

#include <algorithm>

#include "gshape/error.hpp"

namespace gshape {

MaterialMap uniform_material(const Grid2D& grid, double eps) {
  if (!(eps >= 1.0)) throw InvalidArgument("permittivity must be >= 1");
  return MaterialMap(grid, eps);
}

MaterialMap rasterize(const LevelSetField& phi, double eps_in, double eps_out) {
  if (!(eps_in >= 1.0) || !(eps_out >= 1.0)) {
    throw InvalidArgument("permittivities must be real and >= 1");
  }
  const Grid2D& grid = phi.grid();
  const double h = grid.h();
  MaterialMap out(grid);
  auto src = phi.values();
  auto dst = out.values();
  for (std::size_t k = 0; k < src.size(); ++k) {
    const double w = std::clamp(0.5 - src[k] / h, 0.0, 1.0);
    dst[k] = w * eps_in + (1.0 - w) * eps_out;
  }
  return out;
}

MaterialMap rasterize(const LevelSetField& phi, const Grid2D& target, double eps_in,
                      double eps_out) {
  if (!(phi.grid() == target)) {
    throw InvalidArgument("level set grid does not match the target grid");
  }
  return rasterize(phi, eps_in, eps_out);
}

double excess_permittivity(const MaterialMap& material, double eps_ref) {
  const double area = material.grid().h() * material.grid().h();
  double sum = 0.0;
  for (double e : material.values()) sum += (e - eps_ref) * area;
  return sum;
}

}  // namespace gshape
