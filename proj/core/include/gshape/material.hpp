#pragma once

#include "gshape/field.hpp"

namespace gshape {

MaterialMap uniform_material(const Grid2D& grid, double eps);

/// Rasterizes a level set into a permittivity map.
///
/// Cells with phi < -h/2 are filled with eps_in, cells with phi > h/2 with
/// eps_out, and cells in between blend linearly with the fill fraction
/// w = clamp(1/2 - phi/h, 0, 1).
MaterialMap rasterize(const LevelSetField& phi, double eps_in, double eps_out);

/// Same as above, checking that phi lives on `target`.
MaterialMap rasterize(const LevelSetField& phi, const Grid2D& target, double eps_in,
                      double eps_out);

/// Sum of (eps - eps_ref) h^2 over all cells.
double excess_permittivity(const MaterialMap& material, double eps_ref);

}  // namespace gshape
