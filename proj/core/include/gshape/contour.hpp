#pragma once

#include <cstddef>
#include <vector>

#include "gshape/field.hpp"

namespace gshape {

struct Segment {
  Vec2 a;
  Vec2 b;
};

/// Marching-squares extraction of the phi = 0 isoline on the lattice of cell
/// centres. Saddles are resolved with the square's mean value.
std::vector<Segment> zero_contour(const LevelSetField& phi);

/// Segments chained into polylines (closed ones repeat their first point).
std::vector<std::vector<Vec2>> zero_polylines(const LevelSetField& phi);

/// Total contour length.
double perimeter(const LevelSetField& phi);

/// Material area from the same fill fraction used by rasterize().
double enclosed_area(const LevelSetField& phi);

/// Line integral over the zero contour of a cell field, bilinearly
/// interpolated at each segment midpoint.
double contour_integral(const LevelSetField& phi, const CellField& f);

/// Sub-cell position of a sign change along one lattice edge between two
/// adjacent cell centres.
struct Crossing {
  std::size_t edge = 0;  // 2*index(i,j) for the +x edge, 2*index(i,j)+1 for the +y edge
  double position = 0.0; // coordinate along the edge's axis, in um
};

/// All sign changes along lattice edges, ordered by edge id.
std::vector<Crossing> grid_crossings(const LevelSetField& phi);

}  // namespace gshape
