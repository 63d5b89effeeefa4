#pragma once

#include <filesystem>
#include <span>
#include <variant>

#include "gshape/field.hpp"

namespace gshape {

struct Cylinder {
  Vec2 center;
  double radius = 1.0;
};

/// Axis-aligned vertical bar.
struct Wall {
  Vec2 center;
  double width = 0.5;
  double height = 4.0;
};

/// Axis-aligned horizontal slab.
struct Waveguide {
  Vec2 center{0.0, -1.0};
  double length = 6.0;
  double thickness = 0.5;
};

/// Two horizontal bars mirrored about the line y = center.y, inner faces
/// `gap` apart.
struct TwoBars {
  Vec2 center;
  double length = 5.0;
  double thickness = 0.5;
  double gap = 2.0;
};

/// Any precomputed signed-distance raster.
struct CustomShape {
  LevelSetField phi;
  std::filesystem::path origin;  // file it was loaded from, if any
};

using ShapeSpec = std::variant<Cylinder, Wall, Waveguide, TwoBars, CustomShape>;

/// Signed distance of the shape sampled at cell centres (unions via min).
/// Throws InvalidArgument for an empty shape or one touching the domain edge.
LevelSetField init_shape(const ShapeSpec& spec, const Grid2D& grid);

struct AdvectOptions {
  bool eno2 = false;  // second-order ENO differences with Heun time stepping
  double cfl = 0.5;   // substep dt <= cfl * h / max|v|
};

/// Evolves d(phi)/dt + v |grad phi| = 0 for `duration` with a Godunov upwind
/// scheme and zero-gradient edges. Positive v moves the boundary outward.
LevelSetField advect(const LevelSetField& phi, const VelocityField& v, double duration,
                     const AdvectOptions& options = {});

struct ReinitOptions {
  double band = 3.5;  // cells within band*h of the interface get sub-cell closest points
};

/// Rebuilds phi as the signed distance to its own zero set.
///
/// The zero set is traced with marching squares; cells in the band are then
/// projected onto the zero set of a cubic-convolution interpolant of phi, so
/// an exact distance function is reproduced to O(h^3).
LevelSetField reinitialize(const LevelSetField& phi, const ReinitOptions& options = {});

/// kappa = div(grad phi / |grad phi|) by central differences, regularized
/// with |grad phi|^2 + 1e-16 in the denominator.
CellField curvature(const LevelSetField& phi);

struct CurvatureConstraint {
  enum class Mode { localized, thresholded };
  double tau = 1.0;
  double sigma = 0.01;  // um^2
  Mode mode = Mode::localized;
  double kappa0 = 0.0;  // 1/um, thresholded mode only
};

/// v = -tau * b(kappa) * exp(-phi^2 / sigma), with b(kappa) = kappa in
/// localized mode and b(kappa) = kappa for |kappa| > kappa0, else 0, in
/// thresholded mode.
VelocityField constraint_velocity(const LevelSetField& phi, const CurvatureConstraint& c);

/// Zeroes every cell within exclusion_radius of a dipole, then divides by the
/// largest remaining |v| so max |v| == 1. Throws StalledError if nothing is left.
VelocityField normalize_and_mask(const CellField& v_raw, std::span<const Vec2> dipoles,
                                 double exclusion_radius);

/// Rescales v so the largest |v| on interface cells (cells with a sign change
/// to a face neighbour) is 1, clamping elsewhere to [-1, 1].
VelocityField normalize_on_interface(const VelocityField& v, const LevelSetField& phi);

}  // namespace gshape
