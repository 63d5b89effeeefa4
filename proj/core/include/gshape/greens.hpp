#pragma once

#include <array>
#include <optional>

#include "gshape/fdtd.hpp"

namespace gshape {

/// In-plane 2x2 block, indexed [row][col] = G_{row,col}.
using Mat2 = std::array<std::array<Complex, 2>, 2>;

struct GreensSettings {
  SolverSettings solver;
  double width_periods = 10.0;  // source width w = width_periods / f
};

/// Field radiated by a (possibly complex) in-plane unit point current,
/// field(r) = G(r, source, omega) . moment.
struct GreensColumn {
  Vec2 source;
  CVec2 moment{Complex{1.0}, Complex{0.0}};
  double omega = 0.0;
  ComplexFieldMap field;
};

/// Runs one simulation with a Cartesian source and deconvolves the source
/// spectrum: field / (i omega j(omega)).
GreensColumn greens_column(const MaterialMap& material, Vec2 source, Axis axis, double omega,
                           const GreensSettings& settings = {});

/// a * x_column + b * y_column for columns sharing a source point.
GreensColumn combine(const GreensColumn& x_column, const GreensColumn& y_column, Complex a,
                     Complex b);

/// Cartesian columns of one source point; an axis is simulated only when the
/// requested moment has a component along it.
struct SourceColumns {
  std::optional<GreensColumn> x;
  std::optional<GreensColumn> y;

  /// Column for the moment these runs were made for (or any moment whose
  /// components lie on simulated axes).
  GreensColumn combined(const CVec2& moment) const;

  /// G(r, source) with zeros in the columns that were not simulated.
  Mat2 tensor(Vec2 r) const;
};

SourceColumns greens_columns(const MaterialMap& material, Vec2 source, const CVec2& moment,
                             double omega, const GreensSettings& settings = {});

/// Column for a complex moment, assembled from the one or two Cartesian runs
/// it needs.
GreensColumn greens_column(const MaterialMap& material, Vec2 source, const CVec2& moment,
                           double omega, const GreensSettings& settings = {});

/// (G . moment)(r) at a grid node inside the physical domain. Throws
/// InvalidArgument when r is off-node, on the domain edge or at the source.
CVec2 sample(const GreensColumn& column, Vec2 r);

/// Tensor G(r, s) from the x- and y-polarized columns of a source at s.
Mat2 tensor_at(const GreensColumn& x_column, const GreensColumn& y_column, Vec2 r);

/// Outgoing free-space Green's tensor (in-plane block) of a homogeneous
/// medium with permittivity eps_background:
///   G = (I + grad grad / k^2) (i/4) H0(k rho),   k = sqrt(eps) omega.
/// Longitudinal part (i/4) H1(k rho)/(k rho), transverse part
/// (i/4)[H0(k rho) - H1(k rho)/(k rho)].
Mat2 analytic_freespace_g2d(Vec2 r, Vec2 s, double omega, double eps_background = 1.0);

/// max_ij |G_ij(r,s) - G_ji(s,r)| / max_ij |G_ij(r,s)| from four simulations.
double reciprocity_defect(const MaterialMap& material, Vec2 r, Vec2 s, double omega,
                          const GreensSettings& settings = {});

}  // namespace gshape
