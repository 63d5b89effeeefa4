#include "gshape/merit.hpp"

#include <cmath>

#include "gshape/contour.hpp"
#include "gshape/error.hpp"

namespace gshape {
namespace {

Complex transfer_amplitude(const Mat2& g, const DipoleSpec& acceptor, const DipoleSpec& donor) {
  Complex a{0.0};
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) a += std::conj(acceptor.moment[r]) * g[r][c] * donor.moment[c];
  }
  return a;
}

}  // namespace

DipoleSpec DipoleSpec::make(Vec2 position, CVec2 moment) {
  const double n = std::sqrt(std::norm(moment[0]) + std::norm(moment[1]));
  if (!(n > 0.0) || !std::isfinite(n)) throw InvalidArgument("dipole moment must be nonzero");
  return {position, {moment[0] / n, moment[1] / n}};
}

double ret_rate(const Mat2& g_ad, const DipoleSpec& acceptor, const DipoleSpec& donor) {
  return std::norm(transfer_amplitude(g_ad, acceptor, donor));
}

double purcell_q(double geometry_gamma, double freespace_gamma) {
  if (!(freespace_gamma > 0.0)) throw InvalidArgument("free-space rate must be positive");
  return geometry_gamma / freespace_gamma;
}

CellField velocity_field_ret(const GreensColumn& acceptor_column,
                             const GreensColumn& donor_column, const Mat2& g_ad,
                             const DipoleSpec& acceptor, const DipoleSpec& donor, double omega) {
  if (acceptor_column.omega != omega || donor_column.omega != omega) {
    throw InvalidArgument("Green's columns were computed at a different frequency");
  }
  const Grid2D& g = donor_column.field.grid();
  if (!(acceptor_column.field.grid() == g)) throw InvalidArgument("column grids differ");

  const Complex p = std::conj(transfer_amplitude(g_ad, acceptor, donor));
  CellField v(g);
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const Complex dot = ComplexFieldMap::cell_dot(acceptor_column.field, donor_column.field, i, j);
      v(i, j) = (p * dot).real();
    }
  }
  return v;
}

double predicted_gain(const VelocityField& v, const LevelSetField& phi, double step) {
  if (!(v.grid() == phi.grid())) throw InvalidArgument("velocity and level set grids differ");
  CellField squared(v.grid());
  auto src = v.values();
  auto dst = squared.values();
  for (std::size_t k = 0; k < src.size(); ++k) dst[k] = src[k] * src[k];
  return step * contour_integral(phi, squared);
}

CVec2 RetMerit::adjoint_moment() const {
  return {std::conj(acceptor_.moment[0]), std::conj(acceptor_.moment[1])};
}

}  // namespace gshape
