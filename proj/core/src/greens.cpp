#include "gshape/greens.hpp"

#include <cmath>
#include <future>
#include <numbers>

#include "gshape/error.hpp"

namespace gshape {
namespace {

Complex hankel1(int order, double x) {
  return {std::cyl_bessel_j(static_cast<double>(order), x),
          std::cyl_neumann(static_cast<double>(order), x)};
}

NodeIndex interior_node(const Grid2D& grid, Vec2 p) {
  const auto node = grid.node_at(p);
  if (!node) throw InvalidArgument("point is not on a grid node");
  if (node->i < 1 || node->j < 1 || node->i >= grid.nx() || node->j >= grid.ny()) {
    throw InvalidArgument("point lies on the domain edge or in the absorbing layer");
  }
  return *node;
}

}  // namespace

GreensColumn greens_column(const MaterialMap& material, Vec2 source, Axis axis, double omega,
                           const GreensSettings& settings) {
  const double f = omega / (2.0 * std::numbers::pi);
  const SourceSpec src = SourceSpec::gaussian(source, axis, f, settings.width_periods / f);
  const Complex j = source_spectrum(src, omega);

  RunResult res = run(material, src, omega, settings.solver);
  GreensColumn col;
  col.source = source;
  col.moment = axis == Axis::x ? CVec2{1.0, 0.0} : CVec2{0.0, 1.0};
  col.omega = omega;
  col.field = std::move(res.field);
  col.field *= 1.0 / (Complex(0.0, 1.0) * omega * j);
  return col;
}

GreensColumn combine(const GreensColumn& x_column, const GreensColumn& y_column, Complex a,
                     Complex b) {
  if (!(x_column.source == y_column.source) || x_column.omega != y_column.omega) {
    throw InvalidArgument("columns must share source point and frequency");
  }
  GreensColumn out;
  out.source = x_column.source;
  out.omega = x_column.omega;
  out.moment = {a * x_column.moment[0] + b * y_column.moment[0],
                a * x_column.moment[1] + b * y_column.moment[1]};
  out.field = a * x_column.field;
  out.field += b * y_column.field;
  return out;
}

SourceColumns greens_columns(const MaterialMap& material, Vec2 source, const CVec2& moment,
                             double omega, const GreensSettings& settings) {
  const bool need_x = moment[0] != Complex{0.0};
  const bool need_y = moment[1] != Complex{0.0};
  if (!need_x && !need_y) throw InvalidArgument("dipole moment must be nonzero");
  SourceColumns cols;
  if (need_x && need_y) {
    auto ycol = std::async(std::launch::async, [&] {
      return greens_column(material, source, Axis::y, omega, settings);
    });
    cols.x = greens_column(material, source, Axis::x, omega, settings);
    cols.y = ycol.get();
  } else if (need_x) {
    cols.x = greens_column(material, source, Axis::x, omega, settings);
  } else {
    cols.y = greens_column(material, source, Axis::y, omega, settings);
  }
  return cols;
}

GreensColumn SourceColumns::combined(const CVec2& moment) const {
  if ((moment[0] != Complex{0.0} && !x) || (moment[1] != Complex{0.0} && !y)) {
    throw InvalidArgument("moment has a component along an axis that was not simulated");
  }
  if (x && y) return combine(*x, *y, moment[0], moment[1]);
  GreensColumn c = x ? *x : *y;
  const Complex weight = x ? moment[0] : moment[1];
  c.field *= weight;
  c.moment = moment;
  return c;
}

Mat2 SourceColumns::tensor(Vec2 r) const {
  Mat2 g{};
  if (x) {
    const CVec2 gx = sample(*x, r);
    g[0][0] = gx[0];
    g[1][0] = gx[1];
  }
  if (y) {
    const CVec2 gy = sample(*y, r);
    g[0][1] = gy[0];
    g[1][1] = gy[1];
  }
  return g;
}

GreensColumn greens_column(const MaterialMap& material, Vec2 source, const CVec2& moment,
                           double omega, const GreensSettings& settings) {
  return greens_columns(material, source, moment, omega, settings).combined(moment);
}

CVec2 sample(const GreensColumn& column, Vec2 r) {
  const Grid2D& grid = column.field.grid();
  const NodeIndex at = interior_node(grid, r);
  const auto src = grid.node_at(column.source);
  if (src && *src == at) {
    throw InvalidArgument("Green's tensor is singular at the source point");
  }
  return column.field.at_node(at.i, at.j);
}

Mat2 tensor_at(const GreensColumn& x_column, const GreensColumn& y_column, Vec2 r) {
  const CVec2 gx = sample(x_column, r);
  const CVec2 gy = sample(y_column, r);
  return {{{gx[0], gy[0]}, {gx[1], gy[1]}}};
}

Mat2 analytic_freespace_g2d(Vec2 r, Vec2 s, double omega, double eps_background) {
  if (!(eps_background >= 1.0)) throw InvalidArgument("background permittivity must be >= 1");
  if (!(omega > 0.0)) throw InvalidArgument("omega must be positive");
  const Vec2 d = r - s;
  const double rho = norm(d);
  if (!(rho > 0.0)) throw InvalidArgument("Green's tensor is singular at r = s");
  const double k = std::sqrt(eps_background) * omega;
  const double x = k * rho;
  const Complex i4(0.0, 0.25);
  const Complex h0 = hankel1(0, x);
  const Complex h1 = hankel1(1, x);
  const Complex longitudinal = i4 * h1 / x;
  const Complex transverse = i4 * (h0 - h1 / x);
  const double u[2] = {d.x / rho, d.y / rho};
  Mat2 g{};
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const double proj = u[a] * u[b];
      g[a][b] = longitudinal * proj + transverse * ((a == b ? 1.0 : 0.0) - proj);
    }
  }
  return g;
}

double reciprocity_defect(const MaterialMap& material, Vec2 r, Vec2 s, double omega,
                          const GreensSettings& settings) {
  auto rs = std::async(std::launch::async, [&] {
    return std::pair{greens_column(material, s, Axis::x, omega, settings),
                     greens_column(material, s, Axis::y, omega, settings)};
  });
  const GreensColumn rx = greens_column(material, r, Axis::x, omega, settings);
  const GreensColumn ry = greens_column(material, r, Axis::y, omega, settings);
  const auto [sx, sy] = rs.get();
  const Mat2 g_rs = tensor_at(sx, sy, r);
  const Mat2 g_sr = tensor_at(rx, ry, s);
  double diff = 0.0;
  double scale = 0.0;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      diff = std::max(diff, std::abs(g_rs[a][b] - g_sr[b][a]));
      scale = std::max(scale, std::abs(g_rs[a][b]));
    }
  }
  if (!(scale > 0.0)) throw SolverError("Green's tensor vanished between r and s");
  return diff / scale;
}

}  // namespace gshape
