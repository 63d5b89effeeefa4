#include "gshape/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gshape/contour.hpp"
#include "gshape/error.hpp"

namespace gshape {
namespace {

double box_distance(Vec2 p, Vec2 center, double half_x, double half_y) {
  const double qx = std::abs(p.x - center.x) - half_x;
  const double qy = std::abs(p.y - center.y) - half_y;
  const double outside = std::hypot(std::max(qx, 0.0), std::max(qy, 0.0));
  return outside + std::min(std::max(qx, qy), 0.0);
}

struct ShapeDistance {
  Vec2 p;
  double operator()(const Cylinder& c) const { return norm(p - c.center) - c.radius; }
  double operator()(const Wall& w) const {
    return box_distance(p, w.center, 0.5 * w.width, 0.5 * w.height);
  }
  double operator()(const Waveguide& w) const {
    return box_distance(p, w.center, 0.5 * w.length, 0.5 * w.thickness);
  }
  double operator()(const TwoBars& b) const {
    const double offset = 0.5 * b.gap + 0.5 * b.thickness;
    const double upper =
        box_distance(p, {b.center.x, b.center.y + offset}, 0.5 * b.length, 0.5 * b.thickness);
    const double lower =
        box_distance(p, {b.center.x, b.center.y - offset}, 0.5 * b.length, 0.5 * b.thickness);
    return std::min(upper, lower);
  }
  double operator()(const CustomShape&) const { return 0.0; }
};

void check_parameters(const ShapeSpec& spec) {
  const auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  bool ok = true;
  if (const auto* c = std::get_if<Cylinder>(&spec)) ok = positive(c->radius);
  if (const auto* w = std::get_if<Wall>(&spec)) ok = positive(w->width) && positive(w->height);
  if (const auto* w = std::get_if<Waveguide>(&spec)) ok = positive(w->length) && positive(w->thickness);
  if (const auto* b = std::get_if<TwoBars>(&spec)) {
    ok = positive(b->length) && positive(b->thickness) && b->gap >= 0.0;
  }
  if (!ok) throw InvalidArgument("shape dimensions must be positive");
}

// Clamped lookup: zero-gradient extension beyond the domain.
double at(const LevelSetField& phi, int i, int j) {
  const Grid2D& g = phi.grid();
  return phi(std::clamp(i, 0, g.nx() - 1), std::clamp(j, 0, g.ny() - 1));
}

double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return std::abs(a) < std::abs(b) ? a : b;
}

// Backward/forward one-sided differences along one axis; (di, dj) selects it.
void one_sided(const LevelSetField& phi, int i, int j, int di, int dj, bool eno2, double h,
               double& minus, double& plus) {
  const double f0 = at(phi, i, j);
  const double fm = at(phi, i - di, j - dj);
  const double fp = at(phi, i + di, j + dj);
  minus = (f0 - fm) / h;
  plus = (fp - f0) / h;
  if (eno2) {
    const double fmm = at(phi, i - 2 * di, j - 2 * dj);
    const double fpp = at(phi, i + 2 * di, j + 2 * dj);
    const double d2m = fm - 2.0 * f0 + fp;  // second differences (times h^2)
    const double d2l = fmm - 2.0 * fm + f0;
    const double d2r = f0 - 2.0 * fp + fpp;
    minus += 0.5 * minmod(d2l, d2m) / h;
    plus -= 0.5 * minmod(d2m, d2r) / h;
  }
}

// v |grad phi| with Godunov upwinding.
void hamiltonian(const LevelSetField& phi, const VelocityField& v, bool eno2, CellField& out) {
  const Grid2D& g = phi.grid();
  const double h = g.h();
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const double speed = v(i, j);
      if (speed == 0.0) {
        out(i, j) = 0.0;
        continue;
      }
      double xm, xp, ym, yp;
      one_sided(phi, i, j, 1, 0, eno2, h, xm, xp);
      one_sided(phi, i, j, 0, 1, eno2, h, ym, yp);
      double gx2, gy2;
      if (speed > 0.0) {
        gx2 = std::max(std::pow(std::max(xm, 0.0), 2), std::pow(std::min(xp, 0.0), 2));
        gy2 = std::max(std::pow(std::max(ym, 0.0), 2), std::pow(std::min(yp, 0.0), 2));
      } else {
        gx2 = std::max(std::pow(std::min(xm, 0.0), 2), std::pow(std::max(xp, 0.0), 2));
        gy2 = std::max(std::pow(std::min(ym, 0.0), 2), std::pow(std::max(yp, 0.0), 2));
      }
      out(i, j) = speed * std::sqrt(gx2 + gy2);
    }
  }
}

// Cubic convolution (Keys, a = -1/2) interpolant over cell centres.
class CubicInterpolant {
 public:
  explicit CubicInterpolant(const LevelSetField& phi) : phi_(phi), g_(phi.grid()) {}

  void eval(Vec2 p, double& value, Vec2& grad) const {
    const double u = (p.x - g_.x_min()) / g_.h() - 0.5;
    const double w = (p.y - g_.y_min()) / g_.h() - 0.5;
    const int i = static_cast<int>(std::floor(u));
    const int j = static_cast<int>(std::floor(w));
    double wx[4], wy[4], dx[4], dy[4];
    weights(u - i, wx, dx);
    weights(w - j, wy, dy);
    value = 0.0;
    double gx = 0.0, gy = 0.0;
    for (int b = 0; b < 4; ++b) {
      for (int a = 0; a < 4; ++a) {
        const double f = at(phi_, i - 1 + a, j - 1 + b);
        value += wx[a] * wy[b] * f;
        gx += dx[a] * wy[b] * f;
        gy += wx[a] * dy[b] * f;
      }
    }
    grad = {gx / g_.h(), gy / g_.h()};
  }

 private:
  static void weights(double s, double* w, double* d) {
    const double s2 = s * s, s3 = s2 * s;
    w[0] = 0.5 * (-s3 + 2.0 * s2 - s);
    w[1] = 0.5 * (3.0 * s3 - 5.0 * s2 + 2.0);
    w[2] = 0.5 * (-3.0 * s3 + 4.0 * s2 + s);
    w[3] = 0.5 * (s3 - s2);
    d[0] = 0.5 * (-3.0 * s2 + 4.0 * s - 1.0);
    d[1] = 0.5 * (9.0 * s2 - 10.0 * s);
    d[2] = 0.5 * (-9.0 * s2 + 8.0 * s + 1.0);
    d[3] = 0.5 * (3.0 * s2 - 2.0 * s);
  }

  const LevelSetField& phi_;
  Grid2D g_;
};

// Uniform bucket grid over contour segments for nearest-segment queries.
class SegmentIndex {
 public:
  SegmentIndex(const Grid2D& grid, std::vector<Segment> segments)
      : segs_(std::move(segments)), size_(4.0 * grid.h()), x0_(grid.x_min()), y0_(grid.y_min()) {
    nbx_ = static_cast<int>(std::ceil(grid.extent_x() / size_)) + 1;
    nby_ = static_cast<int>(std::ceil(grid.extent_y() / size_)) + 1;
    buckets_.resize(static_cast<std::size_t>(nbx_) * nby_);
    for (std::size_t k = 0; k < segs_.size(); ++k) {
      const Segment& s = segs_[k];
      const int bx0 = bucket_x(std::min(s.a.x, s.b.x)), bx1 = bucket_x(std::max(s.a.x, s.b.x));
      const int by0 = bucket_y(std::min(s.a.y, s.b.y)), by1 = bucket_y(std::max(s.a.y, s.b.y));
      for (int by = by0; by <= by1; ++by) {
        for (int bx = bx0; bx <= bx1; ++bx) buckets_[by * nbx_ + bx].push_back(k);
      }
    }
  }

  // Distance to the nearest segment and the closest point on it.
  double nearest(Vec2 p, Vec2& closest) const {
    const int cx = bucket_x(p.x), cy = bucket_y(p.y);
    double best = std::numeric_limits<double>::infinity();
    const int max_ring = std::max(nbx_, nby_);
    for (int r = 0; r <= max_ring; ++r) {
      for (int by = cy - r; by <= cy + r; ++by) {
        if (by < 0 || by >= nby_) continue;
        for (int bx = cx - r; bx <= cx + r; ++bx) {
          if (bx < 0 || bx >= nbx_) continue;
          if (std::max(std::abs(bx - cx), std::abs(by - cy)) != r) continue;
          for (std::size_t k : buckets_[by * nbx_ + bx]) {
            Vec2 q;
            const double d = point_segment(p, segs_[k], q);
            if (d < best) {
              best = d;
              closest = q;
            }
          }
        }
      }
      if (best <= r * size_) break;
    }
    return best;
  }

 private:
  static double point_segment(Vec2 p, const Segment& s, Vec2& q) {
    const Vec2 ab = s.b - s.a;
    const double len2 = ab.x * ab.x + ab.y * ab.y;
    double t = 0.0;
    if (len2 > 0.0) {
      t = std::clamp(((p.x - s.a.x) * ab.x + (p.y - s.a.y) * ab.y) / len2, 0.0, 1.0);
    }
    q = s.a + t * ab;
    return norm(p - q);
  }
  int bucket_x(double x) const {
    return std::clamp(static_cast<int>(std::floor((x - x0_) / size_)), 0, nbx_ - 1);
  }
  int bucket_y(double y) const {
    return std::clamp(static_cast<int>(std::floor((y - y0_) / size_)), 0, nby_ - 1);
  }

  std::vector<Segment> segs_;
  double size_;
  double x0_, y0_;
  int nbx_ = 0, nby_ = 0;
  std::vector<std::vector<std::size_t>> buckets_;
};

// Closest point on the interpolant's zero set, starting from `start`.
bool project(const CubicInterpolant& f, Vec2 x, Vec2 start, double h, Vec2& out) {
  Vec2 p = start;
  for (int it = 0; it < 40; ++it) {
    double v;
    Vec2 g;
    f.eval(p, v, g);
    const double g2 = g.x * g.x + g.y * g.y;
    if (!(g2 > 1e-12)) return false;
    const Vec2 d1 = (-v / g2) * g;
    const Vec2 q = x - p;
    const double qg = (q.x * g.x + q.y * g.y) / g2;
    const Vec2 d2 = q - qg * g;
    p = p + d1 + d2;
    if (norm(p - start) > h) return false;
    if (norm(d1) + norm(d2) < 1e-12 * h) {
      out = p;
      return true;
    }
  }
  return false;
}

}  // namespace

LevelSetField init_shape(const ShapeSpec& spec, const Grid2D& grid) {
  LevelSetField phi(grid);
  if (const auto* custom = std::get_if<CustomShape>(&spec)) {
    if (!(custom->phi.grid() == grid)) {
      throw InvalidArgument("custom shape raster does not match the simulation grid");
    }
    phi = custom->phi;
  } else {
    check_parameters(spec);
    for (int j = 0; j < grid.ny(); ++j) {
      for (int i = 0; i < grid.nx(); ++i) {
        phi(i, j) = std::visit(ShapeDistance{grid.cell_center(i, j)}, spec);
      }
    }
  }

  bool any_inside = false;
  for (double v : phi.values()) any_inside = any_inside || v < 0.0;
  if (!any_inside) throw InvalidArgument("shape has an empty interior on this grid");
  for (int i = 0; i < grid.nx(); ++i) {
    if (phi(i, 0) <= 0.0 || phi(i, grid.ny() - 1) <= 0.0) {
      throw InvalidArgument("shape touches the domain boundary");
    }
  }
  for (int j = 0; j < grid.ny(); ++j) {
    if (phi(0, j) <= 0.0 || phi(grid.nx() - 1, j) <= 0.0) {
      throw InvalidArgument("shape touches the domain boundary");
    }
  }
  return phi;
}

LevelSetField advect(const LevelSetField& phi, const VelocityField& v, double duration,
                     const AdvectOptions& options) {
  if (!(phi.grid() == v.grid())) throw InvalidArgument("level set and velocity grids differ");
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw InvalidArgument("advection duration must be positive");
  }
  for (double x : phi.values()) {
    if (!std::isfinite(x)) throw InvalidArgument("level set contains non-finite values");
  }
  for (double x : v.values()) {
    if (!std::isfinite(x)) throw InvalidArgument("velocity contains non-finite values");
  }
  const double vmax = v.max_abs();
  if (vmax == 0.0) return phi;

  const double h = phi.grid().h();
  const auto steps = static_cast<long>(std::ceil(duration * vmax / (options.cfl * h) - 1e-12));
  const double dt = duration / static_cast<double>(std::max(steps, 1L));

  LevelSetField cur = phi;
  CellField rate(phi.grid());
  for (long s = 0; s < std::max(steps, 1L); ++s) {
    hamiltonian(cur, v, options.eno2, rate);
    if (!options.eno2) {
      auto p = cur.values();
      auto r = rate.values();
      for (std::size_t k = 0; k < p.size(); ++k) p[k] -= dt * r[k];
    } else {
      LevelSetField stage = cur;
      auto p1 = stage.values();
      auto r = rate.values();
      for (std::size_t k = 0; k < p1.size(); ++k) p1[k] -= dt * r[k];
      hamiltonian(stage, v, true, rate);
      auto p = cur.values();
      for (std::size_t k = 0; k < p.size(); ++k) p[k] = 0.5 * (p[k] + p1[k] - dt * r[k]);
    }
  }
  return cur;
}

LevelSetField reinitialize(const LevelSetField& phi, const ReinitOptions& options) {
  const Grid2D& g = phi.grid();
  bool neg = false, pos = false;
  for (double v : phi.values()) {
    if (!std::isfinite(v)) throw InvalidArgument("level set contains non-finite values");
    neg = neg || v < 0.0;
    pos = pos || v >= 0.0;
  }
  if (!(neg && pos)) throw InvalidArgument("cannot reinitialize a uniformly signed level set");

  std::vector<Segment> segments = zero_contour(phi);
  if (segments.empty()) throw InvalidArgument("level set has no resolvable zero contour");
  const SegmentIndex index(g, std::move(segments));
  const CubicInterpolant interp(phi);
  const double h = g.h();
  const double band = options.band * h;

  LevelSetField out(g);
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const Vec2 x = g.cell_center(i, j);
      Vec2 foot;
      double d = index.nearest(x, foot);
      if (d <= band) {
        Vec2 refined;
        if (project(interp, x, foot, h, refined)) {
          const double dr = norm(x - refined);
          if (dr <= d + 0.1 * h) d = dr;
        }
      }
      out(i, j) = phi(i, j) < 0.0 ? -d : d;
    }
  }
  return out;
}

CellField curvature(const LevelSetField& phi) {
  const Grid2D& g = phi.grid();
  const double h = g.h();
  CellField kappa(g);
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const double c = at(phi, i, j);
      const double px = (at(phi, i + 1, j) - at(phi, i - 1, j)) / (2.0 * h);
      const double py = (at(phi, i, j + 1) - at(phi, i, j - 1)) / (2.0 * h);
      const double pxx = (at(phi, i + 1, j) - 2.0 * c + at(phi, i - 1, j)) / (h * h);
      const double pyy = (at(phi, i, j + 1) - 2.0 * c + at(phi, i, j - 1)) / (h * h);
      const double pxy = (at(phi, i + 1, j + 1) - at(phi, i + 1, j - 1) - at(phi, i - 1, j + 1) +
                          at(phi, i - 1, j - 1)) /
                         (4.0 * h * h);
      const double g2 = px * px + py * py + 1e-16;
      kappa(i, j) = (pxx * py * py - 2.0 * px * py * pxy + pyy * px * px) / (g2 * std::sqrt(g2));
    }
  }
  return kappa;
}

VelocityField constraint_velocity(const LevelSetField& phi, const CurvatureConstraint& c) {
  if (!(c.tau >= 0.0) && !(c.tau < 0.0)) throw InvalidArgument("tau must be finite");
  if (!(c.sigma > 0.0)) throw InvalidArgument("sigma must be positive");
  const CellField kappa = curvature(phi);
  VelocityField v(phi.grid());
  auto out = v.values();
  auto k = kappa.values();
  auto p = phi.values();
  for (std::size_t n = 0; n < out.size(); ++n) {
    double b = k[n];
    if (c.mode == CurvatureConstraint::Mode::thresholded && std::abs(b) <= c.kappa0) b = 0.0;
    out[n] = -c.tau * b * std::exp(-p[n] * p[n] / c.sigma);
  }
  return v;
}

VelocityField normalize_and_mask(const CellField& v_raw, std::span<const Vec2> dipoles,
                                 double exclusion_radius) {
  const Grid2D& g = v_raw.grid();
  VelocityField v(g);
  double vmax = 0.0;
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const double raw = v_raw(i, j);
      if (!std::isfinite(raw)) throw InvalidArgument("velocity contains non-finite values");
      const Vec2 c = g.cell_center(i, j);
      const bool masked = std::any_of(dipoles.begin(), dipoles.end(), [&](Vec2 d) {
        return norm(c - d) <= exclusion_radius;
      });
      v(i, j) = masked ? 0.0 : raw;
      vmax = std::max(vmax, std::abs(v(i, j)));
    }
  }
  if (vmax == 0.0) throw StalledError("boundary velocity vanishes outside the dipole exclusion zones");
  for (double& x : v.values()) x /= vmax;
  return v;
}


VelocityField normalize_on_interface(const VelocityField& v, const LevelSetField& phi) {
  const Grid2D& g = v.grid();
  if (!(phi.grid() == g)) throw InvalidArgument("velocity and level set grids differ");
  double vmax = 0.0;
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const double p = phi(i, j);
      const bool edge = (i + 1 < g.nx() && (p < 0.0) != (phi(i + 1, j) < 0.0)) ||
                        (i > 0 && (p < 0.0) != (phi(i - 1, j) < 0.0)) ||
                        (j + 1 < g.ny() && (p < 0.0) != (phi(i, j + 1) < 0.0)) ||
                        (j > 0 && (p < 0.0) != (phi(i, j - 1) < 0.0));
      if (edge) vmax = std::max(vmax, std::abs(v(i, j)));
    }
  }
  if (vmax == 0.0) throw StalledError("boundary velocity vanishes on the interface");
  VelocityField out(g);
  auto src = v.values();
  auto dst = out.values();
  for (std::size_t n = 0; n < dst.size(); ++n) dst[n] = std::clamp(src[n] / vmax, -1.0, 1.0);
  return out;
}

}  // namespace gshape
