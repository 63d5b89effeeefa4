#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gshape/contour.hpp"
#include "gshape/error.hpp"
#include "gshape/levelset.hpp"

using namespace gshape;

namespace {

constexpr double kPi = std::numbers::pi;

template <class F>
LevelSetField sample(const Grid2D& g, F f) {
  LevelSetField phi(g);
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) phi(i, j) = f(g.cell_center(i, j));
  }
  return phi;
}

LevelSetField circle(const Grid2D& g, double r, Vec2 c = {}) {
  return sample(g, [&](Vec2 p) { return norm(p - c) - r; });
}

double radius_from_area(const LevelSetField& phi) { return std::sqrt(enclosed_area(phi) / kPi); }

double band_max_diff(const LevelSetField& a, const LevelSetField& b, double band) {
  double d = 0.0;
  for (std::size_t n = 0; n < a.values().size(); ++n) {
    if (std::abs(b.values()[n]) <= band) d = std::max(d, std::abs(a.values()[n] - b.values()[n]));
  }
  return d;
}

// Largest shift of a grid-line zero crossing between two level sets with the
// same crossing topology.
double crossing_shift(const LevelSetField& a, const LevelSetField& b) {
  const auto ca = grid_crossings(a);
  const auto cb = grid_crossings(b);
  REQUIRE(ca.size() == cb.size());
  double d = 0.0;
  for (std::size_t n = 0; n < ca.size(); ++n) {
    REQUIRE(ca[n].edge == cb[n].edge);
    d = std::max(d, std::abs(ca[n].position - cb[n].position));
  }
  return d;
}

VelocityField constant(const Grid2D& g, double v) { return VelocityField(g, v); }

}  // namespace

TEST_CASE("shape initialization") {
  const Grid2D g = make_grid(7.0, 7.0, 20);

  SUBCASE("cylinder is an exact signed distance") {
    const LevelSetField phi = init_shape(Cylinder{{0.0, 0.0}, 1.0}, g);
    CHECK(phi(70, 70) == doctest::Approx(norm(g.cell_center(70, 70)) - 1.0));
    CHECK(phi(70, 70) < -0.9);
    CHECK(phi(110, 70) == doctest::Approx(norm(g.cell_center(110, 70)) - 1.0));
    CHECK(std::abs(phi(109, 69) - 1.0) < 0.05);
  }

  SUBCASE("two bars are a union") {
    const LevelSetField phi = init_shape(TwoBars{}, g);
    const auto at = [&](double x, double y) {
      return phi(static_cast<int>((x - g.x_min()) / g.h()), static_cast<int>((y - g.y_min()) / g.h()));
    };
    CHECK(at(0.0, 1.2) < 0.0);
    CHECK(at(0.0, -1.2) < 0.0);
    CHECK(at(0.0, 0.0) > 0.0);
    CHECK(at(0.0, 0.0) == doctest::Approx(1.0).epsilon(0.05));
  }

  SUBCASE("wall and waveguide") {
    const LevelSetField wall = init_shape(Wall{}, g);
    CHECK(wall(70, 70) < 0.0);
    CHECK(enclosed_area(wall) == doctest::Approx(2.0).epsilon(0.02));
    const LevelSetField guide = init_shape(Waveguide{}, g);
    CHECK(enclosed_area(guide) == doctest::Approx(3.0).epsilon(0.02));
  }

  SUBCASE("rasterized cylinder area") {
    CHECK(enclosed_area(init_shape(Cylinder{}, g)) == doctest::Approx(kPi).epsilon(0.02));
  }

  SUBCASE("invalid shapes") {
    CHECK_THROWS_AS(init_shape(Cylinder{{3.0, 0.0}, 1.0}, g), InvalidArgument);
    CHECK_THROWS_AS(init_shape(Cylinder{{0.0, 0.0}, 0.0}, g), InvalidArgument);
    CHECK_THROWS_AS(init_shape(Wall{{0.0, 0.0}, 0.5, 8.0}, g), InvalidArgument);
    CHECK_THROWS_AS(init_shape(CustomShape{LevelSetField(make_grid(7, 7, 10), -1.0)}, g),
                    InvalidArgument);
  }
}

TEST_CASE("advection") {
  const Grid2D g = make_grid(7.0, 7.0, 20);
  const LevelSetField phi = circle(g, 1.0);

  SUBCASE("zero velocity returns the input bitwise") {
    const LevelSetField out = advect(phi, constant(g, 0.0), 0.1);
    CHECK(std::equal(out.values().begin(), out.values().end(), phi.values().begin()));
  }

  SUBCASE("unit speed grows the radius by the duration") {
    for (bool eno2 : {false, true}) {
      const LevelSetField out = advect(phi, constant(g, 1.0), 0.1, {eno2, 0.5});
      CHECK(std::abs(radius_from_area(out) - 1.1) < g.h() / 2.0);
      CHECK(std::abs(radius_from_area(advect(phi, constant(g, -1.0), 0.1, {eno2, 0.5})) - 0.9) <
            g.h() / 2.0);
    }
  }

  SUBCASE("v for t matches 2v for t/2") {
    const LevelSetField a = advect(phi, constant(g, 0.7), 0.2);
    const LevelSetField b = advect(phi, constant(g, 1.4), 0.1);
    CHECK(crossing_shift(a, b) < g.h() / 2.0);
  }

  SUBCASE("invalid inputs") {
    CHECK_THROWS_AS(advect(phi, constant(g, 1.0), 0.0), InvalidArgument);
    VelocityField bad = constant(g, 1.0);
    bad(3, 3) = std::nan("");
    CHECK_THROWS_AS(advect(phi, bad, 0.1), InvalidArgument);
  }
}

TEST_CASE("curvature flow") {
  const Grid2D g = make_grid(4.0, 4.0, 20);
  CurvatureConstraint flow;
  flow.tau = 1.0;
  flow.sigma = 1e6;  // no localization: v = -kappa

  SUBCASE("circle follows R^2 = R0^2 - 2t") {
    // Each advect call freezes kappa, so the step must respect the explicit
    // diffusion limit dt < h^2 / 2.
    LevelSetField phi = circle(g, 1.2);
    const double dt = 0.001;
    for (int k = 0; k < 300; ++k) {
      phi = reinitialize(advect(phi, constraint_velocity(phi, flow), dt));
    }
    const double expected = std::sqrt(1.2 * 1.2 - 2.0 * 0.3);
    CHECK(std::abs(radius_from_area(phi) - expected) < g.h() / 2.0);
  }

  SUBCASE("square area and perimeter shrink monotonically") {
    LevelSetField phi = sample(g, [](Vec2 p) { return std::max(std::abs(p.x), std::abs(p.y)) - 1.0; });
    double area = enclosed_area(phi);
    double length = perimeter(phi);
    for (int k = 0; k < 40; ++k) {
      phi = reinitialize(advect(phi, constraint_velocity(phi, flow), 0.001));
      CHECK(enclosed_area(phi) < area);
      CHECK(perimeter(phi) < length);
      area = enclosed_area(phi);
      length = perimeter(phi);
    }
  }
}

TEST_CASE("reinitialization") {
  const Grid2D g = make_grid(4.0, 4.0, 20);
  const double h = g.h();
  const LevelSetField phi = circle(g, 1.0, {0.013, -0.021});

  SUBCASE("exact distance function is a fixed point") {
    CHECK(band_max_diff(reinitialize(phi), phi, 3.0 * h) < 1e-3 * h);
  }

  SUBCASE("scaled input returns the distance") {
    LevelSetField scaled = phi;
    for (double& v : scaled.values()) v *= 5.0;
    CHECK(band_max_diff(reinitialize(scaled), phi, 3.0 * h) < 0.05 * h);
  }

  SUBCASE("smooth non-distance input keeps its crossings and gets unit slope") {
    const LevelSetField ellipse = sample(g, [](Vec2 p) {
      return (p.x * p.x / 1.44 + p.y * p.y / 0.64 - 1.0) * (1.0 + 0.3 * p.x);
    });
    const LevelSetField out = reinitialize(ellipse);
    CHECK(crossing_shift(ellipse, out) < h / 2.0);
    for (int j = 1; j + 1 < g.ny(); ++j) {
      for (int i = 1; i + 1 < g.nx(); ++i) {
        if (std::abs(out(i, j)) > 3.0 * h) continue;
        const double gx = (out(i + 1, j) - out(i - 1, j)) / (2.0 * h);
        const double gy = (out(i, j + 1) - out(i, j - 1)) / (2.0 * h);
        CHECK(std::abs(std::hypot(gx, gy) - 1.0) < 0.1);
      }
    }

    SUBCASE("idempotent") {
      CHECK(band_max_diff(reinitialize(out), out, 3.0 * h) < 1e-3 * h);
    }
  }

  SUBCASE("uniformly signed input is rejected") {
    CHECK_THROWS_AS(reinitialize(LevelSetField(g, 1.0)), InvalidArgument);
  }
}

TEST_CASE("curvature") {
  const Grid2D g = make_grid(4.0, 4.0, 20);
  const auto boundary_mean = [&](const LevelSetField& phi) {
    const CellField k = curvature(phi);
    double sum = 0.0;
    int n = 0;
    for (std::size_t c = 0; c < k.values().size(); ++c) {
      if (std::abs(phi.values()[c]) < g.h()) {
        sum += k.values()[c];
        ++n;
      }
    }
    return sum / n;
  };

  SUBCASE("circle of radius R >= 10h") {
    CHECK(boundary_mean(circle(g, 1.0)) == doctest::Approx(1.0).epsilon(0.1));
    CHECK(boundary_mean(circle(g, 0.5)) == doctest::Approx(2.0).epsilon(0.1));
    CHECK(boundary_mean(circle(g, 0.5)) / boundary_mean(circle(g, 1.0)) ==
          doctest::Approx(2.0).epsilon(0.1));
  }

  SUBCASE("straight wall") {
    const LevelSetField wall = sample(g, [](Vec2 p) { return p.x - 0.013; });
    const CellField k = curvature(wall);
    CHECK(k.max_abs() < 1e-6);
  }
}

TEST_CASE("constraint velocity") {
  const Grid2D g = make_grid(4.0, 4.0, 20);
  CurvatureConstraint c;
  c.tau = 1.0;

  SUBCASE("flat wall") {
    CHECK(constraint_velocity(sample(g, [](Vec2 p) { return p.y; }), c).max_abs() < 1e-6);
  }

  SUBCASE("convex circle shrinks") {
    const LevelSetField phi = circle(g, 1.0);
    const VelocityField v = constraint_velocity(phi, c);
    for (std::size_t n = 0; n < v.values().size(); ++n) {
      if (std::abs(phi.values()[n]) < g.h()) CHECK(v.values()[n] < 0.0);
    }
  }

  SUBCASE("localization decays away from the boundary") {
    const LevelSetField phi = circle(g, 1.0);
    const VelocityField v = constraint_velocity(phi, c);
    CHECK(std::abs(v(40, 40)) < 1e-12);
  }

  SUBCASE("inverted sign enhances curvature") {
    CurvatureConstraint inv = c;
    inv.tau = -0.2;
    inv.sigma = 1e6;
    LevelSetField phi = sample(g, [](Vec2 p) {
      const double r = norm(p);
      return r - (1.0 + 0.1 * std::cos(5.0 * std::atan2(p.y, p.x)));
    });
    phi = reinitialize(phi);
    const double before = perimeter(phi);
    for (int k = 0; k < 20; ++k) phi = reinitialize(advect(phi, constraint_velocity(phi, inv), 0.001));
    CHECK(perimeter(phi) > before);
  }

  SUBCASE("thresholded mode ignores gentle curvature") {
    CurvatureConstraint t = c;
    t.mode = CurvatureConstraint::Mode::thresholded;
    t.kappa0 = 2.0;
    CHECK(constraint_velocity(circle(g, 1.0), t).max_abs() < 1e-9);
    CHECK(constraint_velocity(circle(g, 0.3), t).max_abs() > 0.0);
  }
}

TEST_CASE("normalize and mask") {
  const Grid2D g = make_grid(4.0, 4.0, 20);
  const std::vector<Vec2> dipoles{{-1.0, 0.0}, {1.0, 0.0}};
  const double r = 2.0 * g.h();

  SUBCASE("constant field") {
    const VelocityField v = normalize_and_mask(CellField(g, 7.0), dipoles, r);
    for (int j = 0; j < g.ny(); ++j) {
      for (int i = 0; i < g.nx(); ++i) {
        const Vec2 c = g.cell_center(i, j);
        const bool inside = norm(c - dipoles[0]) <= r || norm(c - dipoles[1]) <= r;
        CHECK(v(i, j) == (inside ? 0.0 : 1.0));
      }
    }
  }

  SUBCASE("max at a dipole is masked before normalizing") {
    CellField raw(g, -0.5);
    raw(19, 39) = 100.0;  // next to (-1, 0)
    const VelocityField v = normalize_and_mask(raw, dipoles, r);
    CHECK(v(19, 39) == 0.0);
    CHECK(v.max_abs() == 1.0);
    CHECK(v(5, 5) == -1.0);
  }

  SUBCASE("signs are preserved") {
    CellField raw(g);
    for (std::size_t n = 0; n < raw.values().size(); ++n) raw.values()[n] = std::sin(0.37 * n);
    const VelocityField v = normalize_and_mask(raw, dipoles, 0.0);
    for (std::size_t n = 0; n < raw.values().size(); ++n) {
      CHECK(std::signbit(v.values()[n]) == std::signbit(raw.values()[n]));
    }
  }

  SUBCASE("zero field stalls") {
    CHECK_THROWS_AS(normalize_and_mask(CellField(g, 0.0), dipoles, r), StalledError);
  }

  SUBCASE("interface normalization") {
    const LevelSetField phi = circle(g, 1.0, {0.0, 0.5});
    VelocityField v(g);
    for (int j = 0; j < g.ny(); ++j) {
      for (int i = 0; i < g.nx(); ++i) v(i, j) = 0.1 + 0.01 * i;
    }
    v(0, 0) = 50.0;
    const VelocityField out = normalize_on_interface(v, phi);
    double on_interface = 0.0;
    for (int j = 0; j + 1 < g.ny(); ++j) {
      for (int i = 0; i + 1 < g.nx(); ++i) {
        if ((phi(i, j) < 0) != (phi(i + 1, j) < 0) || (phi(i, j) < 0) != (phi(i, j + 1) < 0)) {
          on_interface = std::max({on_interface, std::abs(out(i, j)), std::abs(out(i + 1, j)),
                                   std::abs(out(i, j + 1))});
        }
      }
    }
    CHECK(on_interface == doctest::Approx(1.0));
    CHECK(out(0, 0) == 1.0);
    CHECK_THROWS_AS(normalize_on_interface(VelocityField(g, 0.0), phi), StalledError);
  }
}
