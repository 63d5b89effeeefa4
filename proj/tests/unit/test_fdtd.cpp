#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gshape/error.hpp"
#include "gshape/fdtd.hpp"
#include "gshape/material.hpp"

using namespace gshape;

namespace {

// Trapezoid quadrature of j(t) e^{i omega t} over the source support.
Complex quadrature_spectrum(const SourceSpec& src, double omega) {
  const int n = 400000;
  const double dt = src.cutoff / n;
  Complex sum = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double t = k * dt;
    const double weight = (k == 0 || k == n) ? 0.5 : 1.0;
    sum += weight * src.current(t) * std::polar(1.0, omega * t);
  }
  return sum * dt;
}

}  // namespace

TEST_CASE("timestep and absorbing layer defaults") {
  const Grid2D g = make_grid(7.0, 7.0, 20);
  CHECK(cfl_timestep(g, 0.5) == doctest::Approx(0.5 * 0.05 / std::sqrt(2.0)));
  CHECK_THROWS_AS(cfl_timestep(g, 1.0), InvalidArgument);
  CHECK_THROWS_AS(cfl_timestep(g, 0.0), InvalidArgument);
  CHECK(default_pml_cells(g, 2.0) == 20);
  CHECK(default_pml_cells(make_grid(7.0, 7.0, 10), 2.0) == 10);
}

TEST_CASE("gaussian source") {
  const SourceSpec src = SourceSpec::gaussian({0.0, 0.0}, Axis::x, 0.5, 20.0);
  CHECK(src.peak_time == doctest::Approx(100.0));
  CHECK(src.cutoff == doctest::Approx(200.0));
  CHECK(src.current(-1.0) == 0.0);
  CHECK(src.current(200.5) == 0.0);
  CHECK(src.current(100.0) == doctest::Approx(1.0));

  SUBCASE("analytic spectrum matches quadrature") {
    for (double omega : {std::numbers::pi, 0.95 * std::numbers::pi, 1.05 * std::numbers::pi}) {
      const Complex analytic = source_spectrum(src, omega);
      const Complex numeric = quadrature_spectrum(src, omega);
      // The closed form ignores the switch-on and cutoff, which sit 5 widths out.
      CHECK(std::abs(analytic - numeric) < 1e-4 * std::abs(numeric));
    }
  }

  SUBCASE("vanishing spectrum is rejected") {
    CHECK_THROWS_AS(source_spectrum(src, 3.0 * std::numbers::pi), InvalidArgument);
  }
}

TEST_CASE("solver run") {
  const Grid2D g = make_grid(3.0, 3.0, 10);
  const MaterialMap vacuum = uniform_material(g, 1.0);
  const SourceSpec src = SourceSpec::gaussian({0.0, 0.0}, Axis::x, 0.5, 20.0);
  const double omega = std::numbers::pi;

  SUBCASE("energy decays below the stop threshold after the pulse") {
    SolverSettings s;
    s.record_energy = true;
    const RunResult r = run(vacuum, src, omega, s);
    CHECK(r.final_energy < s.stop.energy_decay * r.peak_energy);
    CHECK(r.energy.back().time > src.cutoff);
    CHECK(r.field.all_finite());
  }

  SUBCASE("fixed step count") {
    SolverSettings s;
    s.stop.fixed_steps = 123;
    CHECK(run(vacuum, src, omega, s).steps == 123);
  }

  SUBCASE("step cap raises a solver error") {
    SolverSettings s;
    s.stop.max_steps = 100;
    CHECK_THROWS_AS(run(vacuum, src, omega, s), SolverError);
  }

  SUBCASE("deterministic") {
    const RunResult a = run(vacuum, src, omega, {});
    const RunResult b = run(vacuum, src, omega, {});
    bool same = a.steps == b.steps;
    for (int j = 0; j <= g.ny(); ++j) {
      for (int i = 0; i < g.nx(); ++i) same = same && a.field.ex(i, j) == b.field.ex(i, j);
    }
    CHECK(same);
  }

  SUBCASE("invalid inputs") {
    SourceSpec off = src;
    off.position = {0.05, 0.0};
    CHECK_THROWS_AS(run(vacuum, off, omega, {}), InvalidArgument);
    SourceSpec edge = src;
    edge.position = {1.5, 0.0};
    CHECK_THROWS_AS(run(vacuum, edge, omega, {}), InvalidArgument);
    CHECK_THROWS_AS(run(uniform_material(g, 0.5), src, omega, {}), InvalidArgument);
  }

  SUBCASE("mirror symmetry of an x source") {
    // Ex from an x-polarized source at the centre is even in y.
    const RunResult r = run(vacuum, src, omega, {});
    double asym = 0.0, scale = 0.0;
    for (int j = 0; j <= g.ny(); ++j) {
      for (int i = 0; i < g.nx(); ++i) {
        asym = std::max(asym, std::abs(r.field.ex(i, j) - r.field.ex(i, g.ny() - j)));
        scale = std::max(scale, std::abs(r.field.ex(i, j)));
      }
    }
    CHECK(asym <= 1e-12 * scale);
  }
}

TEST_CASE("high-permittivity run stays bounded after cutoff") {
  const Grid2D g = make_grid(3.0, 3.0, 10);
  const SourceSpec src = SourceSpec::gaussian({0.0, 0.0}, Axis::x, 0.5, 20.0);
  SolverSettings s;
  s.stop.fixed_steps = 10000;
  s.record_energy = true;
  const RunResult r = run(uniform_material(g, 12.0), src, std::numbers::pi, s);
  REQUIRE(r.steps == 10000);
  double after = -1.0;
  bool bounded = true;
  for (const EnergySample& e : r.energy) {
    if (e.time <= src.cutoff) continue;
    if (after < 0.0) after = e.total;
    // The staggered E/H sum is not exactly conserved, so allow a small wobble.
    bounded = bounded && std::isfinite(e.total) && e.total <= 1.01 * after;
  }
  CHECK(after > 0.0);
  CHECK(bounded);
}

TEST_CASE("absorbing layer keeps the near field independent of domain size") {
  // A reflecting boundary would make the field near the source depend on
  // how far away the edge is.
  const SourceSpec src = SourceSpec::gaussian({0.0, 0.0}, Axis::y, 0.5, 20.0);
  const double omega = std::numbers::pi;
  const Grid2D small = make_grid(3.0, 3.0, 10);
  const Grid2D large = make_grid(5.0, 5.0, 10);
  const RunResult a = run(uniform_material(small, 1.0), src, omega, {});
  const RunResult b = run(uniform_material(large, 1.0), src, omega, {});
  const CVec2 fa = a.field.at_node(15 + 5, 15);
  const CVec2 fb = b.field.at_node(25 + 5, 25);
  CHECK(std::abs(fa[1] - fb[1]) < 0.02 * std::abs(fb[1]));
}

TEST_CASE("field map algebra") {
  const Grid2D g = make_grid(1.0, 1.0, 10);
  ComplexFieldMap a(g, 0.5), b(g, 0.5);
  for (int j = 0; j <= g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) a.ex(i, j) = Complex(i, j);
  }
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i <= g.nx(); ++i) b.ey(i, j) = Complex(1.0, -i);
  }
  const ComplexFieldMap c = Complex(0.0, 2.0) * a + b;
  CHECK(c.ex(3, 4) == Complex(-8.0, 6.0));
  CHECK(c.ey(3, 4) == Complex(1.0, -3.0));

  SUBCASE("cell values average the adjoining edges") {
    const CVec2 v = a.at_cell(3, 4);
    CHECK(v[0] == Complex(3.0, 4.5));
    CHECK(v[1] == Complex(0.0));
  }

  SUBCASE("cell dot product is edge wise") {
    // Ex edges of cell (3,4): (3,4) and (3,5).
    const Complex d = ComplexFieldMap::cell_dot(a, a, 3, 4);
    CHECK(d == 0.5 * (Complex(3, 4) * Complex(3, 4) + Complex(3, 5) * Complex(3, 5)));
  }

  SUBCASE("node lookup needs an interior node") {
    CHECK_THROWS_AS(a.at_node(0, 3), InvalidArgument);
    CHECK_NOTHROW(a.at_node(1, 1));
  }

  SUBCASE("mismatched maps cannot be added") {
    ComplexFieldMap other(g, 0.25);
    CHECK_THROWS_AS(a += other, InvalidArgument);
  }

  CHECK(a.interleaved_cells().size() == 4 * g.cell_count());
}
