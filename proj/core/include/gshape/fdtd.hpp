#pragma once

#include <array>
#include <complex>
#include <vector>

#include "gshape/field.hpp"

namespace gshape {

using Complex = std::complex<double>;
using CVec2 = std::array<Complex, 2>;

enum class Axis { x, y };

/// Real-valued Gaussian point current
///   j(t) = amplitude * cos(2 pi f t) * exp(-(t - t0)^2 / (2 w^2)),
/// switched on at t = 0 and exactly zero after `cutoff`.
struct SourceSpec {
  Vec2 position;
  Axis polarization = Axis::x;
  double frequency = 0.5;
  double width = 20.0;
  double peak_time = 100.0;
  double cutoff = 200.0;
  double amplitude = 1.0;

  /// Defaults t0 = 5 w and cutoff = t0 + 5 w.
  static SourceSpec gaussian(Vec2 position, Axis polarization, double frequency, double width);

  double current(double t) const;
};

struct StopRule {
  double energy_decay = 1e-8;  // stop once total field energy < decay * peak, after cutoff
  long max_steps = 1'000'000;
  long fixed_steps = 0;  // > 0: run exactly this many steps, no decay test
};

struct SolverSettings {
  double courant = 0.5;
  int pml_cells = 0;  // 0: ceil(lambda/2 * resolution)
  double pml_reflection = 1e-8;
  StopRule stop;
  bool record_energy = false;
};

/// dt = courant * h / sqrt(2). Throws InvalidArgument unless 0 < courant < 1.
double cfl_timestep(const Grid2D& grid, double courant);

/// ceil(lambda/2 * resolution) cells.
int default_pml_cells(const Grid2D& grid, double wavelength);

/// Continuous-time Fourier transform  integral j(t) e^{+i omega t} dt  of the
/// source (without the switch-on/cutoff truncation). Throws InvalidArgument if
/// the spectrum at omega is below 1e-12 of its peak.
Complex source_spectrum(const SourceSpec& src, double omega);

/// Single-frequency in-plane E field over the physical domain, stored on the
/// Yee edges: Ex on horizontal edges (nx x (ny+1)), Ey on vertical edges
/// ((nx+1) x ny). Cell and node values are averages of adjacent edges.
class ComplexFieldMap {
 public:
  ComplexFieldMap() = default;
  ComplexFieldMap(const Grid2D& grid, double frequency);

  const Grid2D& grid() const { return grid_; }
  double frequency() const { return frequency_; }
  double omega() const;

  Complex& ex(int i, int j) { return ex_[static_cast<std::size_t>(j) * grid_.nx() + i]; }
  Complex ex(int i, int j) const { return ex_[static_cast<std::size_t>(j) * grid_.nx() + i]; }
  Complex& ey(int i, int j) { return ey_[static_cast<std::size_t>(j) * (grid_.nx() + 1) + i]; }
  Complex ey(int i, int j) const { return ey_[static_cast<std::size_t>(j) * (grid_.nx() + 1) + i]; }

  CVec2 at_cell(int i, int j) const;
  /// Interior nodes only: 1 <= i < nx, 1 <= j < ny.
  CVec2 at_node(int i, int j) const;

  /// Edge-wise bilinear product sum(a_e * b_e)/2 over the four edges of cell (i, j).
  static Complex cell_dot(const ComplexFieldMap& a, const ComplexFieldMap& b, int i, int j);

  ComplexFieldMap& operator*=(Complex s);
  ComplexFieldMap& operator+=(const ComplexFieldMap& other);
  friend ComplexFieldMap operator*(Complex s, ComplexFieldMap f) { return f *= s; }
  friend ComplexFieldMap operator+(ComplexFieldMap a, const ComplexFieldMap& b) { return a += b; }

  bool all_finite() const;

  /// Interleaved (Re Ex, Im Ex, Re Ey, Im Ey) per cell, for the GSHF container.
  std::vector<double> interleaved_cells() const;

 private:
  Grid2D grid_;
  double frequency_ = 0.0;
  std::vector<Complex> ex_;
  std::vector<Complex> ey_;
};

struct EnergySample {
  long step = 0;
  double time = 0.0;
  double electric = 0.0;
  double total = 0.0;
};

struct RunResult {
  ComplexFieldMap field;  // raw DFT  sum_n E(n dt) e^{i omega n dt} dt
  long steps = 0;
  double dt = 0.0;
  double peak_energy = 0.0;
  double final_energy = 0.0;
  std::vector<EnergySample> energy;  // filled when settings.record_energy
};

/// Time-steps the (Ex, Ey, Hz) Yee system over the physical domain plus a
/// split-field PML and returns the running DFT of E at omega.
///
/// Throws InvalidArgument if the source is off-node or closer than one PML
/// thickness to the domain edge, SolverError if the field has not decayed
/// by max_steps or became non-finite.
RunResult run(const MaterialMap& material, const SourceSpec& src, double omega,
              const SolverSettings& settings);

}  // namespace gshape
