#include "gshape/fdtd.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "gshape/error.hpp"

namespace gshape {

SourceSpec SourceSpec::gaussian(Vec2 position, Axis polarization, double frequency, double width) {
  if (!(frequency > 0.0) || !(width > 0.0)) {
    throw InvalidArgument("source frequency and width must be positive");
  }
  SourceSpec s;
  s.position = position;
  s.polarization = polarization;
  s.frequency = frequency;
  s.width = width;
  s.peak_time = 5.0 * width;
  s.cutoff = s.peak_time + 5.0 * width;
  return s;
}

double SourceSpec::current(double t) const {
  if (t < 0.0 || t > cutoff) return 0.0;
  const double u = (t - peak_time) / width;
  return amplitude * std::cos(2.0 * std::numbers::pi * frequency * t) * std::exp(-0.5 * u * u);
}

double cfl_timestep(const Grid2D& grid, double courant) {
  if (!(courant > 0.0 && courant < 1.0)) {
    throw InvalidArgument("Courant number must lie in (0, 1)");
  }
  return courant * grid.h() / std::numbers::sqrt2;
}

int default_pml_cells(const Grid2D& grid, double wavelength) {
  return static_cast<int>(std::ceil(0.5 * wavelength * grid.resolution() - 1e-9));
}

Complex source_spectrum(const SourceSpec& src, double omega) {
  if (!(omega > 0.0)) throw InvalidArgument("omega must be positive");
  const double w0 = 2.0 * std::numbers::pi * src.frequency;
  const double w = src.width;
  const double scale = src.amplitude * w * std::sqrt(2.0 * std::numbers::pi) / 2.0;
  const auto lobe = [&](double dw) {
    return std::exp(-0.5 * dw * dw * w * w) * std::polar(1.0, dw * src.peak_time);
  };
  const Complex value = scale * (lobe(omega - w0) + lobe(omega + w0));
  if (std::abs(value) < 1e-12 * std::abs(scale)) {
    throw InvalidArgument("source spectrum vanishes at the requested frequency");
  }
  return value;
}

// ---------------------------------------------------------------------------
// ComplexFieldMap

ComplexFieldMap::ComplexFieldMap(const Grid2D& grid, double frequency)
    : grid_(grid),
      frequency_(frequency),
      ex_(static_cast<std::size_t>(grid.nx()) * (grid.ny() + 1)),
      ey_(static_cast<std::size_t>(grid.nx() + 1) * grid.ny()) {}

double ComplexFieldMap::omega() const { return 2.0 * std::numbers::pi * frequency_; }

CVec2 ComplexFieldMap::at_cell(int i, int j) const {
  return {0.5 * (ex(i, j) + ex(i, j + 1)), 0.5 * (ey(i, j) + ey(i + 1, j))};
}

CVec2 ComplexFieldMap::at_node(int i, int j) const {
  if (i < 1 || j < 1 || i >= grid_.nx() || j >= grid_.ny()) {
    throw InvalidArgument("field node lookup needs an interior node");
  }
  return {0.5 * (ex(i - 1, j) + ex(i, j)), 0.5 * (ey(i, j - 1) + ey(i, j))};
}

Complex ComplexFieldMap::cell_dot(const ComplexFieldMap& a, const ComplexFieldMap& b, int i,
                                  int j) {
  return 0.5 * (a.ex(i, j) * b.ex(i, j) + a.ex(i, j + 1) * b.ex(i, j + 1) +
                a.ey(i, j) * b.ey(i, j) + a.ey(i + 1, j) * b.ey(i + 1, j));
}

ComplexFieldMap& ComplexFieldMap::operator*=(Complex s) {
  for (auto& v : ex_) v *= s;
  for (auto& v : ey_) v *= s;
  return *this;
}

ComplexFieldMap& ComplexFieldMap::operator+=(const ComplexFieldMap& other) {
  if (!(grid_ == other.grid_) || frequency_ != other.frequency_) {
    throw InvalidArgument("cannot add field maps on different grids or frequencies");
  }
  for (std::size_t k = 0; k < ex_.size(); ++k) ex_[k] += other.ex_[k];
  for (std::size_t k = 0; k < ey_.size(); ++k) ey_[k] += other.ey_[k];
  return *this;
}

bool ComplexFieldMap::all_finite() const {
  const auto finite = [](Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
  return std::all_of(ex_.begin(), ex_.end(), finite) && std::all_of(ey_.begin(), ey_.end(), finite);
}

std::vector<double> ComplexFieldMap::interleaved_cells() const {
  std::vector<double> out;
  out.reserve(grid_.cell_count() * 4);
  for (int j = 0; j < grid_.ny(); ++j) {
    for (int i = 0; i < grid_.nx(); ++i) {
      const CVec2 e = at_cell(i, j);
      out.push_back(e[0].real());
      out.push_back(e[0].imag());
      out.push_back(e[1].real());
      out.push_back(e[1].imag());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Solver

namespace {

// Update coefficients for du/dt + sigma u = f with the time-averaged damping term.
struct Damping {
  std::vector<double> decay;  // (1 - sigma dt/2) / (1 + sigma dt/2)
  std::vector<double> gain;   // dt / (1 + sigma dt/2)
};

// sigma sampled at positions offset + k (in cells) for k in [0, count).
Damping make_damping(int count, double offset, int pml, int interior, double sigma_max,
                     double dt) {
  Damping d;
  d.decay.resize(count);
  d.gain.resize(count);
  for (int k = 0; k < count; ++k) {
    const double pos = k + offset;
    double depth = 0.0;
    if (pml > 0) {
      depth = std::max({static_cast<double>(pml) - pos, pos - (pml + interior), 0.0}) / pml;
    }
    const double sigma = sigma_max * depth * depth * depth;
    const double half = 0.5 * sigma * dt;
    d.decay[k] = (1.0 - half) / (1.0 + half);
    d.gain[k] = dt / (1.0 + half);
  }
  return d;
}

class YeeSolver {
 public:
  YeeSolver(const MaterialMap& material, int pml, double dt, double reflection)
      : grid_(material.grid()),
        pml_(pml),
        nx_tot_(grid_.nx() + 2 * pml),
        ny_tot_(grid_.ny() + 2 * pml),
        dt_(dt),
        h_(grid_.h()) {
    const std::size_t nex = static_cast<std::size_t>(nx_tot_) * (ny_tot_ + 1);
    const std::size_t ney = static_cast<std::size_t>(nx_tot_ + 1) * ny_tot_;
    const std::size_t nh = static_cast<std::size_t>(nx_tot_) * ny_tot_;
    ex_.assign(nex, 0.0);
    ey_.assign(ney, 0.0);
    hzx_.assign(nh, 0.0);
    hzy_.assign(nh, 0.0);
    eps_ex_.assign(nex, 1.0);
    eps_ey_.assign(ney, 1.0);

    // Permittivity outside the physical domain continues the nearest edge cell.
    const auto eps_cell = [&](int ci, int cj) {
      const int i = std::clamp(ci - pml_, 0, grid_.nx() - 1);
      const int j = std::clamp(cj - pml_, 0, grid_.ny() - 1);
      return material(i, j);
    };
    for (int J = 0; J <= ny_tot_; ++J) {
      for (int I = 0; I < nx_tot_; ++I) {
        const int jlo = std::max(J - 1, 0);
        const int jhi = std::min(J, ny_tot_ - 1);
        eps_ex_[exi(I, J)] = 0.5 * (eps_cell(I, jlo) + eps_cell(I, jhi));
      }
    }
    for (int J = 0; J < ny_tot_; ++J) {
      for (int I = 0; I <= nx_tot_; ++I) {
        const int ilo = std::max(I - 1, 0);
        const int ihi = std::min(I, nx_tot_ - 1);
        eps_ey_[eyi(I, J)] = 0.5 * (eps_cell(ilo, J) + eps_cell(ihi, J));
      }
    }

    const double thickness = pml_ * h_;
    const double sigma_max = pml_ > 0 ? 4.0 * std::log(1.0 / reflection) / (2.0 * thickness) : 0.0;
    // E components sit on integer positions along the stretched axis, Hz on half-integers.
    ex_damp_ = make_damping(ny_tot_ + 1, 0.0, pml_, grid_.ny(), sigma_max, dt_);
    ey_damp_ = make_damping(nx_tot_ + 1, 0.0, pml_, grid_.nx(), sigma_max, dt_);
    hzx_damp_ = make_damping(nx_tot_, 0.5, pml_, grid_.nx(), sigma_max, dt_);
    hzy_damp_ = make_damping(ny_tot_, 0.5, pml_, grid_.ny(), sigma_max, dt_);

    // Curl coefficients gain / (eps h), folded once so the step loops do not divide.
    ex_curl_.resize(nex);
    ey_curl_.resize(ney);
    for (int J = 0; J <= ny_tot_; ++J) {
      for (int I = 0; I < nx_tot_; ++I) {
        ex_curl_[exi(I, J)] = ex_damp_.gain[J] / (eps_ex_[exi(I, J)] * h_);
      }
    }
    for (int J = 0; J < ny_tot_; ++J) {
      for (int I = 0; I <= nx_tot_; ++I) {
        ey_curl_[eyi(I, J)] = ey_damp_.gain[I] / (eps_ey_[eyi(I, J)] * h_);
      }
    }
    hzx_curl_.resize(nx_tot_);
    for (int I = 0; I < nx_tot_; ++I) hzx_curl_[I] = hzx_damp_.gain[I] / h_;
  }

  std::size_t exi(int I, int J) const { return static_cast<std::size_t>(J) * nx_tot_ + I; }
  std::size_t eyi(int I, int J) const { return static_cast<std::size_t>(J) * (nx_tot_ + 1) + I; }
  std::size_t hi(int I, int J) const { return static_cast<std::size_t>(J) * nx_tot_ + I; }

  void step_h() {
    const double inv_h = 1.0 / h_;
    const double* ax = hzx_damp_.decay.data();
    const double* bx = hzx_curl_.data();
    for (int J = 0; J < ny_tot_; ++J) {
      const double ay = hzy_damp_.decay[J];
      const double by = hzy_damp_.gain[J] * inv_h;
      const double* ex0 = &ex_[exi(0, J)];
      const double* ex1 = &ex_[exi(0, J + 1)];
      const double* ey0 = &ey_[eyi(0, J)];
      double* __restrict hx = &hzx_[hi(0, J)];
      double* __restrict hy = &hzy_[hi(0, J)];
      for (int I = 0; I < nx_tot_; ++I) {
        hx[I] = ax[I] * hx[I] - bx[I] * (ey0[I + 1] - ey0[I]);
        hy[I] = ay * hy[I] + by * (ex1[I] - ex0[I]);
      }
    }
  }

  void step_e() {
    // Ex: interior rows only; rows 0 and ny_tot are PEC.
    for (int J = 1; J < ny_tot_; ++J) {
      const double a = ex_damp_.decay[J];
      double* __restrict ex = &ex_[exi(0, J)];
      const double* b = &ex_curl_[exi(0, J)];
      const double* hx1 = &hzx_[hi(0, J)];
      const double* hy1 = &hzy_[hi(0, J)];
      const double* hx0 = &hzx_[hi(0, J - 1)];
      const double* hy0 = &hzy_[hi(0, J - 1)];
      for (int I = 0; I < nx_tot_; ++I) {
        ex[I] = a * ex[I] + b[I] * ((hx1[I] + hy1[I]) - (hx0[I] + hy0[I]));
      }
    }
    const double* a = ey_damp_.decay.data();
    for (int J = 0; J < ny_tot_; ++J) {
      double* __restrict ey = &ey_[eyi(0, J)];
      const double* b = &ey_curl_[eyi(0, J)];
      const double* hx = &hzx_[hi(0, J)];
      const double* hy = &hzy_[hi(0, J)];
      for (int I = 1; I < nx_tot_; ++I) {
        ey[I] = a[I] * ey[I] - b[I] * ((hx[I] + hy[I]) - (hx[I - 1] + hy[I - 1]));
      }
    }
  }

  // Point current at total-grid node (I, J), split evenly over the two
  // adjacent edges of the matching component.
  void inject(Axis axis, int I, int J, double current) {
    const double density = current / (2.0 * h_ * h_);
    if (axis == Axis::x) {
      for (int k : {I - 1, I}) {
        const std::size_t e = exi(k, J);
        ex_[e] -= ex_damp_.gain[J] / eps_ex_[e] * density;
      }
    } else {
      for (int k : {J - 1, J}) {
        const std::size_t e = eyi(I, k);
        ey_[e] -= ey_damp_.gain[I] / eps_ey_[e] * density;
      }
    }
  }

  void accumulate(ComplexFieldMap& dft, Complex weight) const {
    const Grid2D& g = grid_;
    for (int j = 0; j <= g.ny(); ++j) {
      const double* ex = &ex_[exi(pml_, j + pml_)];
      for (int i = 0; i < g.nx(); ++i) dft.ex(i, j) += weight * ex[i];
    }
    for (int j = 0; j < g.ny(); ++j) {
      const double* ey = &ey_[eyi(pml_, j + pml_)];
      for (int i = 0; i <= g.nx(); ++i) dft.ey(i, j) += weight * ey[i];
    }
  }

  double electric_energy() const {
    double sum = 0.0;
    for (std::size_t k = 0; k < ex_.size(); ++k) sum += eps_ex_[k] * ex_[k] * ex_[k];
    for (std::size_t k = 0; k < ey_.size(); ++k) sum += eps_ey_[k] * ey_[k] * ey_[k];
    return sum * h_ * h_;
  }

  double magnetic_energy() const {
    double sum = 0.0;
    for (std::size_t k = 0; k < hzx_.size(); ++k) {
      const double hz = hzx_[k] + hzy_[k];
      sum += hz * hz;
    }
    return sum * h_ * h_;
  }

 private:
  Grid2D grid_;
  int pml_;
  int nx_tot_;
  int ny_tot_;
  double dt_;
  double h_;
  std::vector<double> ex_, ey_, hzx_, hzy_;
  std::vector<double> eps_ex_, eps_ey_;
  Damping ex_damp_, ey_damp_, hzx_damp_, hzy_damp_;
  std::vector<double> ex_curl_, ey_curl_, hzx_curl_;
};

}  // namespace

RunResult run(const MaterialMap& material, const SourceSpec& src, double omega,
              const SolverSettings& settings) {
  const Grid2D& grid = material.grid();
  if (!(omega > 0.0)) throw InvalidArgument("omega must be positive");
  const auto node = grid.node_at(src.position);
  if (!node) throw InvalidArgument("source position must coincide with a grid node");
  if (node->i < 1 || node->j < 1 || node->i >= grid.nx() || node->j >= grid.ny()) {
    throw InvalidArgument("source lies on the domain edge or inside the absorbing layer");
  }
  for (double e : material.values()) {
    if (!(e >= 1.0) || !std::isfinite(e)) throw InvalidArgument("permittivity must be >= 1");
  }

  const double dt = cfl_timestep(grid, settings.courant);
  const int pml = settings.pml_cells > 0 ? settings.pml_cells
                                         : default_pml_cells(grid, 1.0 / src.frequency);
  YeeSolver solver(material, pml, dt, settings.pml_reflection);

  RunResult result;
  result.dt = dt;
  result.field = ComplexFieldMap(grid, omega / (2.0 * std::numbers::pi));

  const int I0 = node->i + pml;
  const int J0 = node->j + pml;
  const StopRule& stop = settings.stop;
  const long check_every = 16;
  const long cap = stop.fixed_steps > 0 ? stop.fixed_steps : stop.max_steps;

  double peak = 0.0;
  bool done = false;
  long n = 0;
  while (!done) {
    if (n >= cap) {
      if (stop.fixed_steps > 0) break;
      throw SolverError("field did not decay within " + std::to_string(cap) +
                        " steps; absorbing layer may be insufficient");
    }
    solver.step_h();
    solver.step_e();
    const double t_half = (n + 0.5) * dt;
    const double j = src.current(t_half);
    if (j != 0.0) solver.inject(src.polarization, I0, J0, j);
    ++n;
    const double t = n * dt;
    solver.accumulate(result.field, std::polar(dt, omega * t));

    if (n % check_every == 0 || (stop.fixed_steps > 0 && n == stop.fixed_steps)) {
      const double we = solver.electric_energy();
      const double total = we + solver.magnetic_energy();
      if (!std::isfinite(total)) throw SolverError("field became non-finite");
      peak = std::max(peak, total);
      result.final_energy = total;
      if (settings.record_energy) result.energy.push_back({n, t, we, total});
      if (stop.fixed_steps == 0 && t > src.cutoff && total < stop.energy_decay * peak) {
        done = true;
      }
    }
  }
  result.steps = n;
  result.peak_energy = peak;
  if (!result.field.all_finite()) throw SolverError("non-finite DFT field");
  return result;
}

}  // namespace gshape
