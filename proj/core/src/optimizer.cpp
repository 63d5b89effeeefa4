#include "gshape/optimizer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iomanip>
#include <sstream>

#include "gshape/binary_io.hpp"
#include "gshape/error.hpp"
#include "gshape/material.hpp"

namespace gshape {
namespace {

std::string hex(double v) {
  std::ostringstream os;
  os << std::hexfloat << v;
  return os.str();
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string reference_key(const OptimizeConfig& cfg) {
  std::ostringstream os;
  const Grid2D g = cfg.grid();
  os << "grid " << g.nx() << ' ' << g.ny() << ' ' << g.resolution() << " lambda "
     << hex(cfg.wavelength) << " eps " << hex(cfg.eps_out);
  for (const DipoleSpec* d : {&cfg.donor, &cfg.acceptor}) {
    os << " dipole " << hex(d->position.x) << ' ' << hex(d->position.y);
    for (const Complex& m : d->moment) os << ' ' << hex(m.real()) << ' ' << hex(m.imag());
  }
  const SolverSettings& s = cfg.greens.solver;
  os << " solver " << hex(s.courant) << ' ' << s.pml_cells << ' ' << hex(s.pml_reflection) << ' '
     << hex(s.stop.energy_decay) << ' ' << s.stop.max_steps << ' ' << hex(cfg.greens.width_periods);
  return os.str();
}

struct Evaluation {
  double gamma = 0.0;
  Mat2 g_ad{};
  GreensColumn adjoint;
  GreensColumn forward;
};

Evaluation evaluate(const GreensMerit& merit, const MaterialMap& material, double omega,
                    const GreensSettings& settings) {
  const CVec2 adj_moment = merit.adjoint_moment();
  const CVec2 fwd_moment = merit.forward_moment();
  auto adjoint = std::async(std::launch::async, [&] {
    return greens_columns(material, merit.adjoint_point(), adj_moment, omega, settings);
  });
  const SourceColumns forward =
      greens_columns(material, merit.forward_point(), fwd_moment, omega, settings);
  Evaluation e;
  e.g_ad = forward.tensor(merit.adjoint_point());
  e.gamma = merit.value(e.g_ad);
  e.forward = forward.combined(fwd_moment);
  e.adjoint = adjoint.get().combined(adj_moment);
  return e;
}

class RunWriter {
 public:
  explicit RunWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
    if (dir_.empty()) return;
    history_.open(dir_ / "history.csv", std::ios::trunc);
    if (!history_) throw std::runtime_error("cannot write " + (dir_ / "history.csv").string());
    history_.imbue(std::locale::classic());
    history_ << "iter,gamma,Q,predicted_dF,wall_ms\n" << std::flush;
  }

  bool enabled() const { return !dir_.empty(); }

  void record(const IterationRecord& r) {
    if (!enabled()) return;
    history_ << r.iteration << ',' << std::setprecision(17) << r.gamma << ',' << r.q << ','
             << r.predicted_df << ',' << std::setprecision(6) << r.wall_ms << '\n'
             << std::flush;
  }

  void snapshot(const io::Magic& magic, const char* prefix, int iteration, const CellField& f) {
    if (!enabled()) return;
    io::write_container(dir_ / snapshot_name(prefix, iteration), magic, f.grid(), f.values());
  }

  void snapshot(const char* prefix, int iteration, const ComplexFieldMap& f) {
    if (!enabled()) return;
    io::write_container(dir_ / snapshot_name(prefix, iteration), io::kFieldMagic, f.grid(),
                        f.interleaved_cells());
  }

  void best(int iteration, double q) {
    if (!enabled()) return;
    std::ofstream out(dir_ / "best.txt", std::ios::trunc);
    out.imbue(std::locale::classic());
    out << "iteration = " << iteration << '\n' << "q = " << std::setprecision(17) << q << '\n';
  }

 private:
  std::filesystem::path dir_;
  std::ofstream history_;
};

}  // namespace

Grid2D OptimizeConfig::grid() const { return make_grid(extent_x, extent_y, resolution); }

double OptimizeConfig::omega() const { return units::angular_frequency(wavelength); }

double OptimizeConfig::exclusion() const {
  return exclusion_radius > 0.0 ? exclusion_radius : 2.0 / resolution;
}

std::vector<std::string> validate(const OptimizeConfig& cfg) {
  std::vector<std::string> warnings;
  const Grid2D grid = cfg.grid();
  const double h = grid.h();
  if (!(cfg.wavelength > 0.0) || !std::isfinite(cfg.wavelength)) {
    throw InvalidArgument("wavelength must be positive");
  }
  if (!(cfg.eps_in >= 1.0) || !(cfg.eps_out >= 1.0) || !std::isfinite(cfg.eps_in) ||
      !std::isfinite(cfg.eps_out)) {
    throw InvalidArgument("permittivities must be real, finite and >= 1");
  }
  for (const auto& [name, d] : {std::pair{"donor", &cfg.donor}, std::pair{"acceptor", &cfg.acceptor}}) {
    const double n = std::sqrt(std::norm(d->moment[0]) + std::norm(d->moment[1]));
    if (!(n > 0.0) || !std::isfinite(n)) {
      throw InvalidArgument(std::string(name) + " moment must be nonzero");
    }
    const auto node = grid.node_at(d->position);
    if (!node) throw InvalidArgument(std::string(name) + " position is not on a grid node");
    if (node->i < 1 || node->j < 1 || node->i >= grid.nx() || node->j >= grid.ny()) {
      throw InvalidArgument(std::string(name) + " must lie strictly inside the domain");
    }
  }
  if (!(norm(cfg.donor.position - cfg.acceptor.position) > cfg.wavelength / 4.0)) {
    throw InvalidArgument("dipoles must be separated by more than a quarter wavelength");
  }
  if (!(cfg.step_size >= h / 4.0 - 1e-12 && cfg.step_size <= 5.0 * h + 1e-12)) {
    throw InvalidArgument("step size must lie within [h/4, 5h]");
  }
  if (cfg.step_size < 0.025 - 1e-12 || cfg.step_size > 0.25 + 1e-12) {
    warnings.push_back("step size outside the tested range 0.025-0.25 um");
  }
  if (cfg.max_iterations < 0) throw InvalidArgument("max_iterations must be >= 0");
  if (cfg.stall_iterations < 0) throw InvalidArgument("stall_iterations must be >= 0");
  if (cfg.snapshot_every < 1) throw InvalidArgument("snapshot_every must be >= 1");
  if (cfg.exclusion_radius < 0.0) throw InvalidArgument("exclusion radius must be >= 0");
  if (cfg.constraint) {
    const CurvatureConstraint& c = *cfg.constraint;
    if (!(c.tau >= 0.0) || !std::isfinite(c.tau)) {
      throw InvalidArgument("constraint tau must be finite and >= 0");
    }
    if (!(c.sigma > 0.0)) throw InvalidArgument("constraint sigma must be positive");
    if (!(c.kappa0 >= 0.0)) throw InvalidArgument("constraint kappa0 must be >= 0");
  }
  const SolverSettings& s = cfg.greens.solver;
  cfl_timestep(grid, s.courant);
  if (s.pml_cells < 0) throw InvalidArgument("pml_cells must be >= 0");
  if (!(s.pml_reflection > 0.0 && s.pml_reflection < 1.0)) {
    throw InvalidArgument("pml_reflection must lie in (0, 1)");
  }
  if (!(s.stop.energy_decay > 0.0 && s.stop.energy_decay < 1.0)) {
    throw InvalidArgument("energy_decay must lie in (0, 1)");
  }
  if (s.stop.max_steps < 1) throw InvalidArgument("max_steps must be positive");
  if (!(cfg.greens.width_periods > 0.0)) throw InvalidArgument("source width must be positive");
  if (!(cfg.advect.cfl > 0.0 && cfg.advect.cfl <= 1.0)) {
    throw InvalidArgument("advection CFL must lie in (0, 1]");
  }
  init_shape(cfg.initial, grid);
  return warnings;
}

int RunHistory::q_sign_changes() const {
  int changes = 0;
  int last = 0;
  for (std::size_t k = 1; k < records.size(); ++k) {
    const double dq = records[k].q - records[k - 1].q;
    const int sign = dq > 0.0 ? 1 : (dq < 0.0 ? -1 : 0);
    if (sign == 0) continue;
    if (last != 0 && sign != last) ++changes;
    last = sign;
  }
  return changes;
}

std::string snapshot_name(const char* prefix, int iteration) {
  char buf[64];
  const std::string p = prefix;
  const char* ext = p == "vel" ? "gshv" : p == "eps" ? "gshm" : p == "phi" ? "gshl" : "gshf";
  std::snprintf(buf, sizeof buf, "%s_%05d.%s", prefix, iteration, ext);
  return buf;
}

double freespace_gamma(const OptimizeConfig& cfg) {
  const std::string key = reference_key(cfg);
  std::filesystem::path file;
  if (!cfg.cache_dir.empty()) {
    std::ostringstream name;
    name << "gamma0_" << std::hex << std::setw(16) << std::setfill('0') << fnv1a(key) << ".txt";
    file = cfg.cache_dir / name.str();
    std::ifstream in(file);
    std::string stored_key, value;
    if (in && std::getline(in, stored_key) && std::getline(in, value) && stored_key == key) {
      return std::strtod(value.c_str(), nullptr);
    }
  }
  const RetMerit merit(cfg.acceptor, cfg.donor, cfg.omega());
  const MaterialMap vacuum = uniform_material(cfg.grid(), cfg.eps_out);
  const Mat2 g = greens_columns(vacuum, merit.forward_point(), merit.forward_moment(), cfg.omega(),
                                cfg.greens)
                     .tensor(merit.adjoint_point());
  const double gamma0 = merit.value(g);
  if (!file.empty()) {
    std::filesystem::create_directories(cfg.cache_dir);
    std::ofstream out(file, std::ios::trunc);
    out << key << '\n' << hex(gamma0) << '\n';
  }
  return gamma0;
}

MeritReport q_of_shape(const OptimizeConfig& cfg, const MaterialMap& material) {
  if (!(material.grid() == cfg.grid())) throw InvalidArgument("material grid differs from config");
  const RetMerit merit(cfg.acceptor, cfg.donor, cfg.omega());
  const Mat2 g = greens_columns(material, merit.forward_point(), merit.forward_moment(),
                                cfg.omega(), cfg.greens)
                     .tensor(merit.adjoint_point());
  MeritReport r;
  r.gamma = merit.value(g);
  r.gamma0 = freespace_gamma(cfg);
  r.q = purcell_q(r.gamma, r.gamma0);
  return r;
}

MeritReport q_of_shape(const OptimizeConfig& cfg, const LevelSetField& phi) {
  return q_of_shape(cfg, rasterize(phi, cfg.grid(), cfg.eps_in, cfg.eps_out));
}

RunHistory optimize(const OptimizeConfig& cfg, const std::filesystem::path& out_dir,
                    const IterationObserver& observer) {
  validate(cfg);
  const Grid2D grid = cfg.grid();
  const double omega = cfg.omega();
  const RetMerit merit(cfg.acceptor, cfg.donor, omega);
  const Vec2 dipoles[2] = {cfg.donor.position, cfg.acceptor.position};
  RunWriter writer(out_dir);

  RunHistory hist;
  hist.gamma0 = freespace_gamma(cfg);
  LevelSetField phi = init_shape(cfg.initial, grid);
  hist.best_q = -1.0;

  for (int k = 0;; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    const MaterialMap material = rasterize(phi, cfg.eps_in, cfg.eps_out);
    Evaluation e;
    try {
      e = evaluate(merit, material, omega, cfg.greens);
    } catch (const SolverError&) {
      // Keep the shape that broke the solver for inspection.
      writer.snapshot(io::kLevelSetMagic, "phi", k, phi);
      throw;
    }

    IterationRecord rec;
    rec.iteration = k;
    rec.gamma = e.gamma;
    rec.q = purcell_q(e.gamma, hist.gamma0);

    std::optional<VelocityField> v;
    std::optional<VelocityField> v_merit;
    try {
      v_merit = normalize_and_mask(merit.velocity(e.adjoint, e.forward, e.g_ad), dipoles,
                                   cfg.exclusion());
      if (cfg.constraint && cfg.constraint->tau != 0.0) {
        VelocityField vc = constraint_velocity(phi, *cfg.constraint);
        const double m = vc.max_abs();
        CellField total = *v_merit;
        if (m > 0.0) {
          const double scale = cfg.constraint->tau / m;
          auto t = total.values();
          auto c = vc.values();
          for (std::size_t n = 0; n < t.size(); ++n) t[n] += scale * c[n];
        }
        v = normalize_and_mask(total, dipoles, cfg.exclusion());
      } else {
        v = v_merit;
      }
      if (cfg.velocity_scale == OptimizeConfig::VelocityScale::interface) {
        v = normalize_on_interface(*v, phi);
      }
      rec.predicted_df = predicted_gain(*v, phi, cfg.step_size);
    } catch (const StalledError&) {
      hist.status = RunStatus::stalled;
    }
    rec.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    hist.records.push_back(rec);
    writer.record(rec);
    const bool improved = rec.q > hist.best_q;
    if (improved) {
      hist.best_q = rec.q;
      hist.best_iteration = k;
      hist.best_phi = phi;
    }
    if (k % cfg.snapshot_every == 0 || improved) {
      writer.snapshot(io::kLevelSetMagic, "phi", k, phi);
      if (cfg.save_velocity && v_merit) writer.snapshot(io::kVelocityMagic, "vel", k, *v_merit);
      if (cfg.save_fields) {
        writer.snapshot(io::kMaterialMagic, "eps", k, material);
        writer.snapshot("fwd", k, e.forward.field);
        writer.snapshot("adj", k, e.adjoint.field);
      }
    }
    if (improved) writer.best(k, rec.q);
    if (observer) observer(rec);

    if (hist.status == RunStatus::stalled) break;
    if (k >= cfg.max_iterations) break;
    if (cfg.stall_iterations > 0 && k - hist.best_iteration >= cfg.stall_iterations) {
      hist.status = RunStatus::plateau;
      break;
    }
    phi = reinitialize(advect(phi, *v, cfg.step_size, cfg.advect), cfg.reinit);
  }
  hist.final_phi = phi;
  return hist;
}

}  // namespace gshape
