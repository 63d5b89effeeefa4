#include "gshape_cli/commands.hpp"

#include <spawn.h>
#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>

#include "gshape/binary_io.hpp"
#include "gshape/contour.hpp"
#include "gshape/error.hpp"
#include "gshape/material.hpp"
#include "gshape_cli/config.hpp"

extern char** environ;

namespace gshape::cli {
namespace {

bool has_entries(const std::filesystem::path& dir) {
  return std::filesystem::exists(dir) &&
         (!std::filesystem::is_directory(dir) || !std::filesystem::is_empty(dir));
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::string run_label(const std::string& parameter, const std::string& value) {
  std::string v = value;
  std::replace(v.begin(), v.end(), '/', '_');
  return parameter + "_" + v;
}

int spawn_optimize(const std::filesystem::path& self, const std::filesystem::path& config,
                   const std::filesystem::path& dir, pid_t& pid) {
  std::vector<std::string> args{self.string(), "optimize", "--config", config.string(),
                                "--out",       dir.string(), "--force", "--quiet"};
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);
  return posix_spawn(&pid, self.c_str(), nullptr, nullptr, argv.data(), environ);
}

}  // namespace

std::vector<OracleRow> compare_to_oracle(int resolution, double wavelength, double separation,
                                         const GreensSettings& settings) {
  if (!(separation > 0.0)) throw InvalidArgument("separation must be positive");
  if (!(wavelength > 0.0)) throw InvalidArgument("wavelength must be positive");
  const double extent = separation + 1.5 * wavelength;
  const Grid2D grid = make_grid(extent, extent, resolution);
  const Vec2 donor{-separation / 2.0, 0.0};
  const Vec2 acceptor{separation / 2.0, 0.0};
  if (!grid.node_at(donor) || !grid.node_at(acceptor)) {
    throw InvalidArgument("separation/2 must be a multiple of the cell size");
  }
  const double omega = units::angular_frequency(wavelength);
  const MaterialMap vacuum = uniform_material(grid, 1.0);
  const SourceColumns cols =
      greens_columns(vacuum, donor, {Complex{1.0}, Complex{1.0}}, omega, settings);
  const Mat2 g = cols.tensor(acceptor);
  const Mat2 ref = analytic_freespace_g2d(acceptor, donor, omega);

  double scale = 0.0;
  for (const auto& row : ref) {
    for (const Complex& v : row) scale = std::max(scale, std::abs(v));
  }
  std::vector<OracleRow> rows;
  const char* names[2][2] = {{"xx", "xy"}, {"yx", "yy"}};
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      OracleRow r;
      r.component = names[a][b];
      r.fdtd = g[a][b];
      r.oracle = ref[a][b];
      if (std::abs(r.oracle) > 1e-6 * scale) {
        r.modulus_error = std::abs(std::abs(r.fdtd) - std::abs(r.oracle)) / std::abs(r.oracle);
        r.phase_error_deg = std::abs(std::arg(r.fdtd / r.oracle)) * 180.0 / std::numbers::pi;
      } else {
        r.phase_checked = false;
        r.modulus_error = std::abs(r.fdtd - r.oracle) / scale;
      }
      rows.push_back(r);
    }
  }
  return rows;
}

int cmd_optimize(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
                 bool force, std::ostream& out, std::ostream& err) {
  OptimizeConfig cfg;
  try {
    cfg = load_config(config_path);
    for (const std::string& w : validate(cfg)) err << "warning: " << w << '\n';
  } catch (const InvalidArgument& e) {
    err << "invalid config: " << e.what() << '\n';
    return kInvalidConfig;
  }
  if (has_entries(out_dir) && !force) {
    err << "refusing to overwrite " << out_dir.string() << " (use --force)\n";
    return kFailure;
  }
  try {
    if (force && std::filesystem::exists(out_dir)) std::filesystem::remove_all(out_dir);
    std::filesystem::create_directories(out_dir);
    write_text(out_dir / "config.snapshot", echo_config(cfg));
    const RunHistory hist = optimize(cfg, out_dir, [&](const IterationRecord& r) {
      out << "iter " << r.iteration << "  gamma " << std::setprecision(6) << r.gamma << "  Q "
          << r.q << "  dF " << r.predicted_df << "  " << std::setprecision(4) << r.wall_ms
          << " ms\n"
          << std::flush;
    });
    out << "best iteration " << hist.best_iteration << "  Q " << std::setprecision(6)
        << hist.best_q << '\n';
    if (hist.status == RunStatus::stalled) {
      err << "stalled: merit velocity vanished at iteration " << hist.records.back().iteration
          << '\n';
      return kStalled;
    }
    return kOk;
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << '\n';
    return kSolverError;
  } catch (const InvalidArgument& e) {
    err << "invalid config: " << e.what() << '\n';
    return kInvalidConfig;
  }
}

int cmd_validate(int resolution, double wavelength, double separation, std::ostream& out,
                 std::ostream& err) {
  std::vector<OracleRow> rows;
  try {
    rows = compare_to_oracle(resolution, wavelength, separation);
  } catch (const InvalidArgument& e) {
    err << "invalid input: " << e.what() << '\n';
    return kInvalidConfig;
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << '\n';
    return kSolverError;
  }
  out << "separation,component,fdtd_re,fdtd_im,oracle_re,oracle_im,modulus_error,phase_error_deg\n";
  bool ok = true;
  for (const OracleRow& r : rows) {
    out << std::setprecision(10) << separation << ',' << r.component << ',' << r.fdtd.real() << ',' << r.fdtd.imag()
        << ',' << r.oracle.real() << ',' << r.oracle.imag() << ',' << r.modulus_error << ',';
    if (r.phase_checked) out << r.phase_error_deg;
    out << '\n';
    ok = ok && r.modulus_error <= 0.05;
  }
  if (!ok && resolution >= 20) {
    err << "modulus error above 5% at resolution " << resolution << '\n';
    return kFailure;
  }
  return kOk;
}

int cmd_sweep(const std::filesystem::path& config_path, const std::string& parameter,
              const std::vector<std::string>& values, const std::filesystem::path& out_root,
              int jobs, bool force, const std::filesystem::path& self_exe, std::ostream& out,
              std::ostream& err) {
  std::string key;
  if (parameter == "resolution") {
    key = "grid.resolution";
  } else if (parameter == "step_size") {
    key = "optimizer.step_size";
  } else {
    err << "sweep parameter must be resolution or step_size\n";
    return kInvalidConfig;
  }
  if (values.empty()) {
    err << "empty sweep value list\n";
    return kInvalidConfig;
  }
  std::vector<OptimizeConfig> configs;
  try {
    const OptimizeConfig base = load_config(config_path);
    for (const std::string& v : values) configs.push_back(with_override(base, key, v));
  } catch (const InvalidArgument& e) {
    err << "invalid config: " << e.what() << '\n';
    return kInvalidConfig;
  }
  if (has_entries(out_root) && !force) {
    err << "refusing to overwrite " << out_root.string() << " (use --force)\n";
    return kFailure;
  }
  if (force && std::filesystem::exists(out_root)) std::filesystem::remove_all(out_root);
  std::filesystem::create_directories(out_root);

  std::vector<std::filesystem::path> dirs;
  std::vector<int> codes(values.size(), kOk);
  for (std::size_t n = 0; n < values.size(); ++n) {
    const std::string label = run_label(parameter, values[n]);
    dirs.push_back(out_root / label);
    write_text(out_root / (label + ".ini"), echo_config(configs[n]));
  }

  if (jobs <= 1) {
    std::ostringstream quiet;
    for (std::size_t n = 0; n < values.size(); ++n) {
      out << "run " << dirs[n].filename().string() << '\n' << std::flush;
      codes[n] = cmd_optimize(out_root / (dirs[n].filename().string() + ".ini"), dirs[n], true,
                              quiet, err);
    }
  } else {
    std::vector<std::pair<pid_t, std::size_t>> running;
    std::size_t next = 0;
    while (next < values.size() || !running.empty()) {
      while (next < values.size() && static_cast<int>(running.size()) < jobs) {
        pid_t pid = 0;
        const auto ini = out_root / (dirs[next].filename().string() + ".ini");
        if (spawn_optimize(self_exe, ini, dirs[next], pid) != 0) {
          err << "cannot spawn run " << dirs[next].string() << '\n';
          codes[next] = kFailure;
        } else {
          out << "run " << dirs[next].filename().string() << '\n' << std::flush;
          running.emplace_back(pid, next);
        }
        ++next;
      }
      if (running.empty()) continue;
      int status = 0;
      const pid_t done = waitpid(-1, &status, 0);
      const auto it = std::find_if(running.begin(), running.end(),
                                   [&](const auto& r) { return r.first == done; });
      if (it == running.end()) continue;
      codes[it->second] = WIFEXITED(status) ? WEXITSTATUS(status) : kFailure;
      running.erase(it);
    }
  }

  std::ofstream csv(out_root / "sweep.csv", std::ios::trunc);
  csv << "value,iteration,Q\n";
  int worst = kOk;
  for (std::size_t n = 0; n < values.size(); ++n) {
    if (codes[n] != kOk) {
      err << "run " << dirs[n].filename().string() << " failed with exit code " << codes[n]
          << '\n';
      worst = kFailure;
    }
    std::ifstream hist(dirs[n] / "history.csv");
    std::string line;
    std::getline(hist, line);
    while (std::getline(hist, line)) {
      std::istringstream fields(line);
      std::string iter, gamma, q;
      std::getline(fields, iter, ',');
      std::getline(fields, gamma, ',');
      std::getline(fields, q, ',');
      csv << values[n] << ',' << iter << ',' << q << '\n';
    }
  }
  return worst;
}

int cmd_rate(const std::filesystem::path& phi_path, const std::filesystem::path& config_path,
             std::ostream& out, std::ostream& err) {
  OptimizeConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const InvalidArgument& e) {
    err << "invalid config: " << e.what() << '\n';
    return kInvalidConfig;
  }
  try {
    const io::Container c = io::read_container(phi_path, io::kLevelSetMagic);
    const MeritReport r = q_of_shape(cfg, LevelSetField(c.grid, c.values));
    out << "gamma,gamma0,Q\n"
        << std::setprecision(17) << r.gamma << ',' << r.gamma0 << ',' << r.q << '\n';
    return kOk;
  } catch (const FormatError& e) {
    err << "bad snapshot: " << e.what() << '\n';
    return kFormatError;
  } catch (const InvalidArgument& e) {
    err << "invalid input: " << e.what() << '\n';
    return kInvalidConfig;
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << '\n';
    return kSolverError;
  }
}

int cmd_export(const std::filesystem::path& input, const std::filesystem::path& output,
               bool contour, std::ostream& err) {
  try {
    const io::Container c = io::read_container(input);
    if (!contour) {
      io::write_csv(output, c);
      return kOk;
    }
    if (c.magic != io::kLevelSetMagic) {
      err << "contour export needs a level-set snapshot\n";
      return kFormatError;
    }
    std::ofstream csv(output, std::ios::trunc);
    csv << "polyline,x,y\n" << std::setprecision(17);
    const auto lines = zero_polylines(LevelSetField(c.grid, c.values));
    for (std::size_t n = 0; n < lines.size(); ++n) {
      for (const Vec2& p : lines[n]) csv << n << ',' << p.x << ',' << p.y << '\n';
    }
    if (!csv) throw std::runtime_error("cannot write " + output.string());
    return kOk;
  } catch (const FormatError& e) {
    err << "bad snapshot: " << e.what() << '\n';
    return kFormatError;
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace gshape::cli
