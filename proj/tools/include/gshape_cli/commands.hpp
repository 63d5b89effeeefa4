#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "gshape/greens.hpp"

namespace gshape::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,  // usage, I/O or a failed check
  kInvalidConfig = 2,
  kSolverError = 3,
  kStalled = 4,
  kFormatError = 5,
};

/// One Green's tensor component compared with the analytic free-space value.
struct OracleRow {
  std::string component;  // "xx", "xy", "yx", "yy"
  Complex fdtd;
  Complex oracle;
  double modulus_error = 0.0;  // relative; see phase_checked
  double phase_error_deg = 0.0;
  /// False for components that vanish analytically; their modulus error is
  /// then |fdtd - oracle| / max|G| and no phase is compared.
  bool phase_checked = true;
};

/// Free-space G(acceptor, donor) from FDTD vs the Hankel-function oracle with
/// the dipoles at (-separation/2, 0) and (separation/2, 0) on a square domain
/// of side separation + 1.5 wavelength.
std::vector<OracleRow> compare_to_oracle(int resolution, double wavelength, double separation,
                                         const GreensSettings& settings = {});

int cmd_optimize(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
                 bool force, std::ostream& out, std::ostream& err);

int cmd_validate(int resolution, double wavelength, double separation, std::ostream& out,
                 std::ostream& err);

/// `self_exe` is used to spawn one process per run when jobs > 1.
int cmd_sweep(const std::filesystem::path& config_path, const std::string& parameter,
              const std::vector<std::string>& values, const std::filesystem::path& out_root,
              int jobs, bool force, const std::filesystem::path& self_exe, std::ostream& out,
              std::ostream& err);

int cmd_rate(const std::filesystem::path& phi_path, const std::filesystem::path& config_path,
             std::ostream& out, std::ostream& err);

/// Binary snapshot to CSV grid; with `contour`, a level set is written as
/// marching-squares polylines (polyline,x,y) instead.
int cmd_export(const std::filesystem::path& input, const std::filesystem::path& output,
               bool contour, std::ostream& err);

}  // namespace gshape::cli
