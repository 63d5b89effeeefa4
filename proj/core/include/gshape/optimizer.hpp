#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gshape/levelset.hpp"
#include "gshape/merit.hpp"

namespace gshape {

struct OptimizeConfig {
  double extent_x = 7.0;
  double extent_y = 7.0;
  int resolution = 20;
  double wavelength = 2.0;
  double eps_in = 12.0;
  double eps_out = 1.0;
  DipoleSpec donor{{-2.0, 0.0}};
  DipoleSpec acceptor{{2.0, 0.0}};
  ShapeSpec initial = Cylinder{{0.0, 0.0}, 1.0};
  double step_size = 0.1;  // maximal boundary displacement per iteration, um
  /// Where max|v| = 1 is enforced: over every cell outside the dipole
  /// exclusion zones, or on the interface cells only (every iteration then
  /// moves the boundary by the full step; faster but it oscillates sooner).
  enum class VelocityScale { domain, interface };
  VelocityScale velocity_scale = VelocityScale::domain;
  int max_iterations = 300;
  int stall_iterations = 0;  // 0 disables the plateau rule
  /// Curvature penalty. `tau` (>= 0) is the maximal |v_Gamma| relative to the
  /// unit merit velocity.
  std::optional<CurvatureConstraint> constraint;
  double exclusion_radius = 0.0;  // <= 0 selects 2h
  GreensSettings greens;
  AdvectOptions advect;
  ReinitOptions reinit;
  int snapshot_every = 1;
  bool save_velocity = false;
  bool save_fields = false;  // permittivity and both Green's columns at snapshot iterations
  std::filesystem::path cache_dir;  // empty: free-space reference is not cached on disk

  Grid2D grid() const;
  double omega() const;
  double exclusion() const;
};

/// Throws InvalidArgument on an unusable config; returns advisory warnings.
std::vector<std::string> validate(const OptimizeConfig& cfg);

struct IterationRecord {
  int iteration = 0;
  double gamma = 0.0;
  double q = 0.0;
  double predicted_df = 0.0;
  double wall_ms = 0.0;
};

enum class RunStatus { completed, plateau, stalled };

struct RunHistory {
  std::vector<IterationRecord> records;
  double gamma0 = 0.0;
  int best_iteration = 0;
  double best_q = 0.0;
  RunStatus status = RunStatus::completed;
  LevelSetField best_phi;
  LevelSetField final_phi;

  /// Number of sign changes in the sequence of consecutive Q differences.
  int q_sign_changes() const;
};

using IterationObserver = std::function<void(const IterationRecord&)>;

/// Free-space transfer rate for the config's grid, wavelength and dipoles,
/// read from / written to cfg.cache_dir when set.
double freespace_gamma(const OptimizeConfig& cfg);

/// Runs the shape optimization loop. When out_dir is non-empty it receives
/// history.csv, phi_%05d.gshl (+ vel_%05d.gshv) snapshots and best.txt; the
/// directory must already exist. Solver errors propagate with everything
/// written so far left in place.
RunHistory optimize(const OptimizeConfig& cfg, const std::filesystem::path& out_dir = {},
                    const IterationObserver& observer = {});

/// Q of a fixed level set under the config's materials and dipoles.
MeritReport q_of_shape(const OptimizeConfig& cfg, const LevelSetField& phi);

/// Q of a fixed permittivity map.
MeritReport q_of_shape(const OptimizeConfig& cfg, const MaterialMap& material);

/// "<prefix>_%05d.<ext>": phi -> gshl, vel -> gshv, eps -> gshm, anything else -> gshf.
std::string snapshot_name(const char* prefix, int iteration);

}  // namespace gshape
