#include <CLI11.hpp>
#include <iostream>
#include <sstream>

#include "gshape_cli/commands.hpp"

int main(int argc, char** argv) {
  namespace cli = gshape::cli;
  CLI::App app{"Green's-function shape optimization for resonance energy transfer"};
  app.require_subcommand(1);

  std::string config, out_dir, input, output, parameter;
  std::vector<std::string> values;
  bool force = false, quiet = false, contour = false;
  int resolution = 20, jobs = 1;
  double wavelength = 2.0, separation = 4.0;

  auto* optimize = app.add_subcommand("optimize", "run the shape optimization loop");
  optimize->add_option("-c,--config", config, "config file")->required()->check(CLI::ExistingFile);
  optimize->add_option("-o,--out", out_dir, "run directory")->required();
  optimize->add_flag("--force", force, "overwrite an existing run directory");
  optimize->add_flag("-q,--quiet", quiet, "no per-iteration log");

  auto* validate = app.add_subcommand("validate", "compare FDTD against the free-space oracle");
  validate->add_option("-r,--resolution", resolution, "cells per um")->capture_default_str();
  validate->add_option("-l,--wavelength", wavelength, "um")->capture_default_str();
  validate->add_option("-s,--separation", separation, "dipole separation, um")
      ->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "one run per parameter value plus sweep.csv");
  sweep->add_option("-c,--config", config, "base config file")->required()->check(CLI::ExistingFile);
  sweep->add_option("-p,--parameter", parameter, "resolution or step_size")->required();
  sweep->add_option("-v,--values", values, "values to sweep")->required()->delimiter(',');
  sweep->add_option("-o,--out", out_dir, "sweep root directory")->required();
  sweep->add_option("-j,--jobs", jobs, "concurrent run processes")->capture_default_str();
  sweep->add_flag("--force", force, "overwrite an existing sweep directory");

  auto* rate = app.add_subcommand("rate", "Q of a saved level-set snapshot");
  rate->add_option("snapshot", input, "phi_*.gshl file")->required();
  rate->add_option("-c,--config", config, "config file")->required()->check(CLI::ExistingFile);

  auto* exporter = app.add_subcommand("export", "binary snapshot to CSV");
  exporter->add_option("input", input, "snapshot file")->required();
  exporter->add_option("output", output, "CSV file")->required();
  exporter->add_flag("--contour", contour, "write the zero contour as polylines");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : cli::kFailure;
  }

  std::ostringstream sink;
  if (*optimize) {
    return cli::cmd_optimize(config, out_dir, force, quiet ? sink : std::cout, std::cerr);
  }
  if (*validate) return cli::cmd_validate(resolution, wavelength, separation, std::cout, std::cerr);
  if (*sweep) {
    return cli::cmd_sweep(config, parameter, values, out_dir, jobs, force, "/proc/self/exe",
                          std::cout, std::cerr);
  }
  if (*rate) return cli::cmd_rate(input, config, std::cout, std::cerr);
  return cli::cmd_export(input, output, contour, std::cerr);
}
