#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gshape/binary_io.hpp"
#include "gshape/error.hpp"
#include "gshape_cli/commands.hpp"
#include "gshape_cli/config.hpp"

using namespace gshape;
using namespace gshape::cli;

namespace {

std::filesystem::path temp(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("gshape_cli_" + name);
}

std::filesystem::path write_file(const std::string& name, const std::string& text) {
  const auto p = temp(name);
  std::ofstream(p, std::ios::trunc) << text;
  return p;
}

const char* kSmall = R"([grid]
resolution = 10
[physics]
eps_in = 2
[optimizer]
max_iterations = 1
)";

}  // namespace

TEST_CASE("config parsing") {
  SUBCASE("defaults") {
    const OptimizeConfig cfg = parse_config("");
    CHECK(cfg.resolution == 20);
    CHECK(cfg.eps_in == 12.0);
    CHECK(std::holds_alternative<Cylinder>(cfg.initial));
    CHECK_FALSE(cfg.constraint.has_value());
  }

  SUBCASE("values") {
    const OptimizeConfig cfg = parse_config(R"(
[donor]
x = -1.5
mx_re = 1
my_im = 1
[shape]
type = two_bars
gap = 1.5
[constraint]
tau = 0.5
mode = thresholded
kappa0 = 3
[solver]
eno2 = true
)");
    CHECK(cfg.donor.position.x == -1.5);
    CHECK(std::abs(cfg.donor.moment[1] - Complex(0.0, 1.0 / std::sqrt(2.0))) < 1e-15);
    REQUIRE(std::holds_alternative<TwoBars>(cfg.initial));
    CHECK(std::get<TwoBars>(cfg.initial).gap == 1.5);
    REQUIRE(cfg.constraint.has_value());
    CHECK(cfg.constraint->mode == CurvatureConstraint::Mode::thresholded);
    CHECK(cfg.constraint->kappa0 == 3.0);
    CHECK(cfg.advect.eno2);
  }

  SUBCASE("rejections") {
    CHECK_THROWS_AS(parse_config("[grid]\nresolutoin = 10\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("[gird]\nresolution = 10\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("[grid]\nresolution = ten\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("[physics]\nwavelength = 2um\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("[shape]\ntype = cylinder\ngap = 1\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("[shape]\ntype = star\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("[donor]\nx = -2.03\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("[solver]\neno2 = maybe\n"), InvalidArgument);
  }
}

TEST_CASE("relative paths resolve against the config file") {
  const auto dir = temp("relative");
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "run.ini", std::ios::trunc) << kSmall << "cache_dir = ref\n";
  const OptimizeConfig cfg = load_config(dir / "run.ini");
  CHECK(cfg.cache_dir == std::filesystem::absolute(dir) / "ref");
  CHECK(parse_config(echo_config(cfg)).cache_dir == cfg.cache_dir);
}

TEST_CASE("canonical echo round trips bit exactly") {
  OptimizeConfig cfg = parse_config("[grid]\nresolution = 10\n");
  cfg.step_size = 0.1 + 0.2;
  cfg.wavelength = 2.0000000000000004;
  cfg.greens.solver.pml_reflection = 1.2345678901234567e-9;
  cfg.constraint = CurvatureConstraint{0.3, 0.02, CurvatureConstraint::Mode::localized, 0.0};
  cfg.initial = Waveguide{{0.1, -1.0}, 5.0, 0.4};
  const std::string text = echo_config(cfg);
  const OptimizeConfig back = parse_config(text);
  CHECK(back.step_size == cfg.step_size);
  CHECK(back.wavelength == cfg.wavelength);
  CHECK(back.greens.solver.pml_reflection == cfg.greens.solver.pml_reflection);
  CHECK(back.constraint->tau == 0.3);
  CHECK(std::get<Waveguide>(back.initial).center.x == 0.1);
  CHECK(echo_config(back) == text);

  SUBCASE("override one key") {
    const OptimizeConfig o = with_override(cfg, "optimizer.step_size", "0.25");
    CHECK(o.step_size == 0.25);
    CHECK(o.wavelength == cfg.wavelength);
    CHECK_THROWS_AS(with_override(cfg, "optimizer.nope", "1"), InvalidArgument);
  }
}

TEST_CASE("optimize command") {
  std::ostringstream out, err;

  SUBCASE("off-grid dipole is an invalid config and leaves no run directory") {
    const auto cfg = write_file("offgrid.ini", "[donor]\nx = -2.01\n");
    const auto dir = temp("offgrid_run");
    std::filesystem::remove_all(dir);
    CHECK(cmd_optimize(cfg, dir, false, out, err) == kInvalidConfig);
    CHECK_FALSE(std::filesystem::exists(dir));
  }

  SUBCASE("completes, then refuses to overwrite without force") {
    const auto cfg = write_file("small.ini", kSmall);
    const auto dir = temp("small_run");
    std::filesystem::remove_all(dir);
    REQUIRE(cmd_optimize(cfg, dir, false, out, err) == kOk);
    CHECK(std::filesystem::exists(dir / "best.txt"));
    CHECK(std::filesystem::exists(dir / "config.snapshot"));
    CHECK(cmd_optimize(cfg, dir, false, out, err) == kFailure);
    CHECK(cmd_optimize(cfg, dir, true, out, err) == kOk);

    SUBCASE("rate replays the history") {
      std::ostringstream rate;
      REQUIRE(cmd_rate(dir / "phi_00001.gshl", dir / "config.snapshot", rate, err) == kOk);
      std::istringstream lines(rate.str());
      std::string header, row;
      std::getline(lines, header);
      std::getline(lines, row);
      CHECK(header == "gamma,gamma0,Q");
      const double q = std::stod(row.substr(row.rfind(',') + 1));
      std::ifstream best(dir / "best.txt");
      std::string l1, l2;
      std::getline(best, l1);
      std::getline(best, l2);
      CHECK(q == doctest::Approx(std::stod(l2.substr(l2.find('=') + 1))).epsilon(0.01));
    }

    SUBCASE("corrupted snapshot") {
      const auto bad = temp("bad.gshl");
      std::filesystem::copy_file(dir / "phi_00000.gshl", bad,
                                 std::filesystem::copy_options::overwrite_existing);
      std::fstream(bad, std::ios::in | std::ios::out | std::ios::binary).write("ABCD", 4);
      CHECK(cmd_rate(bad, dir / "config.snapshot", out, err) == kFormatError);
      CHECK(cmd_export(bad, temp("bad.csv"), false, err) == kFormatError);
    }

    SUBCASE("export") {
      REQUIRE(cmd_export(dir / "phi_00000.gshl", temp("phi.csv"), false, err) == kOk);
      std::ifstream csv(temp("phi.csv"));
      std::string header;
      std::getline(csv, header);
      CHECK(header == "i,j,x,y,phi");
      REQUIRE(cmd_export(dir / "phi_00000.gshl", temp("contour.csv"), true, err) == kOk);
      std::ifstream contour(temp("contour.csv"));
      std::getline(contour, header);
      CHECK(header == "polyline,x,y");
    }
  }
}

TEST_CASE("free-space snapshot rates Q = 1") {
  std::ostringstream out, err;
  const auto cfg = write_file("vacuum.ini", "[grid]\nresolution = 10\n[physics]\neps_in = 1\n");
  const Grid2D g = make_grid(7.0, 7.0, 10);
  std::vector<double> phi(g.cell_count(), 1.0);
  phi[g.index(35, 35)] = -1.0;
  io::write_container(temp("vacuum.gshl"), io::kLevelSetMagic, g, phi);
  REQUIRE(cmd_rate(temp("vacuum.gshl"), cfg, out, err) == kOk);
  const std::string row = out.str().substr(out.str().find('\n') + 1);
  CHECK(std::stod(row.substr(row.rfind(',') + 1)) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("validate command") {
  std::ostringstream out, err;
  CHECK(cmd_validate(20, 2.0, 0.0, out, err) == kInvalidConfig);
  CHECK(cmd_validate(10, 2.0, 4.0, out, err) == kOk);
  CHECK(out.str().rfind("separation,component,fdtd_re", 0) == 0);
}

TEST_CASE("sweep command") {
  std::ostringstream out, err;
  const auto cfg = write_file("sweep.ini", kSmall);
  const auto root = temp("sweep");
  std::filesystem::remove_all(root);
  CHECK(cmd_sweep(cfg, "step_size", {}, root, 1, false, "", out, err) == kInvalidConfig);
  CHECK(cmd_sweep(cfg, "courant", {"0.3"}, root, 1, false, "", out, err) == kInvalidConfig);
  REQUIRE(cmd_sweep(cfg, "step_size", {"0.05", "0.2"}, root, 1, false, "", out, err) == kOk);
  CHECK(std::filesystem::exists(root / "step_size_0.05" / "history.csv"));
  CHECK(std::filesystem::exists(root / "step_size_0.2" / "history.csv"));
  std::ifstream csv(root / "sweep.csv");
  std::string line;
  std::getline(csv, line);
  CHECK(line == "value,iteration,Q");
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  CHECK(rows == 4);
}
