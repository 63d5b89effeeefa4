#include "gshape_cli/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "gshape/binary_io.hpp"
#include "gshape/error.hpp"

namespace gshape::cli {
namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"grid", {"extent_x", "extent_y", "resolution"}},
      {"physics", {"wavelength", "eps_in", "eps_out"}},
      {"donor", {"x", "y", "mx_re", "mx_im", "my_re", "my_im"}},
      {"acceptor", {"x", "y", "mx_re", "mx_im", "my_re", "my_im"}},
      {"shape",
       {"type", "cx", "cy", "radius", "width", "height", "length", "thickness", "gap", "file"}},
      {"optimizer",
       {"step_size", "max_iterations", "stall_iterations", "exclusion_radius", "snapshot_every",
        "save_velocity", "save_fields", "cache_dir", "velocity_scale"}},
      {"constraint", {"enabled", "tau", "sigma", "mode", "kappa0"}},
      {"solver",
       {"courant", "pml_cells", "pml_reflection", "energy_decay", "max_steps",
        "source_width_periods", "eno2", "advect_cfl", "reinit_band"}},
  };
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  std::optional<std::string> raw(const std::string& section, const std::string& key) const {
    const auto sec = tree_.get_child_optional(section);
    if (!sec) return std::nullopt;
    const auto v = sec->get_optional<std::string>(key);
    if (!v) return std::nullopt;
    return trim(*v);
  }

  void read(const std::string& section, const std::string& key, double& out) const {
    if (const auto v = raw(section, key)) {
      double x = 0.0;
      const auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), x);
      if (ec != std::errc{} || p != v->data() + v->size() || !std::isfinite(x)) {
        throw InvalidArgument(section + "." + key + ": not a finite number: '" + *v + "'");
      }
      out = x;
    }
  }

  template <class Int>
  void read_int(const std::string& section, const std::string& key, Int& out) const {
    if (const auto v = raw(section, key)) {
      Int x = 0;
      const auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), x);
      if (ec != std::errc{} || p != v->data() + v->size()) {
        throw InvalidArgument(section + "." + key + ": not an integer: '" + *v + "'");
      }
      out = x;
    }
  }

  void read(const std::string& section, const std::string& key, bool& out) const {
    if (const auto v = raw(section, key)) {
      if (*v == "true" || *v == "1") {
        out = true;
      } else if (*v == "false" || *v == "0") {
        out = false;
      } else {
        throw InvalidArgument(section + "." + key + ": expected true or false");
      }
    }
  }

 private:
  const pt::ptree& tree_;
};

void check_schema(const pt::ptree& tree) {
  for (const auto& [section, body] : tree) {
    const auto it = schema().find(section);
    if (it == schema().end()) throw InvalidArgument("unknown config section [" + section + "]");
    if (!body.data().empty()) throw InvalidArgument("top-level key '" + section + "' is not allowed");
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) {
        throw InvalidArgument("unknown config key " + section + "." + key);
      }
    }
  }
}

DipoleSpec read_dipole(const Reader& r, const std::string& section, const DipoleSpec& defaults) {
  Vec2 pos = defaults.position;
  double m[4] = {defaults.moment[0].real(), defaults.moment[0].imag(), defaults.moment[1].real(),
                 defaults.moment[1].imag()};
  r.read(section, "x", pos.x);
  r.read(section, "y", pos.y);
  r.read(section, "mx_re", m[0]);
  r.read(section, "mx_im", m[1]);
  r.read(section, "my_re", m[2]);
  r.read(section, "my_im", m[3]);
  return DipoleSpec::make(pos, {Complex{m[0], m[1]}, Complex{m[2], m[3]}});
}

ShapeSpec read_shape(const Reader& r, const Grid2D& grid, const std::filesystem::path& base) {
  const std::string type = r.raw("shape", "type").value_or("cylinder");
  const std::map<std::string, std::set<std::string>> allowed{
      {"cylinder", {"cx", "cy", "radius"}},
      {"wall", {"cx", "cy", "width", "height"}},
      {"waveguide", {"cx", "cy", "length", "thickness"}},
      {"two_bars", {"cx", "cy", "length", "thickness", "gap"}},
      {"custom", {"file"}},
  };
  const auto it = allowed.find(type);
  if (it == allowed.end()) throw InvalidArgument("unknown shape type '" + type + "'");
  for (const std::string& key : schema().at("shape")) {
    if (key != "type" && r.raw("shape", key) && !it->second.count(key)) {
      throw InvalidArgument("shape." + key + " does not apply to shape type " + type);
    }
  }
  auto center = [&](Vec2 c) {
    r.read("shape", "cx", c.x);
    r.read("shape", "cy", c.y);
    return c;
  };
  if (type == "cylinder") {
    Cylinder s;
    s.center = center(s.center);
    r.read("shape", "radius", s.radius);
    return s;
  }
  if (type == "wall") {
    Wall s;
    s.center = center(s.center);
    r.read("shape", "width", s.width);
    r.read("shape", "height", s.height);
    return s;
  }
  if (type == "waveguide") {
    Waveguide s;
    s.center = center(s.center);
    r.read("shape", "length", s.length);
    r.read("shape", "thickness", s.thickness);
    return s;
  }
  if (type == "two_bars") {
    TwoBars s;
    s.center = center(s.center);
    r.read("shape", "length", s.length);
    r.read("shape", "thickness", s.thickness);
    r.read("shape", "gap", s.gap);
    return s;
  }
  const auto file = r.raw("shape", "file");
  if (!file) throw InvalidArgument("shape.file is required for a custom shape");
  const std::filesystem::path path = base / *file;
  const io::Container c = io::read_container(path, io::kLevelSetMagic);
  if (!(c.grid == grid)) throw InvalidArgument("custom shape grid does not match [grid]");
  return CustomShape{LevelSetField(c.grid, c.values), path};
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string flag(bool b) { return b ? "true" : "false"; }

void echo_dipole(std::ostream& os, const char* name, const DipoleSpec& d) {
  os << '[' << name << "]\n"
     << "x = " << num(d.position.x) << "\ny = " << num(d.position.y)
     << "\nmx_re = " << num(d.moment[0].real()) << "\nmx_im = " << num(d.moment[0].imag())
     << "\nmy_re = " << num(d.moment[1].real()) << "\nmy_im = " << num(d.moment[1].imag())
     << "\n\n";
}

}  // namespace

OptimizeConfig parse_config(const std::string& text, const std::filesystem::path& base) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw InvalidArgument(std::string("config syntax: ") + e.what());
  }
  check_schema(tree);
  const Reader r(tree);
  OptimizeConfig cfg;

  r.read("grid", "extent_x", cfg.extent_x);
  r.read("grid", "extent_y", cfg.extent_y);
  r.read_int("grid", "resolution", cfg.resolution);
  r.read("physics", "wavelength", cfg.wavelength);
  r.read("physics", "eps_in", cfg.eps_in);
  r.read("physics", "eps_out", cfg.eps_out);
  cfg.donor = read_dipole(r, "donor", cfg.donor);
  cfg.acceptor = read_dipole(r, "acceptor", cfg.acceptor);

  r.read("optimizer", "step_size", cfg.step_size);
  r.read_int("optimizer", "max_iterations", cfg.max_iterations);
  r.read_int("optimizer", "stall_iterations", cfg.stall_iterations);
  r.read("optimizer", "exclusion_radius", cfg.exclusion_radius);
  r.read_int("optimizer", "snapshot_every", cfg.snapshot_every);
  r.read("optimizer", "save_velocity", cfg.save_velocity);
  r.read("optimizer", "save_fields", cfg.save_fields);
  const std::string scale = r.raw("optimizer", "velocity_scale").value_or("domain");
  if (scale == "interface") {
    cfg.velocity_scale = OptimizeConfig::VelocityScale::interface;
  } else if (scale == "domain") {
    cfg.velocity_scale = OptimizeConfig::VelocityScale::domain;
  } else {
    throw InvalidArgument("optimizer.velocity_scale must be interface or domain");
  }
  if (const auto dir = r.raw("optimizer", "cache_dir")) cfg.cache_dir = base / *dir;

  bool constrained = tree.get_child_optional("constraint").has_value();
  r.read("constraint", "enabled", constrained);
  if (constrained) {
    CurvatureConstraint c;
    r.read("constraint", "tau", c.tau);
    r.read("constraint", "sigma", c.sigma);
    r.read("constraint", "kappa0", c.kappa0);
    const std::string mode = r.raw("constraint", "mode").value_or("localized");
    if (mode == "localized") {
      c.mode = CurvatureConstraint::Mode::localized;
    } else if (mode == "thresholded") {
      c.mode = CurvatureConstraint::Mode::thresholded;
    } else {
      throw InvalidArgument("constraint.mode must be localized or thresholded");
    }
    cfg.constraint = c;
  }

  SolverSettings& s = cfg.greens.solver;
  r.read("solver", "courant", s.courant);
  r.read_int("solver", "pml_cells", s.pml_cells);
  r.read("solver", "pml_reflection", s.pml_reflection);
  r.read("solver", "energy_decay", s.stop.energy_decay);
  r.read_int("solver", "max_steps", s.stop.max_steps);
  r.read("solver", "source_width_periods", cfg.greens.width_periods);
  r.read("solver", "eno2", cfg.advect.eno2);
  r.read("solver", "advect_cfl", cfg.advect.cfl);
  r.read("solver", "reinit_band", cfg.reinit.band);

  if (cfg.resolution < 4) throw InvalidArgument("grid.resolution must be >= 4");
  if (!(cfg.extent_x > 0.0 && cfg.extent_y > 0.0)) {
    throw InvalidArgument("grid extents must be positive");
  }
  cfg.initial = read_shape(r, cfg.grid(), base);
  validate(cfg);
  return cfg;
}

OptimizeConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), std::filesystem::absolute(path).parent_path());
}

std::string echo_config(const OptimizeConfig& cfg) {
  std::ostringstream os;
  os << "[grid]\nextent_x = " << num(cfg.extent_x) << "\nextent_y = " << num(cfg.extent_y)
     << "\nresolution = " << cfg.resolution << "\n\n";
  os << "[physics]\nwavelength = " << num(cfg.wavelength) << "\neps_in = " << num(cfg.eps_in)
     << "\neps_out = " << num(cfg.eps_out) << "\n\n";
  echo_dipole(os, "donor", cfg.donor);
  echo_dipole(os, "acceptor", cfg.acceptor);

  os << "[shape]\n";
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, CustomShape>) {
          if (s.origin.empty()) throw InvalidArgument("custom shape has no source file to echo");
          os << "type = custom\nfile = " << s.origin.string() << '\n';
        } else {
          os << "cx = " << num(s.center.x) << "\ncy = " << num(s.center.y) << '\n';
          if constexpr (std::is_same_v<T, Cylinder>) {
            os << "type = cylinder\nradius = " << num(s.radius) << '\n';
          } else if constexpr (std::is_same_v<T, Wall>) {
            os << "type = wall\nwidth = " << num(s.width) << "\nheight = " << num(s.height)
               << '\n';
          } else if constexpr (std::is_same_v<T, Waveguide>) {
            os << "type = waveguide\nlength = " << num(s.length)
               << "\nthickness = " << num(s.thickness) << '\n';
          } else {
            os << "type = two_bars\nlength = " << num(s.length)
               << "\nthickness = " << num(s.thickness) << "\ngap = " << num(s.gap) << '\n';
          }
        }
      },
      cfg.initial);
  os << '\n';

  os << "[optimizer]\nstep_size = " << num(cfg.step_size)
     << "\nmax_iterations = " << cfg.max_iterations
     << "\nstall_iterations = " << cfg.stall_iterations
     << "\nexclusion_radius = " << num(cfg.exclusion_radius)
     << "\nsnapshot_every = " << cfg.snapshot_every
     << "\nsave_velocity = " << flag(cfg.save_velocity)
     << "\nsave_fields = " << flag(cfg.save_fields) << "\nvelocity_scale = "
     << (cfg.velocity_scale == OptimizeConfig::VelocityScale::interface ? "interface" : "domain");
  if (!cfg.cache_dir.empty()) os << "\ncache_dir = " << cfg.cache_dir.string();
  os << "\n\n";

  os << "[constraint]\nenabled = " << flag(cfg.constraint.has_value()) << '\n';
  if (cfg.constraint) {
    const CurvatureConstraint& c = *cfg.constraint;
    os << "tau = " << num(c.tau) << "\nsigma = " << num(c.sigma) << "\nmode = "
       << (c.mode == CurvatureConstraint::Mode::localized ? "localized" : "thresholded")
       << "\nkappa0 = " << num(c.kappa0) << '\n';
  }
  os << '\n';

  const SolverSettings& s = cfg.greens.solver;
  os << "[solver]\ncourant = " << num(s.courant) << "\npml_cells = " << s.pml_cells
     << "\npml_reflection = " << num(s.pml_reflection)
     << "\nenergy_decay = " << num(s.stop.energy_decay) << "\nmax_steps = " << s.stop.max_steps
     << "\nsource_width_periods = " << num(cfg.greens.width_periods)
     << "\neno2 = " << flag(cfg.advect.eno2) << "\nadvect_cfl = " << num(cfg.advect.cfl)
     << "\nreinit_band = " << num(cfg.reinit.band) << '\n';
  return os.str();
}

OptimizeConfig with_override(const OptimizeConfig& cfg, const std::string& dotted_key,
                             const std::string& value) {
  const auto dot = dotted_key.find('.');
  if (dot == std::string::npos) throw InvalidArgument("override key must be section.key");
  const std::string section = dotted_key.substr(0, dot);
  const std::string key = dotted_key.substr(dot + 1);
  pt::ptree tree;
  std::istringstream in(echo_config(cfg));
  pt::ini_parser::read_ini(in, tree);
  tree.put(pt::ptree::path_type(section + "/" + key, '/'), value);
  std::ostringstream out;
  pt::ini_parser::write_ini(out, tree);
  return parse_config(out.str());
}

}  // namespace gshape::cli
