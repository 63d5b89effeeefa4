#pragma once

#include <filesystem>
#include <string>

#include "gshape/optimizer.hpp"

namespace gshape::cli {

/// Parses a sectioned key/value config. Missing keys keep their defaults;
/// unknown sections or keys, malformed numbers and invalid values throw
/// InvalidArgument. Relative shape.file and optimizer.cache_dir paths resolve
/// against `base`; load_config uses the config file's directory.
OptimizeConfig parse_config(const std::string& text, const std::filesystem::path& base = {});
OptimizeConfig load_config(const std::filesystem::path& path);

/// Canonical echo: every key in a fixed order, doubles in %.17g, so that
/// parse_config(echo_config(c)) reproduces c bit for bit.
std::string echo_config(const OptimizeConfig& cfg);

/// Applies one "section.key=value" override on top of the text of a config.
OptimizeConfig with_override(const OptimizeConfig& cfg, const std::string& dotted_key,
                             const std::string& value);

}  // namespace gshape::cli
