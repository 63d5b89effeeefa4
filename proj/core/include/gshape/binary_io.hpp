#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "gshape/grid.hpp"

namespace gshape::io {

using Magic = std::array<char, 4>;

inline constexpr Magic kMaterialMagic{'G', 'S', 'H', 'M'};
inline constexpr Magic kFieldMagic{'G', 'S', 'H', 'F'};
inline constexpr Magic kLevelSetMagic{'G', 'S', 'H', 'L'};
inline constexpr Magic kVelocityMagic{'G', 'S', 'H', 'V'};
inline constexpr std::uint32_t kFormatVersion = 1;
inline constexpr std::size_t kHeaderBytes = 24;

struct Container {
  Magic magic{};
  Grid2D grid;
  std::vector<double> values;  // row-major, x fastest; components interleaved
};

/// Number of doubles stored per cell for a given magic (4 for fields, else 1).
std::size_t components_for(const Magic& magic);

// Layout: magic[4], u32 version, u32 nx, u32 ny, f64 h, then nx*ny*components
// little-endian f64 values.
void write_container(const std::filesystem::path& path, const Magic& magic, const Grid2D& grid,
                     std::span<const double> values);

/// Reads any known container. Throws FormatError on a bad header or size.
Container read_container(const std::filesystem::path& path);

/// Reads a container and requires a specific magic.
Container read_container(const std::filesystem::path& path, const Magic& expected);

/// Plain CSV dump: header row, one line per cell (i, j, x, y, values...).
void write_csv(const std::filesystem::path& path, const Container& container);

}  // namespace gshape::io
