#include "gshape/binary_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "gshape/error.hpp"

namespace gshape::io {
namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xFFu));
}

void put_f64(std::string& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xFFu));
}

std::uint32_t get_u32(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int b = 3; b >= 0; --b) v = (v << 8) | p[b];
  return v;
}

double get_f64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int b = 7; b >= 0; --b) v = (v << 8) | p[b];
  return std::bit_cast<double>(v);
}

bool known_magic(const Magic& m) {
  return m == kMaterialMagic || m == kFieldMagic || m == kLevelSetMagic || m == kVelocityMagic;
}

std::string magic_string(const Magic& m) { return std::string(m.data(), m.size()); }

}  // namespace

std::size_t components_for(const Magic& magic) { return magic == kFieldMagic ? 4 : 1; }

void write_container(const std::filesystem::path& path, const Magic& magic, const Grid2D& grid,
                     std::span<const double> values) {
  if (values.size() != grid.cell_count() * components_for(magic)) {
    throw InvalidArgument("container payload does not match grid size");
  }
  std::string buf;
  buf.reserve(kHeaderBytes + 8 * values.size());
  buf.append(magic.data(), magic.size());
  put_u32(buf, kFormatVersion);
  put_u32(buf, static_cast<std::uint32_t>(grid.nx()));
  put_u32(buf, static_cast<std::uint32_t>(grid.ny()));
  put_f64(buf, grid.h());
  for (double v : values) put_f64(buf, v);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Container read_container(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < kHeaderBytes) throw FormatError(path.string() + ": truncated header");

  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  Container c;
  std::memcpy(c.magic.data(), p, 4);
  if (!known_magic(c.magic)) throw FormatError(path.string() + ": unknown magic");
  if (get_u32(p + 4) != kFormatVersion) {
    throw FormatError(path.string() + ": unsupported container version");
  }
  const auto nx = get_u32(p + 8);
  const auto ny = get_u32(p + 12);
  const double h = get_f64(p + 16);
  if (!(h > 0.0) || !std::isfinite(h)) throw FormatError(path.string() + ": bad cell size");
  const double res = 1.0 / h;
  const long resolution = std::lround(res);
  if (std::abs(res - static_cast<double>(resolution)) > 1e-9 * res) {
    throw FormatError(path.string() + ": cell size is not 1/integer");
  }
  try {
    c.grid = Grid2D::from_cells(static_cast<int>(nx), static_cast<int>(ny),
                                static_cast<int>(resolution));
  } catch (const InvalidArgument& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  const std::size_t count = c.grid.cell_count() * components_for(c.magic);
  if (bytes.size() != kHeaderBytes + 8 * count) {
    throw FormatError(path.string() + ": payload size does not match header");
  }
  c.values.resize(count);
  for (std::size_t k = 0; k < count; ++k) c.values[k] = get_f64(p + kHeaderBytes + 8 * k);
  return c;
}

Container read_container(const std::filesystem::path& path, const Magic& expected) {
  Container c = read_container(path);
  if (c.magic != expected) {
    throw FormatError(path.string() + ": expected magic " + magic_string(expected) + ", found " +
                      magic_string(c.magic));
  }
  return c;
}

void write_csv(const std::filesystem::path& path, const Container& c) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.imbue(std::locale::classic());
  const std::size_t ncomp = components_for(c.magic);
  out << "i,j,x,y";
  if (ncomp == 4) {
    out << ",re_ex,im_ex,re_ey,im_ey\n";
  } else if (c.magic == kMaterialMagic) {
    out << ",eps\n";
  } else if (c.magic == kLevelSetMagic) {
    out << ",phi\n";
  } else {
    out << ",v\n";
  }
  out << std::setprecision(17);
  for (int j = 0; j < c.grid.ny(); ++j) {
    for (int i = 0; i < c.grid.nx(); ++i) {
      const Vec2 p = c.grid.cell_center(i, j);
      out << i << ',' << j << ',' << p.x << ',' << p.y;
      const std::size_t base = c.grid.index(i, j) * ncomp;
      for (std::size_t k = 0; k < ncomp; ++k) out << ',' << c.values[base + k];
      out << '\n';
    }
  }
}

}  // namespace gshape::io
