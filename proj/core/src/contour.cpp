#include "gshape/contour.hpp"

#include <algorithm>
#include <array>
#include <unordered_map>

namespace gshape {
namespace {

// A crossing on a lattice edge, identified so that neighbouring squares agree.
struct EdgePoint {
  std::size_t edge;
  Vec2 p;
};

struct SquareSegment {
  EdgePoint a;
  EdgePoint b;
};

bool inside(double v) { return v < 0.0; }

Vec2 lerp(Vec2 p, Vec2 q, double fp, double fq) {
  const double t = fp / (fp - fq);
  return p + t * (q - p);
}

template <class Emit>
void march(const LevelSetField& phi, Emit&& emit) {
  const Grid2D& g = phi.grid();
  for (int j = 0; j + 1 < g.ny(); ++j) {
    for (int i = 0; i + 1 < g.nx(); ++i) {
      const double f00 = phi(i, j);
      const double f10 = phi(i + 1, j);
      const double f11 = phi(i + 1, j + 1);
      const double f01 = phi(i, j + 1);
      const int mask = (inside(f00) ? 1 : 0) | (inside(f10) ? 2 : 0) | (inside(f11) ? 4 : 0) |
                       (inside(f01) ? 8 : 0);
      if (mask == 0 || mask == 15) continue;

      const Vec2 p00 = g.cell_center(i, j);
      const Vec2 p10 = g.cell_center(i + 1, j);
      const Vec2 p11 = g.cell_center(i + 1, j + 1);
      const Vec2 p01 = g.cell_center(i, j + 1);
      // Edge ids: bottom/top are +x edges of (i,j)/(i,j+1); left/right are +y edges of (i,j)/(i+1,j).
      std::array<EdgePoint, 4> e{};
      std::array<bool, 4> has{};
      if (inside(f00) != inside(f10)) { e[0] = {2 * g.index(i, j), lerp(p00, p10, f00, f10)}; has[0] = true; }
      if (inside(f10) != inside(f11)) { e[1] = {2 * g.index(i + 1, j) + 1, lerp(p10, p11, f10, f11)}; has[1] = true; }
      if (inside(f01) != inside(f11)) { e[2] = {2 * g.index(i, j + 1), lerp(p01, p11, f01, f11)}; has[2] = true; }
      if (inside(f00) != inside(f01)) { e[3] = {2 * g.index(i, j) + 1, lerp(p00, p01, f00, f01)}; has[3] = true; }

      const int count = has[0] + has[1] + has[2] + has[3];
      if (count == 2) {
        int first = -1, second = -1;
        for (int k = 0; k < 4; ++k) {
          if (!has[k]) continue;
          (first < 0 ? first : second) = k;
        }
        emit(i, j, SquareSegment{e[first], e[second]});
      } else if (count == 4) {
        const double mean = 0.25 * (f00 + f10 + f11 + f01);
        if (inside(mean) == inside(f00)) {
          // f00 and f11 connected through the centre: cut off corners 10 and 01.
          emit(i, j, SquareSegment{e[0], e[1]});
          emit(i, j, SquareSegment{e[2], e[3]});
        } else {
          emit(i, j, SquareSegment{e[0], e[3]});
          emit(i, j, SquareSegment{e[1], e[2]});
        }
      }
    }
  }
}

double bilinear(const CellField& f, int i, int j, Vec2 p) {
  const Grid2D& g = f.grid();
  const Vec2 o = g.cell_center(i, j);
  const double s = (p.x - o.x) / g.h();
  const double t = (p.y - o.y) / g.h();
  return (1 - s) * (1 - t) * f(i, j) + s * (1 - t) * f(i + 1, j) + s * t * f(i + 1, j + 1) +
         (1 - s) * t * f(i, j + 1);
}

}  // namespace

std::vector<Segment> zero_contour(const LevelSetField& phi) {
  std::vector<Segment> out;
  march(phi, [&](int, int, const SquareSegment& s) { out.push_back({s.a.p, s.b.p}); });
  return out;
}

std::vector<std::vector<Vec2>> zero_polylines(const LevelSetField& phi) {
  std::vector<SquareSegment> segs;
  march(phi, [&](int, int, const SquareSegment& s) { segs.push_back(s); });

  std::unordered_map<std::size_t, std::vector<std::size_t>> by_edge;
  for (std::size_t k = 0; k < segs.size(); ++k) {
    by_edge[segs[k].a.edge].push_back(k);
    by_edge[segs[k].b.edge].push_back(k);
  }
  std::vector<bool> used(segs.size(), false);
  const auto next_from = [&](std::size_t edge, std::size_t current) -> long {
    for (std::size_t k : by_edge[edge]) {
      if (k != current && !used[k]) return static_cast<long>(k);
    }
    return -1;
  };
  // Walk from a segment end, appending points until the chain stops.
  const auto extend = [&](std::vector<Vec2>& line, std::size_t seg, std::size_t edge) {
    long cur = static_cast<long>(seg);
    std::size_t at = edge;
    while (true) {
      const long nxt = next_from(at, static_cast<std::size_t>(cur));
      if (nxt < 0) break;
      used[nxt] = true;
      const SquareSegment& s = segs[nxt];
      const bool forward = s.a.edge == at;
      line.push_back(forward ? s.b.p : s.a.p);
      at = forward ? s.b.edge : s.a.edge;
      cur = nxt;
    }
  };

  std::vector<std::vector<Vec2>> lines;
  for (std::size_t k = 0; k < segs.size(); ++k) {
    if (used[k]) continue;
    used[k] = true;
    std::vector<Vec2> fwd{segs[k].a.p, segs[k].b.p};
    extend(fwd, k, segs[k].b.edge);
    std::vector<Vec2> back;
    extend(back, k, segs[k].a.edge);
    std::vector<Vec2> line(back.rbegin(), back.rend());
    line.insert(line.end(), fwd.begin(), fwd.end());
    lines.push_back(std::move(line));
  }
  return lines;
}

double perimeter(const LevelSetField& phi) {
  double total = 0.0;
  march(phi, [&](int, int, const SquareSegment& s) { total += norm(s.b.p - s.a.p); });
  return total;
}

double enclosed_area(const LevelSetField& phi) {
  const double h = phi.grid().h();
  double area = 0.0;
  for (double v : phi.values()) area += std::clamp(0.5 - v / h, 0.0, 1.0);
  return area * h * h;
}

double contour_integral(const LevelSetField& phi, const CellField& f) {
  double total = 0.0;
  march(phi, [&](int i, int j, const SquareSegment& s) {
    const Vec2 mid = 0.5 * (s.a.p + s.b.p);
    total += bilinear(f, i, j, mid) * norm(s.b.p - s.a.p);
  });
  return total;
}

std::vector<Crossing> grid_crossings(const LevelSetField& phi) {
  const Grid2D& g = phi.grid();
  std::vector<Crossing> out;
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const double f = phi(i, j);
      const Vec2 p = g.cell_center(i, j);
      if (i + 1 < g.nx() && inside(f) != inside(phi(i + 1, j))) {
        const double t = f / (f - phi(i + 1, j));
        out.push_back({2 * g.index(i, j), p.x + t * g.h()});
      }
      if (j + 1 < g.ny() && inside(f) != inside(phi(i, j + 1))) {
        const double t = f / (f - phi(i, j + 1));
        out.push_back({2 * g.index(i, j) + 1, p.y + t * g.h()});
      }
    }
  }
  return out;
}

}  // namespace gshape
