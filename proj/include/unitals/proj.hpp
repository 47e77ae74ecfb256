#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "unitals/gf.hpp"

namespace unitals {

/// Point of PG(2, K) in homogeneous coordinates, stored as the canonical
/// representative with leftmost nonzero coordinate equal to 1. Equality is
/// then plain coordinate comparison.
struct ProjPoint {
  Fe x, y, z;

  friend bool operator==(const ProjPoint& a, const ProjPoint& b) {
    return a.x == b.x && a.y == b.y && a.z == b.z;
  }
  friend bool operator!=(const ProjPoint& a, const ProjPoint& b) {
    return !(a == b);
  }
  /// Packed coordinate codes; doubles as the canonical sort key.
  uint64_t key() const {
    return (uint64_t(x.code) << 32) | (uint64_t(y.code) << 16) | z.code;
  }
  friend bool operator<(const ProjPoint& a, const ProjPoint& b) {
    return a.key() < b.key();
  }
};

/// Line of PG(2, K) with dual coordinates (a, b, c); a point (X, Y, Z) is
/// incident iff aX + bY + cZ = 0. Normalized like points.
struct ProjLine {
  Fe a, b, c;

  friend bool operator==(const ProjLine& l, const ProjLine& m) {
    return l.a == m.a && l.b == m.b && l.c == m.c;
  }
  friend bool operator!=(const ProjLine& l, const ProjLine& m) {
    return !(l == m);
  }
  uint64_t key() const {
    return (uint64_t(a.code) << 32) | (uint64_t(b.code) << 16) | c.code;
  }
};

/// 3x3 matrix acting on column coordinate vectors, modulo scalars. The
/// canonical representative scales the first nonzero entry in row-major
/// order to 1.
struct ProjectiveMap {
  std::array<std::array<Fe, 3>, 3> m;

  friend bool operator==(const ProjectiveMap& a, const ProjectiveMap& b) {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (a.m[i][j] != b.m[i][j]) return false;
    return true;
  }
};

ProjPoint make_point(Fe x, Fe y, Fe z);
ProjLine make_line(Fe a, Fe b, Fe c);

ProjLine join(const ProjPoint& p, const ProjPoint& q);
ProjPoint meet(const ProjLine& l, const ProjLine& m);
bool incident(const ProjPoint& p, const ProjLine& l);

/// All q^2+q+1 points of PG(2, K) in canonical order.
std::vector<ProjPoint> enumerate_points(const FieldRef& field);
std::vector<ProjLine> enumerate_lines(const FieldRef& field);

/// The q+1 points incident with a line, in canonical order.
std::vector<ProjPoint> points_on_line(const FieldRef& field, const ProjLine& l);

Fe det3(const std::array<std::array<Fe, 3>, 3>& m);
ProjectiveMap normalize_map(std::array<std::array<Fe, 3>, 3> m);
ProjectiveMap identity_map(const FieldRef& field);
ProjectiveMap compose(const ProjectiveMap& a, const ProjectiveMap& b);
ProjectiveMap inverse(const ProjectiveMap& a);
ProjPoint apply(const ProjectiveMap& m, const ProjPoint& p);

/// The unique projective map sending the source quadrangle to the
/// destination quadrangle (fundamental theorem of projective planes).
/// Rejects degenerate quadruples, naming a collinear triple.
ProjectiveMap map_from_frames(const std::array<ProjPoint, 4>& src,
                              const std::array<ProjPoint, 4>& dst);

bool is_quadrangle(const std::array<ProjPoint, 4>& pts);

}  // namespace unitals
