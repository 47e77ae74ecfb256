#include "unitals/proj.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace unitals {

namespace {

std::array<Fe, 3> normalize3(Fe x, Fe y, Fe z) {
  const FieldData* f = x.field;
  Fe* first = nullptr;
  if (!x.is_zero()) first = &x;
  else if (!y.is_zero()) first = &y;
  else if (!z.is_zero()) first = &z;
  if (!first) throw std::invalid_argument("all homogeneous coordinates are zero");
  Fe s = f->inv(*first);
  return {x * s, y * s, z * s};
}

std::string point_str(const ProjPoint& p) {
  std::ostringstream os;
  os << "[" << p.x.code << "," << p.y.code << "," << p.z.code << "]";
  return os.str();
}

}  // namespace

ProjPoint make_point(Fe x, Fe y, Fe z) {
  auto n = normalize3(x, y, z);
  return {n[0], n[1], n[2]};
}

ProjLine make_line(Fe a, Fe b, Fe c) {
  auto n = normalize3(a, b, c);
  return {n[0], n[1], n[2]};
}

ProjLine join(const ProjPoint& p, const ProjPoint& q) {
  if (p == q) throw std::invalid_argument("join of equal points");
  Fe a = p.y * q.z - p.z * q.y;
  Fe b = p.z * q.x - p.x * q.z;
  Fe c = p.x * q.y - p.y * q.x;
  return make_line(a, b, c);
}

ProjPoint meet(const ProjLine& l, const ProjLine& m) {
  if (l == m) throw std::invalid_argument("meet of equal lines");
  Fe x = l.b * m.c - l.c * m.b;
  Fe y = l.c * m.a - l.a * m.c;
  Fe z = l.a * m.b - l.b * m.a;
  return make_point(x, y, z);
}

bool incident(const ProjPoint& p, const ProjLine& l) {
  return (l.a * p.x + l.b * p.y + l.c * p.z).is_zero();
}

std::vector<ProjPoint> enumerate_points(const FieldRef& field) {
  // Emitted directly in canonical (x, y, z) code order.
  std::vector<ProjPoint> pts;
  uint32_t n = field->order;
  pts.reserve(uint64_t(n) * n + n + 1);
  Fe one = field->one();
  pts.push_back({field->zero(), field->zero(), one});
  for (uint32_t z = 0; z < n; ++z)
    pts.push_back({field->zero(), one, field->element(z)});
  for (uint32_t y = 0; y < n; ++y)
    for (uint32_t z = 0; z < n; ++z)
      pts.push_back({one, field->element(y), field->element(z)});
  return pts;
}

std::vector<ProjLine> enumerate_lines(const FieldRef& field) {
  std::vector<ProjLine> ls;
  uint32_t n = field->order;
  ls.reserve(uint64_t(n) * n + n + 1);
  Fe one = field->one();
  ls.push_back({field->zero(), field->zero(), one});
  for (uint32_t c = 0; c < n; ++c)
    ls.push_back({field->zero(), one, field->element(c)});
  for (uint32_t b = 0; b < n; ++b)
    for (uint32_t c = 0; c < n; ++c)
      ls.push_back({one, field->element(b), field->element(c)});
  return ls;
}

std::vector<ProjPoint> points_on_line(const FieldRef& field, const ProjLine& l) {
  // Two distinct points span the line; parametrize as p + lambda*q plus q.
  Fe zero = field->zero(), one = field->one();
  std::array<ProjPoint, 3> basis = {ProjPoint{one, zero, zero},
                                    ProjPoint{zero, one, zero},
                                    ProjPoint{zero, zero, one}};
  // Seed with coordinate-triangle vertices on the line, then with meets of
  // the line with triangle sides.
  std::vector<ProjPoint> seed;
  for (auto& e : basis)
    if (incident(e, l)) seed.push_back(e);
  if (seed.size() < 2) {
    std::array<ProjLine, 3> sides = {ProjLine{one, zero, zero},
                                     ProjLine{zero, one, zero},
                                     ProjLine{zero, zero, one}};
    for (auto& s : sides) {
      if (s == l) continue;
      ProjPoint m = meet(l, s);
      bool dup = false;
      for (auto& t : seed) dup |= (t == m);
      if (!dup) seed.push_back(m);
      if (seed.size() == 2) break;
    }
  }
  ProjPoint p = seed[0];
  ProjPoint q = seed[1];

  std::vector<ProjPoint> pts;
  pts.reserve(field->order + 1);
  pts.push_back(make_point(q.x, q.y, q.z));
  for (uint32_t c = 0; c < field->order; ++c) {
    Fe lam = field->element(c);
    pts.push_back(make_point(p.x + lam * q.x, p.y + lam * q.y, p.z + lam * q.z));
  }
  std::sort(pts.begin(), pts.end());
  return pts;
}

Fe det3(const std::array<std::array<Fe, 3>, 3>& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

ProjectiveMap normalize_map(std::array<std::array<Fe, 3>, 3> m) {
  const FieldData* f = m[0][0].field;
  Fe scale = f->zero();
  for (int i = 0; i < 3 && scale.is_zero(); ++i)
    for (int j = 0; j < 3 && scale.is_zero(); ++j)
      if (!m[i][j].is_zero()) scale = f->inv(m[i][j]);
  if (scale.is_zero()) throw std::invalid_argument("zero matrix");
  for (auto& row : m)
    for (auto& e : row) e = e * scale;
  return {m};
}

ProjectiveMap identity_map(const FieldRef& field) {
  Fe z = field->zero(), o = field->one();
  return {{{{o, z, z}, {z, o, z}, {z, z, o}}}};
}

ProjectiveMap compose(const ProjectiveMap& a, const ProjectiveMap& b) {
  const FieldData* f = a.m[0][0].field;
  std::array<std::array<Fe, 3>, 3> r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      Fe s = f->zero();
      for (int k = 0; k < 3; ++k) s = s + a.m[i][k] * b.m[k][j];
      r[i][j] = s;
    }
  return normalize_map(r);
}

ProjectiveMap inverse(const ProjectiveMap& a) {
  Fe d = det3(a.m);
  if (d.is_zero()) throw std::invalid_argument("singular projective map");
  const auto& m = a.m;
  std::array<std::array<Fe, 3>, 3> adj;
  adj[0][0] = m[1][1] * m[2][2] - m[1][2] * m[2][1];
  adj[0][1] = m[0][2] * m[2][1] - m[0][1] * m[2][2];
  adj[0][2] = m[0][1] * m[1][2] - m[0][2] * m[1][1];
  adj[1][0] = m[1][2] * m[2][0] - m[1][0] * m[2][2];
  adj[1][1] = m[0][0] * m[2][2] - m[0][2] * m[2][0];
  adj[1][2] = m[0][2] * m[1][0] - m[0][0] * m[1][2];
  adj[2][0] = m[1][0] * m[2][1] - m[1][1] * m[2][0];
  adj[2][1] = m[0][1] * m[2][0] - m[0][0] * m[2][1];
  adj[2][2] = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  return normalize_map(adj);
}

ProjPoint apply(const ProjectiveMap& t, const ProjPoint& p) {
  Fe x = t.m[0][0] * p.x + t.m[0][1] * p.y + t.m[0][2] * p.z;
  Fe y = t.m[1][0] * p.x + t.m[1][1] * p.y + t.m[1][2] * p.z;
  Fe z = t.m[2][0] * p.x + t.m[2][1] * p.y + t.m[2][2] * p.z;
  return make_point(x, y, z);
}

bool is_quadrangle(const std::array<ProjPoint, 4>& pts) {
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (pts[i] == pts[j]) return false;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      for (int k = j + 1; k < 4; ++k) {
        std::array<std::array<Fe, 3>, 3> m = {
            std::array<Fe, 3>{pts[i].x, pts[i].y, pts[i].z},
            std::array<Fe, 3>{pts[j].x, pts[j].y, pts[j].z},
            std::array<Fe, 3>{pts[k].x, pts[k].y, pts[k].z}};
        if (det3(m).is_zero()) return false;
      }
  return true;
}

namespace {

// Matrix sending the standard frame e1, e2, e3, e1+e2+e3 to the given
// quadrangle. Throws naming a collinear triple on degeneracy.
std::array<std::array<Fe, 3>, 3> frame_matrix(const std::array<ProjPoint, 4>& q) {
  std::array<std::array<Fe, 3>, 3> cols = {
      std::array<Fe, 3>{q[0].x, q[1].x, q[2].x},
      std::array<Fe, 3>{q[0].y, q[1].y, q[2].y},
      std::array<Fe, 3>{q[0].z, q[1].z, q[2].z}};
  Fe d = det3(cols);
  if (d.is_zero())
    throw std::invalid_argument("degenerate quadrangle: collinear triple " +
                                point_str(q[0]) + " " + point_str(q[1]) + " " +
                                point_str(q[2]));
  // Solve cols * lambda = q[3] by Cramer's rule.
  std::array<Fe, 3> rhs = {q[3].x, q[3].y, q[3].z};
  std::array<Fe, 3> lambda;
  for (int c = 0; c < 3; ++c) {
    auto tmp = cols;
    for (int r = 0; r < 3; ++r) tmp[r][c] = rhs[r];
    lambda[c] = det3(tmp) / d;
  }
  for (int c = 0; c < 3; ++c) {
    if (lambda[c].is_zero()) {
      // q[3] lies in the span of the other two quadrangle points.
      int a = (c + 1) % 3, b = (c + 2) % 3;
      throw std::invalid_argument("degenerate quadrangle: collinear triple " +
                                  point_str(q[a < b ? a : b]) + " " +
                                  point_str(q[a < b ? b : a]) + " " +
                                  point_str(q[3]));
    }
  }
  std::array<std::array<Fe, 3>, 3> m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m[r][c] = cols[r][c] * lambda[c];
  return m;
}

}  // namespace

ProjectiveMap map_from_frames(const std::array<ProjPoint, 4>& src,
                              const std::array<ProjPoint, 4>& dst) {
  auto a = frame_matrix(src);
  auto b = frame_matrix(dst);
  ProjectiveMap inv_a = inverse(ProjectiveMap{a});
  ProjectiveMap res = compose(ProjectiveMap{b}, inv_a);
  if (det3(res.m).is_zero())
    throw std::invalid_argument("resulting projective map is singular");
  return res;
}

}  // namespace unitals
