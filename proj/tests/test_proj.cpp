#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "unitals/proj.hpp"

using namespace unitals;

TEST_CASE("join and meet on coordinate axes") {
  auto f = make_field(2, 2);
  Fe z = f->zero(), o = f->one();
  ProjPoint e1{o, z, z}, e2{z, o, z};
  ProjLine zline = join(e1, e2);
  CHECK(zline == make_line(z, z, o));  // Z = 0
  ProjLine yline = make_line(z, o, z);
  CHECK(meet(zline, yline) == e1);
  CHECK_THROWS_AS(join(e1, e1), std::invalid_argument);
  CHECK_THROWS_AS(meet(zline, zline), std::invalid_argument);
}

TEST_CASE("incidence") {
  auto f = make_field(2, 2);
  Fe z = f->zero(), o = f->one();
  ProjLine zline{z, z, o};
  CHECK(incident(ProjPoint{o, z, z}, zline));
  CHECK(!incident(ProjPoint{z, z, o}, zline));
}

TEST_CASE("plane counts for PG(2,q^2)") {
  for (uint32_t q : {2u, 3u}) {
    auto f = make_field(q == 2 ? 2 : 3, 2);
    uint64_t n = f->order;
    auto pts = enumerate_points(f);
    auto lines = enumerate_lines(f);
    CHECK(pts.size() == n * n + n + 1);
    CHECK(lines.size() == n * n + n + 1);
    std::set<uint64_t> keys;
    for (auto& p : pts) keys.insert(p.key());
    CHECK(keys.size() == pts.size());

    // Every line carries exactly q^2+1 points, counted two ways.
    for (size_t li = 0; li < lines.size(); li += 7) {
      const auto& l = lines[li];
      size_t cnt = 0;
      for (auto& p : pts)
        if (incident(p, l)) ++cnt;
      CHECK(cnt == n + 1);
      auto on = points_on_line(f, l);
      CHECK(on.size() == n + 1);
      std::set<uint64_t> ok;
      for (auto& p : on) {
        CHECK(incident(p, l));
        ok.insert(p.key());
      }
      CHECK(ok.size() == n + 1);
    }
  }
}

TEST_CASE("join respects incidence on random pairs in PG(2,9)") {
  auto f = make_field(3, 2);
  auto pts = enumerate_points(f);
  std::mt19937_64 rng(12345);
  std::uniform_int_distribution<size_t> pick(0, pts.size() - 1);
  for (int it = 0; it < 100; ++it) {
    auto p = pts[pick(rng)];
    auto q = pts[pick(rng)];
    if (p == q) continue;
    auto l = join(p, q);
    CHECK(incident(p, l));
    CHECK(incident(q, l));
  }
}

TEST_CASE("map_from_frames fixes the standard frame") {
  auto f = make_field(2, 2);
  Fe z = f->zero(), o = f->one();
  std::array<ProjPoint, 4> frame = {ProjPoint{o, z, z}, ProjPoint{z, o, z},
                                    ProjPoint{z, z, o}, ProjPoint{o, o, o}};
  auto id = map_from_frames(frame, frame);
  CHECK(id == identity_map(f));
  for (auto& p : enumerate_points(f)) CHECK(apply(id, p) == p);

  std::array<ProjPoint, 4> swapped = {frame[1], frame[0], frame[2], frame[3]};
  auto perm = map_from_frames(frame, swapped);
  CHECK(apply(perm, frame[0]) == frame[1]);
  CHECK(apply(perm, frame[1]) == frame[0]);
  CHECK(apply(perm, frame[2]) == frame[2]);
}

TEST_CASE("map_from_frames on random quadrangles in PG(2,4)") {
  auto f = make_field(2, 2);
  auto pts = enumerate_points(f);
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<size_t> pick(0, pts.size() - 1);
  int done = 0;
  while (done < 25) {
    std::array<ProjPoint, 4> src = {pts[pick(rng)], pts[pick(rng)],
                                    pts[pick(rng)], pts[pick(rng)]};
    std::array<ProjPoint, 4> dst = {pts[pick(rng)], pts[pick(rng)],
                                    pts[pick(rng)], pts[pick(rng)]};
    if (!is_quadrangle(src) || !is_quadrangle(dst)) continue;
    auto m = map_from_frames(src, dst);
    for (int i = 0; i < 4; ++i) CHECK(apply(m, src[i]) == dst[i]);
    auto mi = inverse(m);
    for (auto& p : pts) CHECK(apply(mi, apply(m, p)) == p);
    // Collineation property: incidence is preserved, sampled.
    auto l = join(src[0], src[1]);
    auto li = join(apply(m, src[0]), apply(m, src[1]));
    for (auto& p : pts)
      CHECK(incident(p, l) == incident(apply(m, p), li));
    ++done;
  }
}

TEST_CASE("degenerate quadruples are rejected with the collinear triple") {
  auto f = make_field(2, 2);
  Fe z = f->zero(), o = f->one();
  std::array<ProjPoint, 4> frame = {ProjPoint{o, z, z}, ProjPoint{z, o, z},
                                    ProjPoint{z, z, o}, ProjPoint{o, o, o}};
  std::array<ProjPoint, 4> bad = {ProjPoint{o, z, z}, ProjPoint{z, o, z},
                                  ProjPoint{o, o, z}, ProjPoint{o, o, o}};
  CHECK(!is_quadrangle(bad));
  CHECK_THROWS_WITH_AS(map_from_frames(bad, frame),
                       doctest::Contains("collinear triple"),
                       std::invalid_argument);
  // Fourth point on a side.
  std::array<ProjPoint, 4> bad2 = {ProjPoint{o, z, z}, ProjPoint{z, o, z},
                                   ProjPoint{z, z, o}, ProjPoint{o, o, z}};
  CHECK_THROWS_WITH_AS(map_from_frames(frame, bad2),
                       doctest::Contains("collinear triple"),
                       std::invalid_argument);
}

TEST_CASE("duality of join and meet") {
  auto f = make_field(3, 1);
  auto pts = enumerate_points(f);
  for (auto& p : pts)
    for (auto& q : pts) {
      if (p == q) continue;
      auto l = join(p, q);
      // Transposing coordinates: the meet of the dual lines is the dual of
      // the join.
      ProjLine dp{p.x, p.y, p.z}, dq{q.x, q.y, q.z};
      auto m = meet(dp, dq);
      CHECK(l.a == m.x);
      CHECK(l.b == m.y);
      CHECK(l.c == m.z);
    }
}
