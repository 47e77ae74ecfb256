#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "unitals/embed.hpp"

using namespace unitals;

namespace {

const HermitianUnital& big64() {
  static HermitianUnital u = build_unital(make_quad_ext(2, 3));
  return u;
}

}  // namespace

TEST_CASE("embedding enumeration") {
  auto e42 = make_quad_ext(2, 1);   // F_4 | F_2
  auto e164 = make_quad_ext(2, 2);  // F_16 | F_4
  auto e648 = make_quad_ext(2, 3);  // F_64 | F_8

  // Even-degree step: the cube roots of unity land inside R.
  CHECK(enumerate_ext_embeddings(e42, e164).empty());
  // Odd-degree step: exactly the two conjugate embeddings.
  CHECK(enumerate_ext_embeddings(e42, e648).size() == 2);
  // Into itself: identity and the involution.
  auto self = enumerate_ext_embeddings(e42, make_quad_ext(2, 1));
  CHECK(self.size() == 2);
  // Cross characteristic: empty.
  CHECK(enumerate_ext_embeddings(e42, make_quad_ext(3, 1)).empty());
}

TEST_CASE("standard subunitals from field embeddings") {
  const auto& big = big64();
  auto small = make_quad_ext(2, 1);
  auto etas = enumerate_ext_embeddings(small, big.ext);
  REQUIRE(etas.size() == 2);

  std::vector<SubunitalCertificate> certs;
  for (const auto& eta : etas) {
    auto cert = standard_subunital(big, eta);
    CHECK(cert.order == 2);
    CHECK(cert.points.size() == 9);
    CHECK(cert.induced_blocks.size() == 12);
    certs.push_back(cert);
  }

  // The raw coordinatewise images of the two embeddings are related by the
  // ambient Frobenius collineation.
  auto small_u = build_unital(small);
  auto raw0 = coordinatewise_image(etas[0], small_u.points);
  auto raw1 = coordinatewise_image(etas[1], small_u.points);
  auto key_set = [](const std::vector<ProjPoint>& pts) {
    std::set<uint64_t> s;
    for (const auto& p : pts) s.insert(p.key());
    return s;
  };
  bool related = false;
  for (uint32_t k = 1; k < big.ext.C->m; ++k) {
    std::set<uint64_t> mapped;
    for (const auto& p : raw0)
      mapped.insert(make_point(frobenius(p.x, k), frobenius(p.y, k),
                               frobenius(p.z, k))
                        .key());
    if (mapped == key_set(raw1)) related = true;
  }
  CHECK(related);
}

TEST_CASE("identity embedding certifies the whole unital") {
  auto ext = make_quad_ext(2, 1);
  auto u = build_unital(ext);
  auto etas = enumerate_ext_embeddings(ext, ext);
  REQUIRE(!etas.empty());
  // The first embedding in canonical order is the identity.
  CHECK(etas[0].eta.gen_image == ext.C->gen());
  auto cert = standard_subunital(u, etas[0]);
  CHECK(cert.points.size() == u.v());
  CHECK(cert.order == u.q);
}

TEST_CASE("certify_subunital rejects bad candidates") {
  auto u = build_unital(make_quad_ext(3, 1));
  std::vector<uint32_t> too_small = {0, 1, 2};
  CHECK_THROWS_AS(certify_subunital(u, too_small, 2), std::invalid_argument);
  // Nine points that are not block-aligned: a generic index range.
  std::vector<uint32_t> arbitrary = {0, 1, 2, 3, 4, 5, 6, 7, 8};
  CHECK_THROWS_AS(certify_subunital(u, arbitrary, 2), std::invalid_argument);
}

TEST_CASE("exhaustive searches in small ambients are empty") {
  // Even-degree ambient: no order-2 subunital.
  auto u16 = build_unital(make_quad_ext(2, 2));
  auto r16 = find_subunitals(u16, 2, SearchOptions{SearchMode::exhaustive});
  CHECK(r16.certificates.empty());
  CHECK(!r16.capped);

  // Odd characteristic: no order-2 subunital either.
  auto u9 = build_unital(make_quad_ext(3, 1));
  auto r9 = find_subunitals(u9, 2, SearchOptions{SearchMode::exhaustive});
  CHECK(r9.certificates.empty());
}

TEST_CASE("search finds the unital inside itself") {
  auto u = build_unital(make_quad_ext(2, 1));
  auto ex = find_subunitals(u, 2, SearchOptions{SearchMode::exhaustive});
  REQUIRE(ex.certificates.size() == 1);
  CHECK(ex.certificates[0].points.size() == 9);

  SearchOptions ropts;
  ropts.mode = SearchMode::reduced;
  ropts.seed = 5;
  auto red = find_subunitals(u, 2, ropts);
  REQUIRE(red.justification.has_value());
  // The order-2 unital's translations generate only the point reflections
  // of AG(2,3) and their products, which is not 2-transitive: reduced mode
  // must detect this and fall back.
  CHECK(!red.justification->ok);
  CHECK(red.mode_used == SearchMode::exhaustive);
  REQUIRE(red.certificates.size() == 1);
  CHECK(red.certificates[0].points == ex.certificates[0].points);
}

TEST_CASE("reduced-search justification on the order-3 unital") {
  auto u = build_unital(make_quad_ext(3, 1));
  auto j = justify_reduced_search(u, 11);
  CHECK(j.ok);
  CHECK(j.pair_count == 756);
  CHECK(j.orbit_size == 756);
  CHECK(j.sample_word_lengths.size() == 5);

  // At order 2 the generated group has order 18, so the orbit covers only
  // a quarter of the 72 ordered pairs.
  auto j2 = justify_reduced_search(build_unital(make_quad_ext(2, 1)), 11);
  CHECK(!j2.ok);
  CHECK(j2.orbit_size == 18);
}

TEST_CASE("closure engine agrees with the sorted-index reference engine") {
  for (auto [p, n] : std::vector<std::pair<uint32_t, uint32_t>>{{2, 1}, {3, 1}}) {
    auto u = build_unital(make_quad_ext(p, n));
    SearchOptions fast;
    SearchOptions ref;
    ref.use_reference_engine = true;
    auto rf = find_subunitals(u, 2, fast);
    auto rr = find_subunitals(u, 2, ref);
    REQUIRE(rf.certificates.size() == rr.certificates.size());
    for (size_t i = 0; i < rf.certificates.size(); ++i)
      CHECK(rf.certificates[i].points == rr.certificates[i].points);
  }
}

TEST_CASE("workers do not change search output") {
  auto u = build_unital(make_quad_ext(3, 1));
  SearchOptions one;
  one.workers = 1;
  SearchOptions two;
  two.workers = 2;
  auto r1 = find_subunitals(u, 2, one);
  auto r2 = find_subunitals(u, 2, two);
  REQUIRE(r1.certificates.size() == r2.certificates.size());
  for (size_t i = 0; i < r1.certificates.size(); ++i)
    CHECK(r1.certificates[i].points == r2.certificates[i].points);
}

TEST_CASE("check_standard round-trips standard subunitals") {
  const auto& big = big64();
  auto small = make_quad_ext(2, 1);
  auto etas = enumerate_ext_embeddings(small, big.ext);
  for (const auto& eta : etas) {
    auto cert = standard_subunital(big, eta);
    auto res = check_standard(big, cert);
    REQUIRE(res.standard());
    // The witness reproduces the certificate point set exactly.
    std::set<uint32_t> image(res.witness->point_map.begin(),
                             res.witness->point_map.end());
    std::set<uint32_t> expect(cert.points.begin(), cert.points.end());
    CHECK(image == expect);
  }
}

TEST_CASE("check_standard on the whole unital") {
  auto ext = make_quad_ext(2, 1);
  auto u = build_unital(ext);
  auto cert = certify_subunital(
      u, [&] {
        std::vector<uint32_t> all(u.v());
        for (uint32_t i = 0; i < u.v(); ++i) all[i] = i;
        return all;
      }(),
      u.q);
  auto res = check_standard(u, cert);
  CHECK(res.standard());
}

TEST_CASE("disjointness of extended blocks") {
  const auto& big = big64();
  auto small = make_quad_ext(2, 1);
  auto etas = enumerate_ext_embeddings(small, big.ext);
  auto cert = standard_subunital(big, etas[0]);
  auto rep = disjointness_check(big, cert);
  CHECK(rep.pass());
  CHECK(rep.pairs_checked > 0);

  // Planted violation: point two disjoint induced blocks at ambient blocks
  // that do intersect.
  auto doctored = cert;
  REQUIRE(doctored.induced_blocks.size() >= 2);
  uint32_t da = 0;
  uint32_t db = 0;
  for (uint32_t i = 0; i < doctored.induced_blocks.size() && !db; ++i)
    for (uint32_t j = i + 1; j < doctored.induced_blocks.size() && !db; ++j) {
      std::vector<uint32_t> common;
      std::set_intersection(doctored.induced_blocks[i].points.begin(),
                            doctored.induced_blocks[i].points.end(),
                            doctored.induced_blocks[j].points.begin(),
                            doctored.induced_blocks[j].points.end(),
                            std::back_inserter(common));
      if (common.empty()) {
        da = i;
        db = j;
      }
    }
  // Pick an ambient block meeting the other induced block's ambient line.
  uint32_t amb = doctored.induced_blocks[db].ambient_block;
  uint32_t pt = big.blocks[amb][0];
  uint32_t other = big.point_blocks[pt][0];
  if (other == amb) other = big.point_blocks[pt][1];
  doctored.induced_blocks[da].ambient_block = other;
  auto bad = disjointness_check(big, doctored);
  CHECK(!bad.pass());
}

TEST_CASE("subunitals inherit the absence of O'Nan configurations") {
  const auto& big = big64();
  auto small = make_quad_ext(2, 1);
  auto etas = enumerate_ext_embeddings(small, big.ext);
  auto cert = standard_subunital(big, etas[0]);
  auto ls = induced_linear_space(cert);
  CHECK(find_onan_configs(ls).empty());
}

TEST_CASE("matrix-model unitals are projectively equivalent to the canonical one") {
  for (auto [p, n] : std::vector<std::pair<uint32_t, uint32_t>>{{2, 1}, {3, 1}}) {
    auto ext = make_quad_ext(p, n);
    auto canonical = build_unital(ext);
    Fe z = ext.C->zero(), o = ext.C->one();

    std::vector<std::array<std::array<Fe, 3>, 3>> mats;
    mats.push_back({std::array<Fe, 3>{o, z, z}, std::array<Fe, 3>{z, o, z},
                    std::array<Fe, 3>{z, z, o}});
    // An off-diagonal hermitian matrix: entries a and sigma(a) paired.
    Fe a = ext.eps;
    mats.push_back({std::array<Fe, 3>{z, a, z},
                    std::array<Fe, 3>{ext.sigma(a), z, z},
                    std::array<Fe, 3>{z, z, o}});
    for (const auto& m : mats) {
      auto um = build_unital_from_matrix(ext, make_hermitian_matrix(ext, m));
      CHECK(um.v() == canonical.v());
      auto T = find_set_equivalence(canonical.points, um.points);
      REQUIRE(T.has_value());
      // The map carries points onto points, hence blocks onto blocks: the
      // two designs are isomorphic.
      for (const auto& pt : canonical.points)
        CHECK(um.point_index(apply(*T, pt)).has_value());
    }
  }
}

TEST_CASE("whole-unital certificate is vacuously disjointness-consistent") {
  auto u = build_unital(make_quad_ext(2, 1));
  std::vector<uint32_t> all(u.v());
  for (uint32_t i = 0; i < u.v(); ++i) all[i] = i;
  auto cert = certify_subunital(u, all, u.q);
  auto rep = disjointness_check(u, cert);
  CHECK(rep.pass());
}

TEST_CASE("order-2 existence over F_4|F_2") {
  auto rep = verify_order2_theorem(make_quad_ext(2, 1));
  CHECK(rep.predicted_exists);
  CHECK(rep.characteristic_two);
  REQUIRE(rep.u_code.has_value());
  CHECK(rep.nine_points_in_model);
  CHECK(rep.nine_points_form_subunital);
  CHECK(rep.model_equivalent_to_canonical);
  CHECK(rep.consistent());
  // The canonical matrix search lands on a = b = 1, c = u^2.
  REQUIRE(rep.matrix_codes.has_value());
  auto ext = make_quad_ext(2, 1);
  Fe u = ext.C->element(*rep.u_code);
  CHECK((*rep.matrix_codes)[0][1] == 1);  // a = 1
  CHECK((*rep.matrix_codes)[2][0] == 1);  // b = 1
  CHECK((*rep.matrix_codes)[1][2] == (u * u).code);
}

TEST_CASE("order-2 nonexistence") {
  auto r9 = verify_order2_theorem(make_quad_ext(3, 1));
  CHECK(!r9.predicted_exists);
  CHECK(!r9.characteristic_two);
  REQUIRE(r9.search_confirms_absence.has_value());
  CHECK(*r9.search_confirms_absence);
  CHECK(r9.consistent());

  auto r16 = verify_order2_theorem(make_quad_ext(2, 2));
  CHECK(!r16.predicted_exists);  // the cube roots of unity lie in R
  CHECK(r16.characteristic_two);
  REQUIRE(r16.search_confirms_absence.has_value());
  CHECK(*r16.search_confirms_absence);
}
