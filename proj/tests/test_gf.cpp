#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "unitals/gf.hpp"
#include "unitals/unital.hpp"

using namespace unitals;

namespace {

// Independent polynomial arithmetic over F_p for the modulus-selection
// oracle. Deliberately separate from the library's helpers.
using Poly = std::vector<uint32_t>;

Poly trim(Poly a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
  return a;
}

Poly rem(Poly a, const Poly& b, uint32_t p) {
  a = trim(a);
  while (a.size() >= b.size()) {
    uint32_t lead = a.back();
    size_t shift = a.size() - b.size();
    for (size_t i = 0; i < b.size(); ++i)
      a[shift + i] = (a[shift + i] + p - uint32_t(uint64_t(lead) * b[i] % p)) % p;
    a = trim(a);
  }
  return a;
}

bool irreducible(const Poly& f, uint32_t p) {
  uint32_t deg = uint32_t(f.size() - 1);
  for (uint32_t d = 1; d <= deg / 2; ++d) {
    uint64_t count = 1;
    for (uint32_t i = 0; i < d; ++i) count *= p;
    for (uint64_t key = 0; key < count; ++key) {
      Poly g(d + 1, 0);
      uint64_t k = key;
      for (uint32_t i = 0; i < d; ++i) {
        g[i] = k % p;
        k /= p;
      }
      g[d] = 1;
      if (rem(f, g, p).empty()) return false;
    }
  }
  return true;
}

Poly least_irreducible(uint32_t p, uint32_t m) {
  uint64_t order = 1;
  for (uint32_t i = 0; i < m; ++i) order *= p;
  for (uint64_t key = 0; key < order; ++key) {
    Poly f(m + 1, 0);
    uint64_t k = key;
    for (uint32_t i = 0; i < m; ++i) {
      f[i] = k % p;
      k /= p;
    }
    f[m] = 1;
    if (irreducible(f, p)) return f;
  }
  return {};
}

}  // namespace

TEST_CASE("default moduli") {
  auto f4 = make_field(2, 2);
  CHECK(f4->modulus == std::vector<uint32_t>{1, 1, 1});

  auto f3 = make_field(3, 1);
  CHECK(f3->modulus == std::vector<uint32_t>{0, 1});
  CHECK(f3->order == 3);

  // Oracle: brute-force irreducibility scan over all 64 monic sextics.
  auto f64 = make_field(2, 6);
  CHECK(f64->modulus == least_irreducible(2, 6));

  for (uint32_t p : {2u, 3u, 5u}) {
    for (uint32_t m = 1; m <= 3; ++m) {
      auto f = make_field(p, m);
      CHECK(f->modulus == least_irreducible(p, m));
    }
  }
}

TEST_CASE("make_field rejections") {
  CHECK_THROWS_AS(make_field(6, 2), std::invalid_argument);
  CHECK_THROWS_AS(make_field(1, 2), std::invalid_argument);
  CHECK_THROWS_AS(make_field(2, 17), std::invalid_argument);  // above 2^16

  std::vector<uint32_t> reducible{1, 0, 1};  // X^2+1 = (X+1)^2 over F_2
  CHECK_THROWS_WITH_AS(make_field(2, 2, &reducible),
                       "modulus is reducible, divisible by 1,1",
                       std::invalid_argument);
  std::vector<uint32_t> nonmonic{1, 1, 2};
  CHECK_THROWS_AS(make_field(3, 2, &nonmonic), std::invalid_argument);
  std::vector<uint32_t> wrongdeg{1, 1, 1};
  CHECK_THROWS_AS(make_field(2, 3, &wrongdeg), std::invalid_argument);
}

TEST_CASE("arithmetic basics in F_4") {
  auto f4 = make_field(2, 2);
  Fe one = f4->one();
  Fe x = f4->gen();
  CHECK((one + one).is_zero());
  CHECK(x * x == x + one);  // defining relation of X^2+X+1
  CHECK(frobenius(x, 1) == x + one);
  CHECK(frobenius(frobenius(x, 1), 1) == x);
}

TEST_CASE("field axioms exhaustive for small orders") {
  for (auto [p, m] : std::vector<std::pair<uint32_t, uint32_t>>{
           {2, 1}, {2, 2}, {2, 3}, {3, 1}, {3, 2}, {2, 4}, {5, 1}, {7, 1}, {3, 4}, {2, 6}}) {
    auto f = make_field(p, m);
    uint32_t n = f->order;
    REQUIRE(n <= 81);
    for (uint32_t a = 0; a < n; ++a) {
      Fe ea = f->element(a);
      if (a != 0) CHECK(ea * f->inv(ea) == f->one());
      CHECK(frobenius(ea, m) == ea);
      for (uint32_t b = 0; b < n; ++b) {
        Fe eb = f->element(b);
        CHECK(ea + eb == eb + ea);
        CHECK(ea * eb == eb * ea);
        // Frobenius is additive and multiplicative.
        CHECK(frobenius(ea + eb, 1) == frobenius(ea, 1) + frobenius(eb, 1));
        CHECK(frobenius(ea * eb, 1) == frobenius(ea, 1) * frobenius(eb, 1));
        for (uint32_t c = 0; c < n; c += (n > 16 ? 7 : 1)) {
          Fe ec = f->element(c);
          CHECK((ea + eb) + ec == ea + (eb + ec));
          CHECK((ea * eb) * ec == ea * (eb * ec));
          CHECK(ea * (eb + ec) == ea * eb + ea * ec);
        }
      }
    }
  }
}

TEST_CASE("cross-field operands are a hard error") {
  auto f4 = make_field(2, 2);
  auto f8 = make_field(2, 3);
  CHECK_THROWS_AS(f4->one() + f8->one(), std::invalid_argument);
  // Same content built twice is the same field.
  auto f4b = make_field(2, 2);
  CHECK(f4->one() + f4b->gen() == f4->gen() + f4b->one());
}

TEST_CASE("pow and division") {
  auto f9 = make_field(3, 2);
  for (uint32_t c = 1; c < 9; ++c) {
    Fe a = f9->element(c);
    CHECK(field_arith(a, a, FieldOp::inv) * a == f9->one());
    CHECK(f9->pow(a, 8) == f9->one());
    CHECK(f9->pow(a, 0) == f9->one());
    // Multiplicative order: smallest positive power giving 1.
    uint32_t ord = f9->mult_order(a);
    CHECK(f9->pow(a, ord) == f9->one());
    for (uint32_t e = 1; e < ord; ++e) CHECK(f9->pow(a, e) != f9->one());
  }
  CHECK_THROWS_AS(f9->inv(f9->zero()), std::invalid_argument);
}

TEST_CASE("subfield embedding basics") {
  auto f2 = make_field(2, 1);
  auto f4 = make_field(2, 2);
  auto e = embed_subfield(f2, f4);
  CHECK(e.map(f2->one()) == f4->one());

  auto f8 = make_field(2, 3);
  CHECK_THROWS_AS(embed_subfield(f4, f8), std::invalid_argument);
  CHECK_THROWS_AS(embed_subfield(make_field(3, 1), f4), std::invalid_argument);

  // Oracle: root search over all 16 elements of F_16.
  auto f16 = make_field(2, 4);
  auto e2 = embed_subfield(f4, f16);
  std::vector<Fe> roots;
  for (uint32_t c = 0; c < 16; ++c) {
    Fe x = f16->element(c);
    if ((x * x + x + f16->one()).is_zero()) roots.push_back(x);
  }
  REQUIRE(roots.size() == 2);
  CHECK(e2.gen_image == roots.front());

  // The image is closed under arithmetic and has exactly 4 elements.
  std::set<uint32_t> image;
  for (uint32_t c = 0; c < 4; ++c) image.insert(e2.map(f4->element(c)).code);
  CHECK(image.size() == 4);
  for (uint32_t a : image)
    for (uint32_t b : image) {
      CHECK(image.count((f16->element(a) * f16->element(b)).code) == 1);
      CHECK(image.count((f16->element(a) + f16->element(b)).code) == 1);
    }
}

TEST_CASE("relative trace and norm") {
  auto ext = make_quad_ext(2, 1);
  Fe eps = ext.eps;
  CHECK(ext.rel_trace(eps) == ext.t_in_C());
  CHECK(ext.rel_norm(eps) == ext.d_in_C());
  CHECK(ext.rel_trace(ext.C->one()).is_zero());  // 1+1 in characteristic 2

  for (auto [p, n] : std::vector<std::pair<uint32_t, uint32_t>>{
           {2, 1}, {3, 1}, {2, 2}, {3, 2}}) {
    auto e = make_quad_ext(p, n);
    uint32_t q = e.q();
    // Trace is R-linear and surjective onto R; norm is multiplicative.
    std::set<uint32_t> trace_values;
    for (uint32_t c = 0; c < e.C->order; ++c) {
      Fe w = e.C->element(c);
      Fe tr = e.rel_trace(w);
      CHECK(e.in_R(tr));
      CHECK(e.in_R(e.rel_norm(w)));
      trace_values.insert(tr.code);
      Fe w2 = e.C->element((c * 7 + 3) % e.C->order);
      CHECK(e.rel_trace(w + w2) == e.rel_trace(w) + e.rel_trace(w2));
      CHECK(e.rel_norm(w * w2) == e.rel_norm(w) * e.rel_norm(w2));
      for (uint32_t r = 0; r < q; ++r) {
        Fe rc = e.emb.map(e.R->element(r));
        CHECK(e.rel_trace(rc * w) == rc * e.rel_trace(w));
      }
    }
    CHECK(trace_values.size() == q);
  }
}

TEST_CASE("field description string") {
  auto f64 = make_field(2, 6);
  CHECK(f64->describe() == "p=2 m=6 modulus=1,1,0,0,0,0,1");
}

TEST_CASE("prime power decomposition") {
  uint32_t p, n;
  CHECK(prime_power(8, p, n));
  CHECK(p == 2);
  CHECK(n == 3);
  CHECK(prime_power(7, p, n));
  CHECK(p == 7);
  CHECK(!prime_power(6, p, n));
  CHECK(!prime_power(12, p, n));
  CHECK(!prime_power(1, p, n));
}
