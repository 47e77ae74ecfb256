#include "unitals/gf.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace unitals {

namespace {

constexpr uint32_t kMaxOrder = 1u << 16;

void check_same_field(const Fe& a, const Fe& b) {
  if (a.field == nullptr || b.field == nullptr)
    throw std::invalid_argument("uninitialized field element");
  if (a.field != b.field && !a.field->same_as(*b.field))
    throw std::invalid_argument("operands belong to different fields");
}

// Dense polynomial helpers over F_p, coefficients ascending. Used for
// modulus validation and table construction only; element arithmetic
// runs on codes.
using Poly = std::vector<uint32_t>;

Poly poly_trim(Poly a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
  return a;
}

Poly poly_mul(const Poly& a, const Poly& b, uint32_t p) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j)
      r[i + j] = (r[i + j] + uint64_t(a[i]) * b[j]) % p;
  return poly_trim(std::move(r));
}

// Remainder of a mod b, b monic.
Poly poly_rem(Poly a, const Poly& b, uint32_t p) {
  a = poly_trim(std::move(a));
  while (a.size() >= b.size()) {
    uint32_t lead = a.back();
    size_t shift = a.size() - b.size();
    for (size_t i = 0; i < b.size(); ++i) {
      uint64_t sub = uint64_t(lead) * b[i] % p;
      uint32_t& c = a[shift + i];
      c = (c + p - uint32_t(sub)) % p;
    }
    a = poly_trim(std::move(a));
  }
  return a;
}

std::string poly_str(const Poly& a) {
  std::ostringstream os;
  for (size_t i = 0; i < a.size(); ++i) {
    if (i) os << ',';
    os << a[i];
  }
  return os.str();
}

Poly poly_from_key(uint64_t key, uint32_t p, uint32_t deg) {
  Poly c(deg + 1, 0);
  for (uint32_t i = 0; i <= deg; ++i) {
    c[i] = key % p;
    key /= p;
  }
  return c;
}

// Monic divisor of `f` with 1 <= deg <= deg(f)/2, if one exists.
bool find_factor(const Poly& f, uint32_t p, Poly& factor) {
  uint32_t deg = uint32_t(f.size() - 1);
  for (uint32_t d = 1; d <= deg / 2; ++d) {
    uint64_t count = 1;
    for (uint32_t i = 0; i < d; ++i) count *= p;
    for (uint64_t key = 0; key < count; ++key) {
      Poly g = poly_from_key(key, p, d);
      g[d] = 1;
      if (poly_rem(f, g, p).empty()) {
        factor = g;
        return true;
      }
    }
  }
  return false;
}

}  // namespace

bool is_prime(uint32_t n) {
  if (n < 2) return false;
  for (uint32_t d = 2; uint64_t(d) * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

bool prime_power(uint32_t q, uint32_t& p, uint32_t& n) {
  if (q < 2) return false;
  for (uint32_t d = 2; uint64_t(d) * d <= q; ++d) {
    if (q % d == 0) {
      p = d;
      n = 0;
      uint32_t r = q;
      while (r % d == 0) {
        r /= d;
        ++n;
      }
      return r == 1;
    }
  }
  p = q;
  n = 1;
  return true;
}

bool operator==(const Fe& a, const Fe& b) {
  check_same_field(a, b);
  return a.code == b.code;
}

bool operator<(const Fe& a, const Fe& b) {
  check_same_field(a, b);
  return a.code < b.code;
}

Fe Fe::operator+(const Fe& o) const { return field->add(*this, o); }
Fe Fe::operator-(const Fe& o) const { return field->sub(*this, o); }
Fe Fe::operator*(const Fe& o) const { return field->mul(*this, o); }
Fe Fe::operator/(const Fe& o) const { return field->div(*this, o); }
Fe Fe::operator-() const { return field->neg(*this); }

Fe FieldData::element(uint32_t code) const {
  if (code >= order) throw std::invalid_argument("element code out of range");
  return {this, code};
}

Fe FieldData::from_coeffs(const std::vector<uint32_t>& coeffs) const {
  if (coeffs.size() != m)
    throw std::invalid_argument("coefficient vector has wrong length");
  uint32_t code = 0, place = 1;
  for (uint32_t i = 0; i < m; ++i) {
    if (coeffs[i] >= p)
      throw std::invalid_argument("coefficient not reduced mod p");
    code += coeffs[i] * place;
    place *= p;
  }
  return {this, code};
}

std::vector<uint32_t> FieldData::coeffs(const Fe& a) const {
  check_same_field(a, zero());
  std::vector<uint32_t> c(m, 0);
  uint32_t v = a.code;
  for (uint32_t i = 0; i < m; ++i) {
    c[i] = v % p;
    v /= p;
  }
  return c;
}

uint32_t FieldData::add_raw(uint32_t a, uint32_t b) const {
  if (p == 2) return a ^ b;
  uint32_t r = 0, place = 1;
  for (uint32_t i = 0; i < m; ++i) {
    r += (a % p + b % p) % p * place;
    a /= p;
    b /= p;
    place *= p;
  }
  return r;
}

Fe FieldData::add(Fe a, Fe b) const {
  check_same_field(a, b);
  check_same_field(a, zero());
  return {this, add_raw(a.code, b.code)};
}

Fe FieldData::neg(Fe a) const {
  check_same_field(a, zero());
  if (p == 2) return a;
  uint32_t r = 0, place = 1, v = a.code;
  for (uint32_t i = 0; i < m; ++i) {
    r += (p - v % p) % p * place;
    v /= p;
    place *= p;
  }
  return {this, r};
}

Fe FieldData::sub(Fe a, Fe b) const { return add(a, neg(b)); }

uint32_t FieldData::mul_raw(uint32_t a, uint32_t b) const {
  if (a == 0 || b == 0) return 0;
  uint64_t s = uint64_t(log_[a]) + log_[b];
  return exp_[s % (order - 1)];
}

Fe FieldData::mul(Fe a, Fe b) const {
  check_same_field(a, b);
  check_same_field(a, zero());
  return {this, mul_raw(a.code, b.code)};
}

Fe FieldData::inv(Fe a) const {
  check_same_field(a, zero());
  if (a.code == 0) throw std::invalid_argument("inversion of zero");
  uint32_t l = log_[a.code];
  return {this, exp_[(order - 1 - l) % (order - 1)]};
}

Fe FieldData::div(Fe a, Fe b) const { return mul(a, inv(b)); }

Fe FieldData::pow(Fe a, uint64_t e) const {
  check_same_field(a, zero());
  if (a.code == 0) return e == 0 ? one() : zero();
  uint64_t l = uint64_t(log_[a.code]) % (order - 1) * (e % (order - 1));
  return {this, exp_[l % (order - 1)]};
}

Fe FieldData::frobenius(Fe a, uint32_t k) const {
  check_same_field(a, zero());
  if (a.code == 0) return a;
  uint64_t mult = 1;
  for (uint32_t i = 0; i < k % m; ++i) mult = mult * p % (order - 1);
  return {this, exp_[uint64_t(log_[a.code]) * mult % (order - 1)]};
}

uint32_t FieldData::mult_order(Fe a) const {
  check_same_field(a, zero());
  if (a.code == 0) throw std::invalid_argument("zero has no multiplicative order");
  uint32_t n = order - 1;
  return n / std::gcd(n, log_[a.code]);
}

std::string FieldData::describe() const {
  std::ostringstream os;
  os << "p=" << p << " m=" << m << " modulus=" << poly_str(modulus);
  return os.str();
}

void FieldData::build_tables() {
  // Multiplication of codes by schoolbook polynomial reduction, used once
  // to bootstrap the log/exp tables.
  auto raw_mul = [&](uint32_t a, uint32_t b) {
    Poly pa(m, 0), pb(m, 0);
    uint32_t v = a;
    for (uint32_t i = 0; i < m; ++i) { pa[i] = v % p; v /= p; }
    v = b;
    for (uint32_t i = 0; i < m; ++i) { pb[i] = v % p; v /= p; }
    Poly pr = poly_rem(poly_mul(pa, pb, p), modulus, p);
    uint32_t code = 0, place = 1;
    for (uint32_t i = 0; i < m; ++i) {
      code += (i < pr.size() ? pr[i] : 0) * place;
      place *= p;
    }
    return code;
  };

  auto elt_order = [&](uint32_t a) {
    uint32_t ord = 1;
    uint32_t x = a;
    while (x != 1) {
      x = raw_mul(x, a);
      ++ord;
      if (ord > order) throw std::logic_error("order computation diverged");
    }
    return ord;
  };

  uint32_t g = 0;
  for (uint32_t c = 1; c < order; ++c) {
    if (elt_order(c) == order - 1) {
      g = c;
      break;
    }
  }
  if (g == 0) throw std::logic_error("no primitive element found");

  exp_.assign(order - 1, 0);
  log_.assign(order, 0);
  uint32_t x = 1;
  for (uint32_t i = 0; i + 1 < order; ++i) {
    exp_[i] = x;
    log_[x] = i;
    x = raw_mul(x, g);
  }
}

FieldRef make_field(uint32_t p, uint32_t m, const std::vector<uint32_t>* modulus) {
  if (!is_prime(p)) throw std::invalid_argument("characteristic is not prime");
  if (m < 1) throw std::invalid_argument("degree must be at least 1");
  uint64_t order = 1;
  for (uint32_t i = 0; i < m; ++i) {
    order *= p;
    if (order > kMaxOrder)
      throw std::invalid_argument("field order exceeds 2^16");
  }

  Poly mod;
  if (modulus) {
    mod = *modulus;
    if (mod.size() != m + 1)
      throw std::invalid_argument("modulus degree does not match field degree");
    for (uint32_t c : mod)
      if (c >= p) throw std::invalid_argument("modulus coefficient not reduced mod p");
    if (mod[m] != 1) throw std::invalid_argument("modulus is not monic");
    Poly factor;
    if (m > 1 && find_factor(mod, p, factor))
      throw std::invalid_argument("modulus is reducible, divisible by " +
                                  poly_str(factor));
  } else {
    // Scan candidates in increasing integer encoding; the first
    // irreducible wins.
    for (uint64_t key = 0; key < order; ++key) {
      mod = poly_from_key(key, p, m);
      mod[m] = 1;
      Poly factor;
      if (m == 1 || !find_factor(mod, p, factor)) break;
      mod.clear();
    }
    if (mod.empty()) throw std::logic_error("no irreducible polynomial found");
  }

  auto f = std::make_shared<FieldData>();
  f->p = p;
  f->m = m;
  f->order = uint32_t(order);
  f->modulus = mod;
  f->build_tables();
  return f;
}

Fe field_arith(const Fe& a, const Fe& b, FieldOp op, uint64_t pow_exp) {
  switch (op) {
    case FieldOp::add: return a + b;
    case FieldOp::sub: return a - b;
    case FieldOp::mul: return a * b;
    case FieldOp::div: return a / b;
    case FieldOp::inv: return a.field->inv(a);
    case FieldOp::pow: return a.field->pow(a, pow_exp);
  }
  throw std::invalid_argument("unknown field operation");
}

Fe frobenius(const Fe& a, uint32_t k) { return a.field->frobenius(a, k); }

Fe SubfieldEmbedding::map(const Fe& a) const {
  if (a.field != source.get() && !a.field->same_as(*source))
    throw std::invalid_argument("element does not belong to the source field");
  auto c = source->coeffs(a);
  // Horner evaluation at the generator image.
  Fe acc = target->zero();
  for (size_t i = c.size(); i-- > 0;) {
    acc = acc * gen_image + target->element(c[i]);
  }
  return acc;
}

std::vector<Fe> poly_roots(const FieldRef& field,
                           const std::vector<uint32_t>& coeffs) {
  std::vector<Fe> roots;
  for (uint32_t code = 0; code < field->order; ++code) {
    Fe x = field->element(code);
    Fe acc = field->zero();
    for (size_t i = coeffs.size(); i-- > 0;)
      acc = acc * x + field->element(coeffs[i]);
    if (acc.is_zero()) roots.push_back(x);
  }
  return roots;
}

SubfieldEmbedding embed_subfield(const FieldRef& small, const FieldRef& big) {
  if (small->p != big->p)
    throw std::invalid_argument("characteristic mismatch");
  if (big->m % small->m != 0)
    throw std::invalid_argument("source degree does not divide target degree");

  // The source modulus splits in the target; take the canonically least root.
  std::vector<uint32_t> lifted(small->modulus.begin(), small->modulus.end());
  auto roots = poly_roots(big, lifted);
  if (roots.empty())
    throw std::logic_error("source modulus has no root in target field");

  SubfieldEmbedding emb{small, big, roots.front()};

  // Spot-verify the ring homomorphism on generator powers and sums.
  Fe g = small->gen();
  Fe gi = emb.map(g);
  for (uint32_t k = 1; k < std::min<uint32_t>(small->order, 8); ++k) {
    Fe a = small->pow(g, k);
    Fe b = small->pow(g, k + 1);
    if (emb.map(a * b) != emb.map(a) * emb.map(b) ||
        emb.map(a + b) != emb.map(a) + emb.map(b))
      throw std::logic_error("subfield embedding is not a homomorphism");
  }
  (void)gi;
  return emb;
}

}  // namespace unitals
