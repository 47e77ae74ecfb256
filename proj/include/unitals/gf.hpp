#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace unitals {

/// Exact arithmetic in F_{p^m}, elements encoded as polynomial residues over
/// the prime field. An element's canonical integer code is sum(c_i * p^i)
/// over its coefficient vector; this encoding is the total order used for
/// every deterministic tie-break in the library.
class FieldData;
using FieldRef = std::shared_ptr<const FieldData>;

struct Fe {
  const FieldData* field = nullptr;
  uint32_t code = 0;

  bool is_zero() const { return code == 0; }
  friend bool operator==(const Fe& a, const Fe& b);
  friend bool operator!=(const Fe& a, const Fe& b) { return !(a == b); }
  friend bool operator<(const Fe& a, const Fe& b);  // same field, code order

  Fe operator+(const Fe& o) const;
  Fe operator-(const Fe& o) const;
  Fe operator*(const Fe& o) const;
  Fe operator/(const Fe& o) const;
  Fe operator-() const;
};

class FieldData {
 public:
  uint32_t p;
  uint32_t m;
  uint32_t order;                  // p^m
  std::vector<uint32_t> modulus;   // ascending powers, length m+1, monic

  Fe zero() const { return {this, 0}; }
  Fe one() const { return {this, 1}; }
  /// Ring generator over the prime field: the residue class of X for
  /// proper extensions, 1 for the prime field itself.
  Fe gen() const { return {this, m == 1 ? 1u : p}; }
  Fe element(uint32_t code) const;
  Fe from_coeffs(const std::vector<uint32_t>& coeffs) const;
  std::vector<uint32_t> coeffs(const Fe& a) const;

  Fe add(Fe a, Fe b) const;
  Fe sub(Fe a, Fe b) const;
  Fe neg(Fe a) const;
  Fe mul(Fe a, Fe b) const;
  Fe inv(Fe a) const;
  Fe div(Fe a, Fe b) const;
  Fe pow(Fe a, uint64_t e) const;
  /// a^(p^k), the k-fold absolute Frobenius.
  Fe frobenius(Fe a, uint32_t k) const;

  /// Multiplicative order of a nonzero element.
  uint32_t mult_order(Fe a) const;

  /// "p=<p> m=<m> modulus=<c0,...,cm>"
  std::string describe() const;

  bool same_as(const FieldData& o) const {
    return p == o.p && m == o.m && modulus == o.modulus;
  }

 private:
  friend FieldRef make_field(uint32_t, uint32_t, const std::vector<uint32_t>*);
  std::vector<uint32_t> exp_;   // exp_[i] = code of g^i, i in [0, order-1)
  std::vector<uint32_t> log_;   // log_[code] for code != 0
  void build_tables();
  uint32_t mul_raw(uint32_t a, uint32_t b) const;
  uint32_t add_raw(uint32_t a, uint32_t b) const;
};

/// Constructs F_{p^m}. When no modulus is given, the monic irreducible
/// polynomial of degree m over F_p with the smallest integer encoding
/// sum(c_i * p^i) is selected, so construction is deterministic.
/// Rejects non-prime p, reducible or wrong-degree moduli (naming a factor
/// of a reducible candidate), and orders above 2^16.
FieldRef make_field(uint32_t p, uint32_t m,
                    const std::vector<uint32_t>* modulus = nullptr);

enum class FieldOp { add, sub, mul, div, inv, pow };
/// Dispatch wrapper; pow_exp is consulted only for FieldOp::pow and
/// inv ignores b.
Fe field_arith(const Fe& a, const Fe& b, FieldOp op, uint64_t pow_exp = 0);

Fe frobenius(const Fe& a, uint32_t k);

/// A ring embedding of one finite field into another, pinned down by the
/// image of the source generator. Deterministic: the image is the root of
/// the source modulus with the smallest element code.
struct SubfieldEmbedding {
  FieldRef source;
  FieldRef target;
  Fe gen_image;

  Fe map(const Fe& a) const;
};

SubfieldEmbedding embed_subfield(const FieldRef& small, const FieldRef& big);

/// All roots in `field` of a polynomial given by element codes in
/// ascending powers, in canonical code order.
std::vector<Fe> poly_roots(const FieldRef& field,
                           const std::vector<uint32_t>& coeffs);

bool is_prime(uint32_t n);
/// Writes q = p^n with p prime; returns false if q is not a prime power.
bool prime_power(uint32_t q, uint32_t& p, uint32_t& n);

}  // namespace unitals
