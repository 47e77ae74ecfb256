#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "unitals/gf.hpp"
#include "unitals/proj.hpp"

namespace unitals {

/// The quadratic extension pair C|R underlying a hermitian unital:
/// C = F_{p^{2n}}, R its subfield of order q = p^n, the involution
/// sigma = x -> x^q, a fixed epsilon in C \ R, and the trace/norm values
/// t, d of epsilon over R. Epsilon is the field generator of C, which is
/// never in R because it generates C over the prime field.
struct QuadExtension {
  FieldRef C;
  FieldRef R;
  SubfieldEmbedding emb;  // R -> C
  uint32_t sigma_exp = 0; // n, with sigma = frobenius(., n)
  Fe eps;                 // in C
  Fe t, d;                // in R

  uint32_t p() const { return C->p; }
  uint32_t n() const { return sigma_exp; }
  uint32_t q() const { return R->order; }

  Fe sigma(const Fe& a) const { return C->frobenius(a, sigma_exp); }
  bool in_R(const Fe& a) const { return sigma(a) == a; }
  /// Membership of w in the set eps*R.
  bool in_eps_R(const Fe& w) const;

  /// tr(w) = w + w^sigma, as an element of C (always sigma-fixed).
  Fe rel_trace(const Fe& w) const { return w + sigma(w); }
  /// N(w) = w * w^sigma, as an element of C.
  Fe rel_norm(const Fe& w) const { return w * sigma(w); }

  Fe t_in_C() const { return emb.map(t); }
  Fe d_in_C() const { return emb.map(d); }
  /// Preimage in R of a sigma-fixed element of C.
  Fe to_R(const Fe& a) const;

  /// Value of the defining membership form X^sigma Y + Z^sigma Z.
  Fe membership_value(const ProjPoint& pt) const;

  /// Skew-hermitian form whose isotropic points are exactly the unital
  /// points: h(v, w) = eps^sigma X^s Y' - eps Y^s X' + (eps^sigma - eps) Z^s Z'.
  Fe hermitian_form(const std::array<Fe, 3>& v, const std::array<Fe, 3>& w) const;

 private:
  friend QuadExtension make_quad_ext(uint32_t, uint32_t,
                                     const std::vector<uint32_t>*);
  std::unordered_map<uint32_t, uint32_t> r_preimage_;
};

QuadExtension make_quad_ext(uint32_t p, uint32_t n,
                            const std::vector<uint32_t>* modulus = nullptr);

/// 3x3 matrix over C equal to its sigma-conjugate transpose, nonsingular.
struct HermitianMatrix {
  std::array<std::array<Fe, 3>, 3> m;
};

HermitianMatrix make_hermitian_matrix(const QuadExtension& ext,
                                      std::array<std::array<Fe, 3>, 3> m);

struct BuildOptions {
  /// Construction re-verifies every structural invariant (point count,
  /// block sizes and count, pair coverage, line profile, tangency). The
  /// opt-out exists for bulk experiments.
  bool verify = true;
};

/// The 2-(q^3+1, q+1, 1) design cut out of PG(2, q^2): canonical point
/// list, blocks as sorted point-index lists in lexicographic order, the
/// pair -> block index, and one tangent line per point.
struct HermitianUnital {
  QuadExtension ext;
  uint32_t q = 0;
  std::vector<ProjPoint> points;
  std::vector<std::vector<uint32_t>> blocks;
  std::vector<std::vector<uint32_t>> point_blocks;  // blocks through a point
  std::vector<ProjLine> tangents;

  uint32_t v() const { return uint32_t(points.size()); }
  uint32_t b() const { return uint32_t(blocks.size()); }
  uint32_t pair_block(uint32_t i, uint32_t j) const {
    return pair_block_[uint64_t(i) * points.size() + j];
  }
  std::optional<uint32_t> point_index(const ProjPoint& p) const;
  const ProjLine& tangent_at(uint32_t point) const;
  /// Ambient line containing a block.
  ProjLine block_line(uint32_t block) const;

  std::vector<uint32_t> pair_block_;  // flat v*v table
  std::unordered_map<uint64_t, uint32_t> index_;
};

HermitianUnital build_unital(const QuadExtension& ext, BuildOptions opts = {});

/// Unital from the zero set of v^sigma-transpose * M * v with blocks from
/// secants. Rejects matrices whose zero set does not have q^3+1 points,
/// reporting the count.
HermitianUnital build_unital_from_matrix(const QuadExtension& ext,
                                         const HermitianMatrix& M,
                                         BuildOptions opts = {});

/// True iff the given collinear points, parametrized from three reference
/// points as p0 = [a], pinf = [b], p1 = [a+b], all carry parameters in
/// R union {infinity}. Independent of the reference choice.
bool is_baer_subline(const QuadExtension& ext, std::span<const ProjPoint> pts);

bool baer_check(const HermitianUnital& u, uint32_t block);

enum class ExportFormat { text, json };

std::string export_unital(const HermitianUnital& u, ExportFormat fmt);

/// Parsed form of the text export.
struct UnitalDump {
  uint32_t q = 0, p = 0, n = 0, v = 0, b = 0;
  std::vector<uint32_t> modulus;
  std::vector<std::vector<uint32_t>> blocks;
  std::vector<std::array<uint32_t, 3>> points;  // coordinate codes
};

UnitalDump parse_unital_text(const std::string& data);

}  // namespace unitals
