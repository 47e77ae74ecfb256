#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "unitals/props.hpp"
#include "unitals/unital.hpp"

namespace unitals {

/// Embedding of the quadratic extension E|F into C|R: a field monomorphism
/// eta: E -> C with F^eta inside R and E^eta not inside R (so the ambient
/// involution restricts to the small one on the image).
struct FieldExtEmbedding {
  QuadExtension small;  // E|F
  QuadExtension big;    // C|R
  SubfieldEmbedding eta;  // E -> C, determined by the generator image

  Fe map(const Fe& a) const { return eta.map(a); }
  ProjPoint map_point(const ProjPoint& p) const;
};

/// All embeddings of E|F into C|R, generator images in canonical order.
/// Nonempty for finite fields exactly when r = q'^e with e odd.
std::vector<FieldExtEmbedding> enumerate_ext_embeddings(
    const QuadExtension& small, const QuadExtension& big);

/// Coordinatewise image of a point list under eta, before any ambient
/// projective correction.
std::vector<ProjPoint> coordinatewise_image(const FieldExtEmbedding& eta,
                                            const std::vector<ProjPoint>& pts);

/// A certified subunital: a point subset of an ambient unital that, with
/// the blocks induced by ambient blocks, is itself a unital of the claimed
/// order. Every invariant is checked at construction.
struct SubunitalCertificate {
  uint32_t order = 0;                 // q'
  uint32_t ambient_q = 0, ambient_p = 0, ambient_n = 0;
  std::vector<uint32_t> points;       // sorted ambient point indices
  struct InducedBlock {
    uint32_t ambient_block;
    std::vector<uint32_t> points;     // sorted ambient point indices
  };
  std::vector<InducedBlock> induced_blocks;
};

/// Validates a point subset as a subunital of the claimed order; throws
/// with the violated invariant otherwise.
SubunitalCertificate certify_subunital(const HermitianUnital& big,
                                       std::vector<uint32_t> point_set,
                                       uint32_t sub_order);

/// Induced design of a certificate with points reindexed to 0..|S|-1.
LinearSpace induced_linear_space(const SubunitalCertificate& cert);

/// Projective map carrying the unital model built with epsilon-choice
/// `rho` onto the canonical model of `ext` (hermitian-form congruence).
ProjectiveMap model_fix_map(const QuadExtension& ext, const Fe& rho);

/// Embeds H(E|F) through eta: certificate points are g applied to the
/// coordinatewise image. When g is omitted, the canonical model-fixing
/// map is used (the identity whenever eta(eps_E) already lies in eps*R).
SubunitalCertificate standard_subunital(
    const HermitianUnital& big, const FieldExtEmbedding& eta,
    const std::optional<ProjectiveMap>& g = std::nullopt);

enum class SearchMode { exhaustive, reduced, capped };

struct SearchOptions {
  SearchMode mode = SearchMode::exhaustive;
  uint64_t cap = 0;       // capped mode: stop after this many certificates
  uint64_t seed = 0;      // seeds the reduced-mode justification sampling
  uint32_t workers = 1;   // parallel shards; output is order-independent
  /// Runs the plain sorted-index backtracking instead of the pair-closure
  /// engine; slower, used for cross-validation.
  bool use_reference_engine = false;
};

/// Runtime evidence that restricting the search to supersets of the two
/// least ambient points loses no subunital up to unital automorphisms:
/// the orbit of the fixed ordered pair under products of translations
/// covers all ordered point pairs, plus explicit sample words.
struct ReducedJustification {
  bool ok = false;
  uint32_t centers_used = 0;
  uint64_t orbit_size = 0;
  uint64_t pair_count = 0;
  std::vector<uint32_t> sample_word_lengths;
};

ReducedJustification justify_reduced_search(const HermitianUnital& u,
                                            uint64_t seed);

struct SearchResult {
  std::vector<SubunitalCertificate> certificates;  // canonically sorted
  SearchMode mode_requested = SearchMode::exhaustive;
  SearchMode mode_used = SearchMode::exhaustive;
  bool capped = false;
  uint64_t nodes_visited = 0;
  std::optional<ReducedJustification> justification;
};

/// Backtracking over sorted ambient point indices for subsets meeting
/// every ambient block in 0, 1 or q'+1 points. Reduced mode fixes the two
/// canonically least ambient points after justifying the symmetry
/// reduction at runtime, falling back to exhaustive search if the
/// justification fails.
SearchResult find_subunitals(const HermitianUnital& big, uint32_t sub_order,
                             SearchOptions opts = {});

/// Witness that a certificate is a standard embedding: a field extension
/// embedding plus the projective map carrying the canonical model of
/// H(E|F) onto the certified point set.
struct EmbeddingWitness {
  FieldExtEmbedding eta;
  ProjectiveMap g;
  /// model point index (canonical H(E|F) order) -> ambient point index
  std::vector<uint32_t> point_map;
};

struct CheckStandardResult {
  std::optional<EmbeddingWitness> witness;
  uint64_t etas_tried = 0;
  uint64_t frames_tried = 0;
  bool standard() const { return witness.has_value(); }
};

/// Sweeps every embedding eta and every ordered certificate quadrangle
/// against one fixed model quadrangle; the first projective map carrying
/// the model point set onto the certificate point set wins. Exhausting
/// the sweep yields the non-standardness counts.
CheckStandardResult check_standard(const HermitianUnital& big,
                                   const SubunitalCertificate& cert);

struct DisjointnessViolation {
  uint32_t induced_a, induced_b;    // indices into cert.induced_blocks
  uint32_t ambient_a, ambient_b;
  uint32_t common_point;
};

struct DisjointnessReport {
  uint64_t pairs_checked = 0;
  std::vector<DisjointnessViolation> violations;
  bool pass() const { return violations.empty(); }
};

/// Disjoint induced blocks must extend to disjoint ambient blocks.
DisjointnessReport disjointness_check(const HermitianUnital& big,
                                      const SubunitalCertificate& cert);

/// Projective map carrying one point set onto another, found by the frame
/// sweep; nullopt when the sweep is exhausted.
std::optional<ProjectiveMap> find_set_equivalence(
    const std::vector<ProjPoint>& model, const std::vector<ProjPoint>& target,
    uint64_t* frames_tried = nullptr);

struct Order2Report {
  bool predicted_exists = false;
  bool characteristic_two = false;
  std::optional<uint32_t> u_code;  // canonical cube root of unity off R
  std::optional<std::array<std::array<uint32_t, 3>, 3>> matrix_codes;
  bool nine_points_in_model = false;
  bool nine_points_form_subunital = false;
  bool model_equivalent_to_canonical = false;
  std::optional<bool> search_confirms_absence;
  uint64_t search_nodes = 0;
  bool consistent() const {
    if (predicted_exists)
      return nine_points_in_model && nine_points_form_subunital &&
             model_equivalent_to_canonical;
    return search_confirms_absence.value_or(false);
  }
};

/// Order-2 subunital existence: predicted iff the characteristic is 2 and
/// a cube root of unity lies in C \ R. The positive branch realizes the
/// zero-diagonal matrix model and its nine-point subunital; the negative
/// branch confirms emptiness by exhaustive search.
Order2Report verify_order2_theorem(const QuadExtension& ext);

std::string certificate_json(const SubunitalCertificate& cert);
std::string witness_json(const EmbeddingWitness& w);
std::string check_standard_json(const CheckStandardResult& r);
std::string disjointness_json(const DisjointnessReport& r);
std::string order2_json(const Order2Report& r);
std::string justification_json(const ReducedJustification& j);

}  // namespace unitals
