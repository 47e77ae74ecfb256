#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "unitals/unital.hpp"

namespace unitals {

/// Point-block incidence structure in which every point pair lies on
/// exactly one block. Blocks may have different sizes; this is the common
/// interface for hermitian unitals, subunital candidates, and synthetic
/// test spaces.
struct LinearSpace {
  uint32_t v = 0;
  std::vector<std::vector<uint32_t>> blocks;
  std::vector<std::vector<uint32_t>> point_blocks;
  std::vector<uint32_t> pair_block_;  // flat v*v

  uint32_t pair_block(uint32_t i, uint32_t j) const {
    return pair_block_[uint64_t(i) * v + j];
  }

  static LinearSpace from_unital(const HermitianUnital& u);
  /// Validates that every pair is covered exactly once.
  static LinearSpace from_blocks(uint32_t v,
                                 std::vector<std::vector<uint32_t>> blocks);
};

/// Four blocks pairwise meeting in six distinct points: each point lies on
/// exactly two of the blocks, each block carries three of the points.
struct OnanConfiguration {
  std::array<uint32_t, 4> blocks;  // sorted
  std::array<uint32_t, 6> points;  // sorted
};

enum class ScanMode { exhaustive, sample };

struct ScanOptions {
  ScanMode mode = ScanMode::exhaustive;
  uint64_t sample_count = 0;
  uint64_t seed = 0;
};

struct OnanReport {
  ScanOptions options;
  uint64_t configurations_checked = 0;
  std::vector<OnanConfiguration> found;
  bool empty() const { return found.empty(); }
};

/// Searches for O'Nan configurations: for each point p and blocks B1, B2
/// through p, ordered pairs (a,b) from B1\{p} and (c,d) from B2\{p}, tests
/// whether block(a,c) and block(b,d) meet in a point outside B1 union B2.
/// Exhaustive mode deduplicates by the sorted 4-block set.
OnanReport find_onan_configs(const LinearSpace& ls, ScanOptions opts = {});

/// Unital automorphism fixing a point and every block through it, realized
/// as an elation of the ambient plane with the tangent at the center as
/// axis: x -> x + lambda * l(x) * center.
struct Translation {
  uint32_t center = 0;
  Fe lambda;
  ProjectiveMap matrix;
  std::vector<uint32_t> point_perm;
  std::vector<uint32_t> block_perm;
};

struct TranslationGroup {
  uint32_t center = 0;
  std::vector<Translation> elements;  // identity first
  uint32_t order() const { return uint32_t(elements.size()); }
};

/// Enumerates the one-parameter elation family at the tangent/center flag
/// and keeps exactly the maps preserving the point set. The result is
/// closed under composition.
TranslationGroup translations_at(const HermitianUnital& u, uint32_t p);

struct TransitivityFailure {
  uint32_t x, y, z;  // no translation with center z maps x to y
};

struct TransitivityReport {
  uint64_t configurations_checked = 0;  // (center, block) orbit checks
  std::vector<uint32_t> group_order;    // per center
  std::vector<TransitivityFailure> failures;
  bool pass() const { return failures.empty(); }
};

/// For every block B and every z on B, the translations centered at z must
/// act transitively (hence regularly) on B \ {z}.
TransitivityReport check_translation_transitivity(const HermitianUnital& u);

struct ClosureFailure {
  uint32_t p, z, block_b;
  std::vector<uint32_t> candidates;  // violating B' candidates
  std::string reason;
};

struct ClosureReport {
  ScanOptions options;
  uint64_t configurations_checked = 0;
  std::vector<ClosureFailure> failures;
  bool pass() const { return failures.empty(); }
};

/// Configurations (p; blocks X,Y,Z through p; block B meeting all three
/// with p off B; z != p on their union): exactly one block B' through z
/// meets X, Y, Z in three distinct points; B' is a translation image of B
/// with center p; every block through p meeting B also meets B'.
ClosureReport check_translation_closure(const HermitianUnital& u,
                                        ScanOptions opts = {});

/// Combinatorial part only (existence/uniqueness of B'), applicable to any
/// linear space with constant block size.
ClosureReport check_closure_combinatorial(const LinearSpace& ls,
                                          ScanOptions opts = {});

struct TangentMeetFailure {
  uint32_t p, block_b, block_b2;
};

struct TangentMeetReport {
  ScanOptions options;
  uint64_t configurations_checked = 0;
  std::vector<TangentMeetFailure> failures;
  bool pass() const { return failures.empty(); }
};

/// Configurations (p; X,Y,Z through p; disjoint blocks B, B' off p meeting
/// all three): the meet of the ambient lines of B and B' lies on the
/// tangent at p.
TangentMeetReport check_tangent_meet(const HermitianUnital& u,
                                     ScanOptions opts = {});

struct WilbrinkReport {
  bool condition_I = false;
  std::optional<bool> condition_II;  // evaluated only under condition I
};

WilbrinkReport wilbrink_report(const HermitianUnital& u, ScanOptions opts = {});
WilbrinkReport wilbrink_report(const LinearSpace& ls, ScanOptions opts = {});

std::string report_json(const OnanReport& r);
std::string report_json(const TransitivityReport& r);
std::string report_json(const ClosureReport& r, const std::string& property);
std::string report_json(const TangentMeetReport& r);
std::string report_json(const WilbrinkReport& r);

}  // namespace unitals
