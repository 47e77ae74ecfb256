#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "unitals/embed.hpp"

namespace unitals {

struct CriterionResult {
  std::string id;
  std::string title;
  bool pass = false;
  std::string details_json;  // deterministic payload, no timings
  double millis = 0.0;
};

struct SuiteOptions {
  uint64_t seed = 0;
  std::vector<std::string> only;  // empty = all criteria
  uint32_t workers = 2;
};

struct SuiteResult {
  std::vector<CriterionResult> criteria;
  bool all_pass = false;
  /// Canonical machine-readable summary; byte-identical across runs with
  /// the same options.
  std::string report_json;
};

/// Runs the full verification suite: construction parameters, line
/// profiles, form cross-check, configuration searches, translation
/// properties, Baer sublines, subunital search results, standardness,
/// the order-2 criterion, the embedding-enumeration law, and the
/// reproducibility contract.
SuiteResult run_verification_suite(const SuiteOptions& opts = {});

/// One "id: PASS/FAIL title" line per criterion plus a footer.
std::string format_suite_table(const SuiteResult& res);

}  // namespace unitals
