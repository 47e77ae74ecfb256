// Acceptance suite runner: executes every verification criterion and
// prints one pass/fail line per criterion. Exit status 0 iff all pass.
#include <cstdio>

#include "unitals/verify.hpp"

int main() {
  unitals::SuiteOptions opts;
  opts.seed = 20240601;
  opts.workers = 2;
  auto res = unitals::run_verification_suite(opts);
  std::fputs(unitals::format_suite_table(res).c_str(), stdout);
  return res.all_pass ? 0 : 1;
}
