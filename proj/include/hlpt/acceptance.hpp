#pragma once
// The acceptance suite: one entry per statistical or exact-formula gate,
// with pinned seeds, replica counts and tolerances. Used by the `validate`
// CLI subcommand and the acceptance test binary.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace hlpt {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  std::uint64_t seed = 20250808;
  unsigned threads = 0;      // 0: hardware concurrency
  int only = 0;              // run a single criterion (0: all)
};

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options,
                                            std::ostream& log);

}  // namespace hlpt
