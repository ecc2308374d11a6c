// Runs the acceptance suite and prints one pass/fail line per criterion.
// Exit code is the number of failed criteria.

#include <cstdlib>
#include <cstring>
#include <iostream>

#include "hlpt/acceptance.hpp"

int main(int argc, char** argv) {
  hlpt::AcceptanceOptions options;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc)
      options.only = std::atoi(argv[++i]);
    else if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc)
      options.seed = std::strtoull(argv[++i], nullptr, 10);
    else if (std::strcmp(argv[i], "--threads") == 0 && i + 1 < argc)
      options.threads = static_cast<unsigned>(std::atoi(argv[++i]));
  }
  const auto results = hlpt::run_acceptance(options, std::cout);
  int failures = 0;
  for (const auto& r : results)
    if (!r.pass) ++failures;
  std::cout << results.size() - failures << "/" << results.size()
            << " criteria passed\n";
  return failures;
}
