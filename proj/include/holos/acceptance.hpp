#pragma once

#include <string>
#include <vector>

namespace holos {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

// Runs the full acceptance suite at the pinned tolerances; prints one
// PASS/FAIL line per criterion when verbose.
std::vector<CriterionResult> run_acceptance(bool verbose);

}  // namespace holos
