#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace spinodal {

struct CriterionResult {
  int index = 0;
  std::string name;
  bool passed = false;
  std::string detail;  // measured quantities, or the error that aborted it
};

struct AcceptanceOptions {
  int n = 3;                 // primary dimension for the field-based criteria
  std::uint64_t seed = 7;    // fixes every stochastic choice
  std::string artifact_dir = "acceptance_artifacts";  // criterion 13 output
};

/// Runs the thirteen verification criteria in order and returns one result
/// per criterion. A criterion that throws is reported as failed with the
/// error text; the suite itself always returns all thirteen entries.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts);

/// True iff every entry passed.
bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace spinodal
