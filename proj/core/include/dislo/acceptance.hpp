#pragma once

#include <string>
#include <vector>

namespace dislo {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double measured = 0.0;   // worst normalized or raw quantity, see note
  double threshold = 0.0;
  double seconds = 0.0;
  std::string note;
};

struct AcceptanceOptions {
  std::vector<int> only;  // empty -> run all criteria
  bool verbose = true;    // print one line per criterion as it finishes
};

// Runs the acceptance criteria (exact small-instance oracles plus the
// trend suites) and returns one result per criterion.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options);

std::string acceptance_summary_json(const std::vector<CriterionResult>& results);

}  // namespace dislo
