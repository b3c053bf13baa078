// Acceptance suite: runs every criterion at its pinned tolerance and prints
// one pass/fail line each.  Exit code 0 only when all selected criteria
// pass.  DISLO_ACCEPT_ONLY=1,4,5 restricts the run (development aid).
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

#include "dislo/acceptance.hpp"
#include "dislo/io.hpp"

int main(int argc, char** argv) {
  dislo::AcceptanceOptions opt;
  const char* env = std::getenv("DISLO_ACCEPT_ONLY");
  std::string sel = env ? env : "";
  for (int i = 1; i < argc; ++i) {
    if (std::strncmp(argv[i], "--only=", 7) == 0) sel = argv[i] + 7;
  }
  if (!sel.empty()) {
    size_t pos = 0;
    while (pos < sel.size()) {
      size_t comma = sel.find(',', pos);
      if (comma == std::string::npos) comma = sel.size();
      opt.only.push_back(std::atoi(sel.substr(pos, comma - pos).c_str()));
      pos = comma + 1;
    }
  }

  auto results = dislo::run_acceptance(opt);
  dislo::write_text_file("acceptance_summary.json",
                         dislo::acceptance_summary_json(results));

  int failures = 0;
  for (const auto& r : results)
    if (!r.pass) ++failures;
  std::printf("acceptance: %zu criteria, %d failed\n", results.size(), failures);
  return failures == 0 ? 0 : 1;
}
