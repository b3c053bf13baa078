#pragma once

#include <string>
#include <vector>

namespace dislo {

// One verified condition: measured value against a threshold, with the
// convention that `pass` already encodes the comparison direction.
struct CheckLine {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string note;
};

struct Report {
  std::string title;
  std::vector<CheckLine> checks;

  void add(std::string name, bool pass, double measured, double threshold,
           std::string note = {});
  // measured <= threshold
  void add_le(std::string name, double measured, double threshold,
              std::string note = {});
  // measured >= threshold
  void add_ge(std::string name, double measured, double threshold,
              std::string note = {});

  bool all_pass() const;
  // Worst (most violated) line, by measured-threshold ordering of failures.
  const CheckLine* worst() const;

  std::string to_json() const;
  std::string summary_line() const;
};

}  // namespace dislo
