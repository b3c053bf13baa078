#pragma once

#include <string>
#include <vector>

namespace dislo {

// Column-oriented CSV table with a mandatory header row.  Doubles are
// written with max_digits10 so that parse(write(t)) == t bit-exactly.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  size_t cols() const { return header.size(); }
  int column_index(const std::string& name) const;  // -1 if absent
};

CsvTable read_csv(const std::string& path);
void write_csv(const std::string& path, const CsvTable& table);
std::string format_double(double v);

void write_text_file(const std::string& path, const std::string& content);

// Flat row-major float64 dump with a JSON sidecar describing the grid.
void write_field_binary(const std::string& path_base,
                        const std::vector<double>& values, int nx, int ny,
                        double Lx, double Ly, double eps, double a_exponent,
                        double time);

}  // namespace dislo
