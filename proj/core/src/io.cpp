#include "dislo/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "dislo/errors.hpp"

namespace dislo {

int CsvTable::column_index(const std::string& name) const {
  for (size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

static std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open CSV file: " + path);
  CsvTable t;
  std::string line;
  if (!std::getline(in, line))
    throw FormatError("empty CSV file: " + path);
  t.header = split_csv_line(line);
  if (t.header.empty())
    throw FormatError("missing header row in " + path);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != t.header.size())
      throw FormatError("ragged CSV row in " + path);
    std::vector<double> row(cells.size());
    for (size_t i = 0; i < cells.size(); ++i) {
      char* end = nullptr;
      row[i] = std::strtod(cells[i].c_str(), &end);
      if (end == cells[i].c_str())
        throw FormatError("non-numeric CSV cell '" + cells[i] + "' in " + path);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_csv(const std::string& path, const CsvTable& table) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write CSV file: " + path);
  for (size_t i = 0; i < table.header.size(); ++i) {
    if (i) out << ',';
    out << table.header[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << format_double(row[i]);
    }
    out << '\n';
  }
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write file: " + path);
  out << content;
}

void write_field_binary(const std::string& path_base,
                        const std::vector<double>& values, int nx, int ny,
                        double Lx, double Ly, double eps, double a_exponent,
                        double time) {
  {
    std::ofstream out(path_base + ".bin", std::ios::binary);
    if (!out) throw FormatError("cannot write " + path_base + ".bin");
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size() * sizeof(double)));
  }
  std::ostringstream os;
  os << "{\"shape\":[" << ny << "," << nx << "],"
     << "\"order\":\"row-major\",\"dtype\":\"float64\","
     << "\"grid\":{\"Lx\":" << format_double(Lx) << ",\"Ly\":" << format_double(Ly)
     << "},\"eps\":" << format_double(eps)
     << ",\"a\":" << format_double(a_exponent)
     << ",\"time\":" << format_double(time) << "}\n";
  write_text_file(path_base + ".json", os.str());
}

}  // namespace dislo
