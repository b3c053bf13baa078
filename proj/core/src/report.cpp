#include "dislo/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace dislo {

void Report::add(std::string name, bool pass, double measured,
                 double threshold, std::string note) {
  checks.push_back({std::move(name), pass, measured, threshold, std::move(note)});
}

void Report::add_le(std::string name, double measured, double threshold,
                    std::string note) {
  add(std::move(name), measured <= threshold, measured, threshold, std::move(note));
}

void Report::add_ge(std::string name, double measured, double threshold,
                    std::string note) {
  add(std::move(name), measured >= threshold, measured, threshold, std::move(note));
}

bool Report::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

const CheckLine* Report::worst() const {
  const CheckLine* w = nullptr;
  double worst_gap = -1.0;
  for (const auto& c : checks) {
    if (c.pass) continue;
    double gap = std::fabs(c.measured - c.threshold);
    if (gap > worst_gap) {
      worst_gap = gap;
      w = &c;
    }
  }
  return w;
}

static std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      default: out += ch;
    }
  }
  return out;
}

static std::string num_to_json(double v) {
  if (std::isnan(v)) return "null";
  if (std::isinf(v)) return v > 0 ? "1e308" : "-1e308";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string Report::to_json() const {
  std::ostringstream os;
  os << "{\"title\":\"" << json_escape(title) << "\",\"all_pass\":"
     << (all_pass() ? "true" : "false") << ",\"checks\":[";
  for (size_t i = 0; i < checks.size(); ++i) {
    const auto& c = checks[i];
    if (i) os << ",";
    os << "{\"name\":\"" << json_escape(c.name) << "\",\"pass\":"
       << (c.pass ? "true" : "false") << ",\"measured\":" << num_to_json(c.measured)
       << ",\"threshold\":" << num_to_json(c.threshold);
    if (!c.note.empty()) os << ",\"note\":\"" << json_escape(c.note) << "\"";
    os << "}";
  }
  os << "]}";
  return os.str();
}

std::string Report::summary_line() const {
  size_t ok = 0;
  for (const auto& c : checks)
    if (c.pass) ++ok;
  std::ostringstream os;
  os << title << ": " << ok << "/" << checks.size() << " checks pass";
  if (const CheckLine* w = worst())
    os << " (worst: " << w->name << " measured=" << w->measured
       << " threshold=" << w->threshold << ")";
  return os.str();
}

}  // namespace dislo
