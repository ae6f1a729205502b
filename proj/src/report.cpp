#include "mdcs/report.hpp"

#include <cmath>
#include <sstream>

#include "text_util.hpp"

namespace mdcs {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

Check within(std::string name, double value, double target, double tolerance, std::string unit,
             std::string note) {
  Check c{std::move(name), value, target, tolerance, std::move(unit), false, std::move(note)};
  c.pass = std::isfinite(value) && std::abs(value - target) <= tolerance;
  return c;
}

Check at_least(std::string name, double value, double threshold, std::string unit, std::string note) {
  Check c{std::move(name), value, threshold, 0.0, std::move(unit), false, std::move(note)};
  c.pass = std::isfinite(value) && value >= threshold;
  if (c.note.empty()) c.note = "minimum";
  return c;
}

Check at_most(std::string name, double value, double threshold, std::string unit, std::string note) {
  Check c{std::move(name), value, threshold, 0.0, std::move(unit), false, std::move(note)};
  c.pass = std::isfinite(value) && value <= threshold;
  if (c.note.empty()) c.note = "maximum";
  return c;
}

void Report::add(std::string key, double value, const std::string& unit) {
  values.emplace_back(std::move(key), detail::sig(value, 8) + (unit.empty() ? "" : " " + unit));
}

bool Report::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

std::string Report::render() const {
  std::ostringstream os;
  os << "[report]\n";
  os << "target = " << target << "\n";
  os << "tool_version = " << kToolVersion << "\n";
  os << "config_hash = " << hex64(config_hash) << "\n";
  os << "seed = " << seed << "\n";
  if (!values.empty()) {
    os << "\n[values]\n";
    for (const auto& [k, v] : values) os << k << " = " << v << "\n";
  }
  os << "\n[checks]\n";
  for (const auto& c : checks) {
    os << c.name << " = " << detail::sig(c.value, 8) << (c.unit.empty() ? "" : " " + c.unit);
    if (c.note == "minimum")
      os << " | required >= " << detail::sig(c.target, 8);
    else if (c.note == "maximum")
      os << " | required <= " << detail::sig(c.target, 8);
    else
      os << " | expected " << detail::sig(c.target, 8) << " +- " << detail::sig(c.tolerance, 8);
    os << (c.unit.empty() ? "" : " " + c.unit) << " | " << (c.pass ? "PASS" : "FAIL");
    if (!c.note.empty() && c.note != "minimum" && c.note != "maximum") os << " | " << c.note;
    os << "\n";
  }
  os << "\nresult = " << (all_pass() ? "PASS" : "FAIL") << "\n";
  return os.str();
}

}  // namespace mdcs
