#pragma once

// Plain-text key-value reports with per-check tolerances.

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mdcs {

inline constexpr const char* kToolVersion = "1.0.0";

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

struct Check {
  std::string name;
  double value = 0.0;
  double target = 0.0;
  double tolerance = 0.0;  // |value - target| <= tolerance, unless `pass` is set explicitly
  std::string unit;
  bool pass = false;
  std::string note;
};

// Check of a measured value against target +/- tolerance.
Check within(std::string name, double value, double target, double tolerance, std::string unit,
             std::string note = {});
// Check of value >= threshold (tolerance records the threshold).
Check at_least(std::string name, double value, double threshold, std::string unit,
               std::string note = {});
Check at_most(std::string name, double value, double threshold, std::string unit,
              std::string note = {});

struct Report {
  std::string target;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> values;
  std::vector<Check> checks;

  void add(std::string key, std::string value) { values.emplace_back(std::move(key), std::move(value)); }
  void add(std::string key, double value, const std::string& unit = {});
  bool all_pass() const;
  std::string render() const;
};

}  // namespace mdcs
