#pragma once

// RFC-4180 style tables with a unit-annotated header row.

#include <string>
#include <vector>

#include "mdcs/spectral_transform.hpp"

namespace mdcs {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string format_csv(const CsvTable& table);
CsvTable parse_csv(const std::string& text);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

// Columns: "nu_t [THz]", "amplitude [arb]", "valid".
std::string trace_to_csv(const Trace1D& trace);
Trace1D trace_from_csv(const std::string& text);

// Columns: "t_plus_tau [ps]", "amplitude [arb]".
std::string decay_to_csv(const DecayTrace& trace);
DecayTrace decay_from_csv(const std::string& text);

}  // namespace mdcs
