#pragma once

// One-command reproductions: fig1c, fig1d, fig2, fig3, fig4, t1scan.
//
// A target runs one or more stages. Each stage starts from an embedded default
// configuration (or a user file), receives the same overrides, and writes its
// datasets and CSV traces under <out_dir>/<target>/.

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "mdcs/config.hpp"
#include "mdcs/report.hpp"

namespace mdcs {

const std::vector<std::string>& reproduction_targets();
bool is_reproduction_target(std::string_view target);

// Stage names of a target, e.g. {"bright", "hidden"} for fig2.
std::vector<std::string> reproduction_stages(std::string_view target);

// Default configuration text of one stage. Throws InvalidSpec on unknown names.
std::string default_config_text(std::string_view target, std::string_view stage);

struct ReproduceOptions {
  std::string out_dir;                 // empty: the stage config's output dir
  std::vector<std::string> overrides;  // "section.key = value unit", applied in order
  const ExperimentConfig* base = nullptr;  // replaces the embedded defaults when set
  bool has_seed = false;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool write_files = true;
  std::function<void(const std::string&)> log;
};

struct Reproduction {
  Report report;
  std::vector<std::string> files;  // everything written, report last
};

Reproduction run_reproduction(std::string_view target, const ReproduceOptions& options = {});

}  // namespace mdcs
