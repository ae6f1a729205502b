#pragma once

// Line-oriented experiment configuration:
//
//   [section]
//   key = value unit      # comment
//
// Sections: experiment, level_scheme, strain_model, laser, grid, tags,
// output, and one [component.NAME] per population component. Physical
// quantities must carry a unit; counts, flags and names must not.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mdcs/emitter_model.hpp"
#include "mdcs/pathway_engine.hpp"
#include "mdcs/response_synth.hpp"
#include "mdcs/spectral_transform.hpp"

namespace mdcs {

struct ExperimentConfig {
  // [experiment]
  std::uint64_t seed = 1;
  std::size_t emitters = 2000;
  double waiting_time_ps = 0.5;
  std::vector<Detection> detection{Detection::Heterodyne};
  double noise = 0.0;  // complex RMS relative to |S(0, 0)|
  double temperature_k = 10.0;
  double repetition_rate_mhz = 76.0;
  bool excited_state_absorption = false;

  LevelScheme level_scheme;
  StrainModel strain_model;
  LaserSpectrum laser;
  TimeGrid grid = TimeGrid::square(512, 1.171875);
  TagSet tags;
  EnsembleSpec ensemble;

  // [output]
  std::string output_dir = "out";
  int pad_factor = 1;
  bool cosine_window = false;
  ProjectionMode projection = ProjectionMode::AbsSum;
  double deconvolution_floor = 0.05;

  bool operator==(const ExperimentConfig&) const = default;
};

// Throws SyntaxError, SchemaError or UnitError with "line N" and the field name.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

// Applies "section.key = value unit" on top of an existing configuration.
void apply_override(ExperimentConfig& config, std::string_view assignment);

// Canonical text form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

// FNV-1a 64 of the canonical text.
std::uint64_t config_hash(const ExperimentConfig& config);

SynthesisOptions synthesis_options(const ExperimentConfig& config, Detection mode);

}  // namespace mdcs
