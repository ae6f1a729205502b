#pragma once

// Third-order rephasing pathways of a ground/excited doublet system and the
// radio-frequency tag arithmetic of the collinear four-pulse scheme.

#include <array>
#include <span>
#include <vector>

#include "mdcs/emitter_model.hpp"

namespace mdcs {

using PhaseSignature = std::array<int, 4>;

inline constexpr PhaseSignature kRephasingSignature{-1, +1, +1, -1};

enum class PathwayKind { GroundStateBleach, StimulatedEmission };

// One double-sided rephasing pathway: the first (conjugate) interaction opens a
// coherence on `excitation`, the system sits in a population during the
// waiting time, and the third interaction radiates on `emission`.
struct Pathway {
  PathwayKind kind = PathwayKind::GroundStateBleach;
  int excitation = 0;  // transition index into LevelScheme::transitions()
  int emission = 0;
  int sign = +1;
  bool shares_ground = true;
  PhaseSignature phase_signature = kRephasingSignature;

  bool is_direct() const { return excitation == emission; }
  bool operator==(const Pathway&) const = default;
};

struct PathwayOptions {
  // Reserved: excited-state absorption needs a third manifold that the level
  // scheme does not describe. Enabling it raises UnsupportedFeature.
  bool include_excited_state_absorption = false;
};

// Ground-state bleach for every excitation/emission pair that shares a ground
// sublevel, plus stimulated emission on every direct peak. Ordered by
// excitation index, then emission index, GSB before SE.
std::vector<Pathway> enumerate_rephasing_pathways(const LevelScheme& scheme,
                                                  const PathwayOptions& options = {});

struct TagSet {
  std::array<double, 4> mhz{80.000, 80.107, 80.214, 80.300};

  static TagSet defaults() { return {}; }
  bool operator==(const TagSet&) const = default;
};

// Signed dot product of a phase signature with the pulse tags (MHz).
double signature_frequency(const PhaseSignature& signature, const TagSet& tags);

}  // namespace mdcs
