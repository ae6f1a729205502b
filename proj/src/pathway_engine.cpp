#include "mdcs/pathway_engine.hpp"

#include "mdcs/errors.hpp"

namespace mdcs {

std::vector<Pathway> enumerate_rephasing_pathways(const LevelScheme& scheme,
                                                  const PathwayOptions& options) {
  if (options.include_excited_state_absorption)
    throw UnsupportedFeature("excited-state absorption pathways are not modelled");
  scheme.validate();

  const auto tr = scheme.transitions();
  const int n = static_cast<int>(tr.size());
  std::vector<Pathway> out;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (tr[a].ground != tr[b].ground) continue;
      out.push_back({PathwayKind::GroundStateBleach, a, b, +1, true, kRephasingSignature});
      // Stimulated emission leaves the excited population of `a`; emission on a
      // different ground sublevel would be a shared-excited-level cross peak.
      if (a == b)
        out.push_back({PathwayKind::StimulatedEmission, a, b, +1, true, kRephasingSignature});
    }
  }
  return out;
}

double signature_frequency(const PhaseSignature& signature, const TagSet& tags) {
  double f = 0.0;
  for (std::size_t k = 0; k < 4; ++k) f += signature[k] * tags.mhz[k];
  return f;
}

}  // namespace mdcs
