#include <algorithm>
#include <set>
#include <tuple>

#include "doctest.h"
#include "mdcs/errors.hpp"
#include "mdcs/pathway_engine.hpp"

using namespace mdcs;

namespace {

// Brute-force walk over double-sided diagrams: bra absorption first, then
// either side for pulses two and three, keeping the sequences that sit in a
// population during the waiting time and end in an emitting |e><g| coherence.
struct Level {
  bool excited;
  int index;
  bool operator==(const Level&) const = default;
};

using Diagram = std::tuple<PathwayKind, int, int>;

int transition_index(const LevelScheme& s, int ground, int excited) {
  const auto tr = s.transitions();
  for (std::size_t k = 0; k < tr.size(); ++k)
    if (tr[k].ground == ground && tr[k].excited == excited) return static_cast<int>(k);
  return -1;
}

std::set<Diagram> brute_force(const LevelScheme& s, bool ground_sharing_only) {
  const int ng = s.two_level ? 1 : 2;
  const int ne = s.two_level ? 1 : 2;
  std::set<Diagram> out;
  for (int g0 = 0; g0 < ng; ++g0)
    for (int x = 0; x < ne; ++x) {
      // After pulse 1: |g0><e_x|.
      const Level ket1{false, g0}, bra1{true, x};
      const int excitation = transition_index(s, g0, x);
      // Pulse 2 on the ket (absorption) or the bra (emission).
      for (int side2 = 0; side2 < 2; ++side2) {
        const int n2 = side2 == 0 ? ne : ng;
        for (int y = 0; y < n2; ++y) {
          const Level ket2 = side2 == 0 ? Level{true, y} : ket1;
          const Level bra2 = side2 == 0 ? bra1 : Level{false, y};
          if (!(ket2 == bra2)) continue;
          // Pulse 3 leaves |e><g|.
          if (ket2.excited) {
            for (int c = 0; c < ng; ++c) {
              const int emission = transition_index(s, c, ket2.index);
              if (ground_sharing_only && s.transitions()[excitation].ground != c) continue;
              out.insert({PathwayKind::StimulatedEmission, excitation, emission});
            }
          } else {
            for (int z = 0; z < ne; ++z) {
              const int emission = transition_index(s, ket2.index, z);
              out.insert({PathwayKind::GroundStateBleach, excitation, emission});
            }
          }
        }
      }
    }
  return out;
}

std::set<Diagram> engine(const LevelScheme& s) {
  std::set<Diagram> out;
  for (const auto& p : enumerate_rephasing_pathways(s))
    out.insert({p.kind, p.excitation, p.emission});
  return out;
}

}  // namespace

TEST_CASE("pathway counts") {
  CHECK(enumerate_rephasing_pathways(LevelScheme::siv_default()).size() == 12);
  CHECK(enumerate_rephasing_pathways(LevelScheme::two_level_at(406.0)).size() == 2);
}

TEST_CASE("pathways match a brute-force diagram walk") {
  const auto s = LevelScheme::siv_default();
  CHECK(engine(s) == brute_force(s, true));
  CHECK(engine(LevelScheme::two_level_at(406.0)) ==
        brute_force(LevelScheme::two_level_at(406.0), true));
  // The full walk also finds SE cross peaks through a shared excited level.
  const auto all = brute_force(s, false);
  CHECK(all.size() == 16);
  const auto selected = engine(s);
  CHECK(std::includes(all.begin(), all.end(), selected.begin(), selected.end()));
}

TEST_CASE("cross peaks only join transitions with a common ground sublevel") {
  const auto s = LevelScheme::siv_default();
  const auto tr = s.transitions();
  std::set<std::pair<int, int>> cross;
  for (const auto& p : enumerate_rephasing_pathways(s)) {
    CHECK(p.shares_ground);
    CHECK(p.sign == +1);
    CHECK(p.phase_signature == kRephasingSignature);
    CHECK(tr[p.excitation].ground == tr[p.emission].ground);
    if (!p.is_direct()) cross.insert({p.excitation, p.emission});
  }
  const std::set<std::pair<int, int>> expected{{0, 2}, {2, 0}, {1, 3}, {3, 1}};
  CHECK(cross == expected);
}

TEST_CASE("pathway ordering") {
  const auto p = enumerate_rephasing_pathways(LevelScheme::siv_default());
  for (std::size_t k = 1; k < p.size(); ++k) {
    const auto a = std::make_tuple(p[k - 1].excitation, p[k - 1].emission, p[k - 1].kind);
    const auto b = std::make_tuple(p[k].excitation, p[k].emission, p[k].kind);
    CHECK(a < b);
  }
}

TEST_CASE("excited-state absorption is rejected") {
  PathwayOptions o;
  o.include_excited_state_absorption = true;
  CHECK_THROWS_AS(enumerate_rephasing_pathways(LevelScheme::siv_default(), o), UnsupportedFeature);
}

TEST_CASE("tag arithmetic") {
  const auto tags = TagSet::defaults();
  CHECK(signature_frequency(kRephasingSignature, tags) == doctest::Approx(0.021).epsilon(1e-9));
  CHECK(signature_frequency({+1, -1, +1, -1}, tags) == doctest::Approx(-0.193).epsilon(1e-9));
  CHECK(signature_frequency({0, 0, 0, 0}, tags) == 0.0);
}
