// Brute-force oracles and generators shared by the unit and acceptance
// suites.  Everything here is deliberately independent of the library's own
// algorithmic paths: the stopping-time oracle enumerates cubes directly from
// the definition, and the generators only use the public function builders.
#pragma once

#include <vector>

#include "sparsedom/config.hpp"
#include "sparsedom/domination.hpp"

namespace sparsedom::oracles {

// Maximal-cube selection straight from the definition: enumerate every cube
// of the halving tower, mark those whose exceptional density exceeds the
// height, keep the ones with no marked strict ancestor.
inline std::vector<Cube> cz_oracle(const Window& w, const LatticeSet& e,
                                   const Cube& q0, const Ratio& lambda) {
  std::vector<Cube> all;
  std::vector<Cube> level{q0};
  while (true) {
    std::vector<Cube> next;
    for (const Cube& q : level) {
      const auto sp = w.span(q);
      if ((sp.hi[0] - sp.lo[0]) % 2 != 0) continue;
      for (const Cube& c : children(q)) next.push_back(c);
    }
    if (next.empty()) break;
    for (const Cube& c : next) all.push_back(c);
    level = next;
  }
  std::vector<Cube> hit;
  for (const Cube& q : all) {
    std::int64_t cnt = 0;
    w.for_each(w.span(q),
               [&](std::int64_t i) { cnt += e.contains(i) ? 1 : 0; });
    if (cnt * lambda.den > lambda.num * w.span(q).count()) hit.push_back(q);
  }
  std::vector<Cube> maximal;
  for (const Cube& q : hit) {
    bool top = true;
    for (const Cube& other : hit)
      if (!(other == q) && other.contains(q)) top = false;
    if (top) maximal.push_back(q);
  }
  return maximal;
}

inline bool same_cubes(const std::vector<Cube>& a, const std::vector<Cube>& b) {
  if (a.size() != b.size()) return false;
  for (const Cube& q : a) {
    bool found = false;
    for (const Cube& p : b)
      if (p == q) found = true;
    if (!found) return false;
  }
  return true;
}

// Random family of lattice cubes with greedily allocated disjoint witnesses.
inline SparseFamily random_family(const Window& w, int cubes, Ratio eta,
                                  std::uint64_t seed) {
  SparseFamily fam(w, eta);
  DeterministicRng rng(seed);
  std::vector<char> taken(static_cast<std::size_t>(w.cell_count()), 0);
  const std::int64_t n = w.cells_per_axis();
  for (int k = 0;
       k < cubes * 4 && static_cast<int>(fam.entries.size()) < cubes; ++k) {
    const std::int64_t side = std::int64_t{1} << rng.uniform_int(6);
    const std::int64_t ax =
        rng.uniform_int(std::max<std::int64_t>(n - side, 1));
    const Cube q(1, {w.cube().corner(0) + ax, 0}, side, w.level());
    const auto sp = w.span(q);
    std::vector<std::int64_t> free_cells;
    w.for_each(sp, [&](std::int64_t i) {
      if (!taken[static_cast<std::size_t>(i)]) free_cells.push_back(i);
    });
    const std::int64_t need = (side * eta.num + eta.den - 1) / eta.den;
    if (static_cast<std::int64_t>(free_cells.size()) < need) continue;
    free_cells.resize(static_cast<std::size_t>(need));
    for (const std::int64_t i : free_cells)
      taken[static_cast<std::size_t>(i)] = 1;
    fam.entries.push_back(SparseEntry{q, LatticeSet(std::move(free_cells))});
  }
  return fam;
}

}  // namespace sparsedom::oracles
