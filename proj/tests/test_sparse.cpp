#include "doctest.h"

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "sparsedom/config.hpp"
#include "sparsedom/sparse.hpp"

using namespace sparsedom;
using oracles::random_family;

namespace {

Window unit_window(int level) {
  return Window(Cube::interval(0, std::int64_t{1} << level, level));
}

GridFunction indicator_on(const Window& w, const Cube& q) {
  GridFunction f = GridFunction::zero(w);
  w.for_each(w.span(q), [&](std::int64_t i) { f[i] = 1.0; });
  return f;
}

}  // namespace

TEST_CASE("verification accepts honest families and rejects overlaps") {
  const Window w = unit_window(6);
  SUBCASE("disjoint cubes with full witnesses") {
    SparseFamily fam(w, Ratio{1, 1});
    for (std::int64_t k = 0; k < 4; ++k) {
      const Cube q = Cube::interval(16 * k, 16, 6);
      fam.entries.push_back(SparseEntry{q, LatticeSet::cube_cells(w, q)});
    }
    const auto rep = verify_sparse(fam);
    CHECK(rep.ok);
    CHECK(rep.worst_ratio == doctest::Approx(1.0));
  }
  SUBCASE("nested halves at eta one half") {
    SparseFamily fam(w, Ratio{1, 2});
    const Cube whole = Cube::interval(0, 64, 6);
    const Cube left = Cube::interval(0, 32, 6);
    fam.entries.push_back(
        SparseEntry{whole, LatticeSet::cube_cells(w, Cube::interval(32, 32, 6))});
    fam.entries.push_back(SparseEntry{left, LatticeSet::cube_cells(w, left)});
    CHECK(verify_sparse(fam).ok);
  }
  SUBCASE("duplicate cube with overlapping witnesses fails") {
    SparseFamily fam(w, Ratio{1, 2});
    const Cube q = Cube::interval(0, 32, 6);
    fam.entries.push_back(SparseEntry{q, LatticeSet::cube_cells(w, q)});
    fam.entries.push_back(SparseEntry{q, LatticeSet::cube_cells(w, q)});
    const auto rep = verify_sparse(fam);
    CHECK(!rep.ok);
    CHECK(rep.detail == "witness sets overlap");
  }
  SUBCASE("undersized witness fails the exact mass check") {
    SparseFamily fam(w, Ratio{1, 2});
    const Cube q = Cube::interval(0, 32, 6);
    fam.entries.push_back(
        SparseEntry{q, LatticeSet::cube_cells(w, Cube::interval(0, 15, 6))});
    const auto rep = verify_sparse(fam);
    CHECK(!rep.ok);
    REQUIRE(rep.violating_entries.size() == 1);
  }
  SUBCASE("witness outside the cube fails") {
    SparseFamily fam(w, Ratio{1, 2});
    const Cube q = Cube::interval(0, 4, 6);
    fam.entries.push_back(
        SparseEntry{q, LatticeSet::cube_cells(w, Cube::interval(2, 4, 6))});
    CHECK(!verify_sparse(fam).ok);
  }
}

TEST_CASE("sparse operator on simple families") {
  const Window w = unit_window(8);
  const Cube unit = w.cube();
  SparseFamily fam(w, Ratio{1, 1});
  fam.entries.push_back(SparseEntry{unit, LatticeSet::cube_cells(w, unit)});
  SUBCASE("averaging an indicator reproduces it") {
    const GridFunction f = indicator_on(w, unit);
    const GridFunction a = apply_sparse(fam, f, 1.0);
    CHECK((a.values() == 1.0).all());
  }
  SUBCASE("quarter indicator under the 2-average") {
    const GridFunction f = indicator_on(w, Cube::interval(0, 64, 8));
    const GridFunction a = apply_sparse(fam, f, 2.0);
    for (std::int64_t i = 0; i < w.cell_count(); ++i)
      CHECK(a[i] == doctest::Approx(0.5).epsilon(1e-13));
  }
  SUBCASE("empty family gives zero") {
    const SparseFamily empty(w, Ratio{1, 2});
    const GridFunction f = indicator_on(w, unit);
    CHECK((apply_sparse(empty, f, 1.0).values() == 0.0).all());
  }
  SUBCASE("negative inputs are rejected") {
    GridFunction f = GridFunction::constant(w, 1.0);
    f[7] = -1.0;
    CHECK_THROWS_AS(apply_sparse(fam, f, 1.0), NegativityError);
  }
}

TEST_CASE("sparse operator monotonicity") {
  const Window w = unit_window(7);
  const SparseFamily fam = random_family(w, 20, Ratio{1, 2}, 99);
  REQUIRE(fam.entries.size() >= 10);
  DeterministicRng rng(101);
  Eigen::ArrayXd va(w.cell_count()), vb(w.cell_count());
  for (std::int64_t i = 0; i < w.cell_count(); ++i) {
    va[i] = rng.uniform01();
    vb[i] = va[i] + rng.uniform01();  // vb >= va
  }
  const GridFunction fa(w, va), fb(w, vb);
  const GridFunction aa = apply_sparse(fam, fa, 1.0);
  const GridFunction ab = apply_sparse(fam, fb, 1.0);
  SparseFamily sub(w, fam.eta);
  sub.entries.assign(fam.entries.begin(), fam.entries.begin() + 5);
  const GridFunction as = apply_sparse(sub, fa, 1.0);
  for (std::int64_t i = 0; i < w.cell_count(); ++i) {
    CHECK(aa[i] <= ab[i] + 1e-12);   // monotone in f
    CHECK(as[i] <= aa[i] + 1e-12);   // monotone in the family
  }
  // nondecreasing in r
  const GridFunction a1 = apply_sparse(fam, fa, 1.0);
  const GridFunction a2 = apply_sparse(fam, fa, 2.0);
  for (std::int64_t i = 0; i < w.cell_count(); ++i)
    CHECK(a2[i] >= a1[i] - 1e-12);
}

TEST_CASE("three-grid decomposition") {
  const Window w = unit_window(10);
  SUBCASE("a dyadic family is its own grid-0 image") {
    SparseFamily fam(w, Ratio{1, 2});
    const Cube q = Cube::interval(0, 512, 10);  // [0, 1/2)
    fam.entries.push_back(
        SparseEntry{q, LatticeSet::cube_cells(w, Cube::interval(0, 256, 10))});
    const auto dec = three_grid_decompose(fam);
    REQUIRE(dec.families.size() == 3);
    REQUIRE(dec.families[0].entries.size() == 1);
    CHECK(dec.families[0].entries[0].cube == q);
    CHECK(dec.families[1].entries.empty());
    CHECK(dec.families[2].entries.empty());
    CHECK(dec.max_side_ratio == 1);
  }
  SUBCASE("a non-dyadic interval lands in some grid within 6x") {
    SparseFamily fam(w, Ratio{1, 2});
    const Cube q = Cube::interval(137, 50, 10);
    fam.entries.push_back(
        SparseEntry{q, LatticeSet::cube_cells(w, Cube::interval(137, 25, 10))});
    const auto dec = three_grid_decompose(fam);
    int placed = 0;
    for (const auto& sub : dec.families) {
      for (const auto& e : sub.entries) {
        CHECK(e.cube.contains(q));
        CHECK(e.cube.side_length() <= 6.0 * q.side_length() + 1e-12);
        ++placed;
      }
      CHECK(verify_sparse(sub).ok);
    }
    CHECK(placed == 1);
  }
  SUBCASE("pointwise comparability and witness-mass preservation") {
    DeterministicRng seeds(7);
    for (int trial = 0; trial < 10; ++trial) {
      const SparseFamily fam = random_family(w, 50, Ratio{1, 2}, 200 + trial);
      const auto dec = three_grid_decompose(fam);
      std::int64_t mass_in = 0, mass_out = 0;
      for (const auto& e : fam.entries) mass_in += e.witness.size();
      for (const auto& sub : dec.families) {
        CHECK(verify_sparse(sub).ok);
        for (const auto& e : sub.entries) mass_out += e.witness.size();
      }
      CHECK(mass_in == mass_out);  // each cube goes to exactly one grid

      for (double r : {1.0, 2.0}) {
        DeterministicRng rng(300 + trial);
        Eigen::ArrayXd v(w.cell_count());
        for (std::int64_t i = 0; i < w.cell_count(); ++i)
          v[i] = rng.uniform01();
        const GridFunction f(w, v);
        const GridFunction lhs = apply_sparse(fam, f, r);
        GridFunction rhs = GridFunction::zero(w);
        for (const auto& sub : dec.families)
          rhs.values() += apply_sparse(sub, f, r).values();
        const double c = std::pow(6.0, 1.0 / r);
        for (std::int64_t i = 0; i < w.cell_count(); ++i)
          CHECK(lhs[i] <= c * rhs[i] * (1.0 + 1e-9) + 1e-15);
      }
    }
  }
}

TEST_CASE("family serialization round-trips bit-exactly") {
  const Window w = unit_window(8);
  SparseFamily fam = random_family(w, 12, Ratio{1, 2}, 55);
  fam.grid_tag = 2;
  std::stringstream s1;
  save_family(fam, s1);
  SparseFamily loaded = load_family(s1);
  std::stringstream s2;
  save_family(loaded, s2);
  std::stringstream s1b;
  save_family(fam, s1b);
  CHECK(s2.str() == s1b.str());
  CHECK(loaded.entries.size() == fam.entries.size());
  CHECK(loaded.eta.num == fam.eta.num);
  CHECK(loaded.eta.den == fam.eta.den);
  REQUIRE(loaded.grid_tag.has_value());
  CHECK(*loaded.grid_tag == 2);
  for (std::size_t i = 0; i < fam.entries.size(); ++i) {
    CHECK(loaded.entries[i].cube == fam.entries[i].cube);
    CHECK(loaded.entries[i].witness == fam.entries[i].witness);
  }
  std::stringstream bad("sparse-family v1\ndim 1\n");
  CHECK_THROWS_AS(load_family(bad), ParseError);
}

TEST_CASE("two-dimensional families serialize and decompose") {
  const Window w(Cube(2, {0, 0}, 64, 6));
  SparseFamily fam(w, Ratio{1, 2});
  DeterministicRng rng(219);
  std::vector<char> taken(static_cast<std::size_t>(w.cell_count()), 0);
  for (int k = 0; k < 12; ++k) {
    const std::int64_t side = std::int64_t{1} << rng.uniform_int(4);
    const std::int64_t ax = rng.uniform_int(64 - side);
    const std::int64_t ay = rng.uniform_int(64 - side);
    const Cube q = Cube::box(ax, ay, side, 6);
    std::vector<std::int64_t> cells;
    w.for_each(w.span(q), [&](std::int64_t i) {
      if (!taken[static_cast<std::size_t>(i)]) cells.push_back(i);
    });
    const std::int64_t need = (side * side + 1) / 2;
    if (static_cast<std::int64_t>(cells.size()) < need) continue;
    cells.resize(static_cast<std::size_t>(need));
    for (const std::int64_t i : cells) taken[static_cast<std::size_t>(i)] = 1;
    fam.entries.push_back(SparseEntry{q, LatticeSet(std::move(cells))});
  }
  REQUIRE(fam.entries.size() >= 6);
  REQUIRE(verify_sparse(fam).ok);

  std::stringstream s1;
  save_family(fam, s1);
  const SparseFamily loaded = load_family(s1);
  std::stringstream s2, s1b;
  save_family(loaded, s2);
  save_family(fam, s1b);
  CHECK(s2.str() == s1b.str());

  const auto dec = three_grid_decompose(fam);
  REQUIRE(dec.families.size() == 9);
  std::size_t placed = 0;
  for (const auto& sub : dec.families) {
    CHECK(verify_sparse(sub).ok);
    CHECK(sub.eta.den == 2 * 36);  // eta / 6^dim
    placed += sub.entries.size();
  }
  CHECK(placed == fam.entries.size());

  DeterministicRng frng(220);
  Eigen::ArrayXd v(w.cell_count());
  for (std::int64_t i = 0; i < w.cell_count(); ++i) v[i] = frng.uniform01();
  const GridFunction f(w, v);
  const GridFunction lhs = apply_sparse(fam, f, 1.0);
  GridFunction rhs = GridFunction::zero(w);
  for (const auto& sub : dec.families)
    rhs.values() += apply_sparse(sub, f, 1.0).values();
  for (std::int64_t i = 0; i < w.cell_count(); ++i)
    CHECK(lhs[i] <= 36.0 * rhs[i] * (1.0 + 1e-9) + 1e-15);
}
