#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sparsedom/grid_function.hpp"
#include "sparsedom/lattice.hpp"

namespace sparsedom {

/// Exact rational in lowest terms; used for sparsity parameters so that
/// |E_Q| >= eta |Q| is an integer comparison, never a float one.
struct Ratio {
  std::int64_t num = 1;
  std::int64_t den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

struct SparseEntry {
  Cube cube;
  LatticeSet witness;  // E_Q, cells of the family's window
};

/// A family of cubes, each owning a witness subset of its cells.  The family
/// carries the window its witnesses are indexed against and the sparsity
/// parameter it claims; verify_sparse checks the claim rather than trusting it.
struct SparseFamily {
  Window window;
  Ratio eta;
  std::vector<SparseEntry> entries;
  std::optional<int> grid_tag;  // set when all cubes belong to one shifted grid

  explicit SparseFamily(const Window& w, Ratio eta = {1, 2})
      : window(w), eta(eta) {}
};

struct SparseReport {
  bool ok = true;
  double worst_ratio = 1.0;  // min over entries of |E_Q| / |Q|
  std::vector<std::size_t> violating_entries;
  std::string detail;
};

/// Checks witness containment, pairwise disjointness, and the measure lower
/// bound, all exactly.  Never throws; reports.
SparseReport verify_sparse(const SparseFamily& s);

/// A_{r,S} f = sum over entries of the r-average of f over the cube, spread
/// back over the cube (cell-center membership).  Requires f >= 0 cell-wise.
GridFunction apply_sparse(const SparseFamily& s, const GridFunction& f,
                          double r = 1.0);

/// Decomposition of an arbitrary family into 3^dim families, each supported
/// on one shifted dyadic grid.  Every cube is assigned to the first grid (by
/// identifier) holding an enclosing grid cube of side at most 6x; witnesses
/// are inherited, so each output family is eta/6^dim sparse.
struct ThreeGridDecomposition {
  std::vector<SparseFamily> families;  // one per grid, indexed by grid id
  std::int64_t max_side_ratio = 1;     // worst enclosing-cube side ratio seen
};
ThreeGridDecomposition three_grid_decompose(const SparseFamily& s);

/// Line-oriented serialization; integer-exact round trip.
void save_family(const SparseFamily& s, std::ostream& os);
SparseFamily load_family(std::istream& is);

}  // namespace sparsedom
