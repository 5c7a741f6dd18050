#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "sparsedom/geometry.hpp"

namespace sparsedom {

/// The computational lattice: the unit cells of a window cube.  A window is
/// always on the binary lattice (thirds = 0); it has side() cells per axis.
class Window {
 public:
  Window() : cube_(), count_(1) {}  // one-cell window at the origin
  explicit Window(const Cube& cube);

  const Cube& cube() const { return cube_; }
  int dim() const { return cube_.dim(); }
  int level() const { return cube_.level(); }
  std::int64_t cells_per_axis() const { return cube_.side(); }
  std::int64_t cell_count() const { return count_; }
  double cell_width() const { return cube_.unit(); }
  double cell_measure() const;

  std::int64_t index(std::int64_t ix, std::int64_t iy = 0) const {
    return dim() == 1 ? ix : iy * cells_per_axis() + ix;
  }
  std::array<std::int64_t, 2> coords(std::int64_t idx) const {
    if (dim() == 1) return {idx, 0};
    return {idx % cells_per_axis(), idx / cells_per_axis()};
  }
  /// Cell-center coordinates (doubles, global scale).
  std::array<double, 2> center(std::int64_t idx) const;
  Cube cell_cube(std::int64_t idx) const;

  /// Half-open per-axis cell rectangle, already clipped to the window.
  struct Span {
    std::array<std::int64_t, 2> lo{0, 0}, hi{0, 0};
    bool empty() const { return lo[0] >= hi[0] || lo[1] >= hi[1]; }
    std::int64_t count() const {
      return empty() ? 0 : (hi[0] - lo[0]) * (hi[1] - lo[1]);
    }
  };

  /// Cells covered by a lattice-aligned cube; throws MisalignmentError when
  /// the cube does not land on cell boundaries.
  Span span(const Cube& q) const;
  std::optional<Span> try_span(const Cube& q) const;
  bool aligned(const Cube& q) const { return try_span(q).has_value(); }

  /// Cells whose centers lie in q; exact for any cube, including shifted-grid
  /// cubes with thirds in their coordinates.
  Span center_span(const Cube& q) const;

  void for_each(const Span& s, const std::function<void(std::int64_t)>& fn) const;

  bool operator==(const Window& o) const { return cube_ == o.cube_; }
  bool operator!=(const Window& o) const { return !(*this == o); }

 private:
  Cube cube_;
  std::int64_t count_;
};

/// A finite subset of window cells, stored as sorted unique indices.  This is
/// the representation of witness sets and truncation sets; cardinality and
/// set algebra on it are exact.
class LatticeSet {
 public:
  LatticeSet() = default;
  explicit LatticeSet(std::vector<std::int64_t> cells);  // sorts, dedups

  static LatticeSet cube_cells(const Window& w, const Cube& q);
  static LatticeSet span_cells(const Window& w, const Window::Span& s);

  std::int64_t size() const { return static_cast<std::int64_t>(cells_.size()); }
  bool empty() const { return cells_.empty(); }
  bool contains(std::int64_t idx) const;
  const std::vector<std::int64_t>& cells() const { return cells_; }

  LatticeSet unite(const LatticeSet& o) const;
  LatticeSet subtract(const LatticeSet& o) const;
  LatticeSet intersect(const LatticeSet& o) const;
  bool intersects(const LatticeSet& o) const;

  /// Consecutive-index runs [first, last) for compact serialization.
  std::vector<std::pair<std::int64_t, std::int64_t>> runs() const;

  bool operator==(const LatticeSet& o) const { return cells_ == o.cells_; }

 private:
  std::vector<std::int64_t> cells_;
};

}  // namespace sparsedom
