#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sparsedom/errors.hpp"

namespace sparsedom {

/// Finest supported lattice exponent.  Coordinates are integers scaled by
/// 2^-level (times 3^-thirds where shifted grids are involved), so every
/// containment / disjointness / measure computation in this module is exact
/// integer arithmetic; no floating point enters any set decision.
inline constexpr int kMaxLevel = 40;

/// Half-open axis-aligned cube prod_i [c_i, c_i + side) in units of
/// 2^-level / 3^thirds.  Supports dimensions 1 and 2.
class Cube {
 public:
  Cube() = default;  // unit cell at the origin
  Cube(int dim, const std::array<std::int64_t, 2>& corner, std::int64_t side,
       int level, int thirds = 0);

  static Cube interval(std::int64_t corner, std::int64_t side, int level);
  static Cube box(std::int64_t cx, std::int64_t cy, std::int64_t side,
                  int level);

  int dim() const { return dim_; }
  std::int64_t side() const { return side_; }
  int level() const { return level_; }
  int thirds() const { return thirds_; }
  std::int64_t corner(int axis) const { return corner_[axis]; }

  /// Numeric (double) views; set logic never uses these.
  double unit() const;  // width of one coordinate unit
  double side_length() const { return static_cast<double>(side_) * unit(); }
  double corner_coord(int axis) const {
    return static_cast<double>(corner_[axis]) * unit();
  }
  double center_coord(int axis) const {
    return (static_cast<double>(corner_[axis]) +
            static_cast<double>(side_) / 2.0) * unit();
  }
  double measure() const;

  /// Exact geometric predicates, valid across differing (level, thirds).
  bool contains(const Cube& other) const;
  bool disjoint(const Cube& other) const;
  bool operator==(const Cube& other) const;
  bool operator!=(const Cube& other) const { return !(*this == other); }

  /// Exact comparison of this->measure() against num/den * other.measure().
  bool measure_at_least(const Cube& other, std::int64_t num,
                        std::int64_t den) const;

  std::string to_string() const;

 private:
  std::array<std::int64_t, 2> corner_{0, 0};
  std::int64_t side_ = 1;
  std::int8_t dim_ = 1;
  std::int8_t level_ = 0;
  std::int8_t thirds_ = 0;

  void normalize();
};

/// Splits Q into its 2^dim congruent dyadic children.  A cube of odd side is
/// re-expressed at level+1 first; throws ResolutionFloorError at kMaxLevel.
std::vector<Cube> children(const Cube& q);

/// Concentric dilation by an odd factor; exact at the same resolution.
Cube dilate(const Cube& q, std::int64_t factor);

/// One of the 3^dim shifted dyadic grids.  Axis i of the grid at scale 2^-k
/// is shifted by (-1)^k * shift[i]/3 * 2^-k relative to the standard grid;
/// the alternating sign keeps every grid nested across scales.
struct DyadicGrid {
  int id = 0;
  int dim = 1;
  std::array<int, 2> shift{0, 0};  // thirds per axis, each in {0,1,2}
};

std::vector<DyadicGrid> shifted_grids(int dim);

/// The grid cube of side 2^j units (at q's lattice level) that contains q,
/// if one exists in this grid.  j may exceed the lattice exponent.
std::optional<Cube> grid_cube_at(const DyadicGrid& grid, const Cube& q, int j);

/// Smallest grid cube containing q with side <= max_ratio * side(q), if any.
std::optional<Cube> enclosing_grid_cube(const DyadicGrid& grid, const Cube& q,
                                        std::int64_t max_ratio = 6);

/// Exact membership of q in the grid (it is one of the grid's cubes).
bool grid_contains(const DyadicGrid& grid, const Cube& q);

/// Partition of 3^rings * Q0 into Q0 plus concentric rings of 3^dim - 1
/// congruent cubes each.  Every returned cube R satisfies Q0 subset of 3R.
std::vector<Cube> cover_partition(const Cube& q0, int rings);

}  // namespace sparsedom
