#include "sparsedom/lattice.hpp"

#include <algorithm>

namespace sparsedom {

namespace {
using i64 = std::int64_t;
using i128 = __int128;

i64 pow3(int e) {
  i64 v = 1;
  while (e-- > 0) v *= 3;
  return v;
}
}  // namespace

Window::Window(const Cube& cube) : cube_(cube), count_(cube.side()) {
  if (cube.thirds() != 0)
    throw PreconditionError("window must lie on the binary lattice");
  if (cube.dim() == 2) count_ *= cube.side();
}

double Window::cell_measure() const {
  double m = cell_width();
  if (dim() == 2) m *= cell_width();
  return m;
}

std::array<double, 2> Window::center(i64 idx) const {
  const auto c = coords(idx);
  std::array<double, 2> out{0.0, 0.0};
  for (int i = 0; i < dim(); ++i)
    out[i] = (static_cast<double>(cube_.corner(i)) +
              static_cast<double>(c[i]) + 0.5) * cell_width();
  return out;
}

Cube Window::cell_cube(i64 idx) const {
  const auto c = coords(idx);
  return Cube(dim(), {cube_.corner(0) + c[0], cube_.corner(1) + c[1]}, 1,
              level(), 0);
}

std::optional<Window::Span> Window::try_span(const Cube& q) const {
  if (q.dim() != dim()) return std::nullopt;
  if (q.thirds() != 0 || q.level() > level()) {
    // The cube may still land on cell boundaries after exact reduction.
    const i64 f3 = pow3(q.thirds());
    const int dl = level() - q.level();  // may be negative
    // corner * 2^dl / 3^thirds must be integral; same for side.
    auto reduce = [&](i64 v, i64& out) {
      i128 num = i128{v};
      if (dl >= 0) num <<= dl;
      i64 den = f3;
      if (dl < 0) den <<= -dl;
      if (num % den != 0) return false;
      out = static_cast<i64>(num / den);
      return true;
    };
    i64 side = 0;
    if (!reduce(q.side(), side) || side < 1) return std::nullopt;
    std::array<i64, 2> corner{0, 0};
    for (int i = 0; i < dim(); ++i)
      if (!reduce(q.corner(i), corner[i])) return std::nullopt;
    return try_span(Cube(dim(), corner, side, level(), 0));
  }
  const i64 f = i64{1} << (level() - q.level());
  Span s;
  for (int i = 0; i < dim(); ++i) {
    const i64 lo = q.corner(i) * f - cube_.corner(i);
    s.lo[i] = std::max<i64>(lo, 0);
    s.hi[i] = std::min<i64>(lo + q.side() * f, cells_per_axis());
  }
  if (dim() == 1) {
    s.lo[1] = 0;
    s.hi[1] = 1;
  }
  for (int i = 0; i < dim(); ++i)
    if (s.lo[i] >= s.hi[i]) return Span{{0, 0}, {0, 0}};
  return s;
}

Window::Span Window::span(const Cube& q) const {
  auto s = try_span(q);
  if (!s)
    throw MisalignmentError("cube " + q.to_string() +
                            " is not aligned with the window lattice");
  return *s;
}

Window::Span Window::center_span(const Cube& q) const {
  // Cell center i sits at corner_w + i + 1/2 lattice units: the numerator
  // 2*(corner_w + i) + 1 over denominator 2^(level+1).  Compare exactly with
  // q's corners over the common denominator 2^(level+1) * 3^thirds.
  Span s;
  const i64 f3 = pow3(q.thirds());
  const int dl = level() + 1 - q.level();
  if (dl < 0) throw ScaleRangeError("cube finer than the cell lattice");
  for (int i = 0; i < q.dim(); ++i) {
    const i128 qlo = (i128{q.corner(i)} << dl);           // q corner, common denom
    const i128 qhi = (i128{q.corner(i) + q.side()} << dl);
    // want qlo <= 3^t*(2*(corner_w + i) + 1) < qhi
    const i128 base = i128{2} * cube_.corner(i) + 1;
    // smallest i with 3^t*(base + 2i) >= qlo
    i128 lo_num = qlo - f3 * base;
    i64 lo = lo_num <= 0 ? 0
                         : static_cast<i64>((lo_num + 2 * f3 - 1) / (2 * f3));
    i128 hi_num = qhi - f3 * base;  // need 3^t*2i < hi_num
    i64 hi;
    if (hi_num <= 0) {
      hi = 0;
    } else {
      hi = static_cast<i64>((hi_num + 2 * f3 - 1) / (2 * f3));
    }
    s.lo[i] = std::clamp<i64>(lo, 0, cells_per_axis());
    s.hi[i] = std::clamp<i64>(hi, 0, cells_per_axis());
  }
  if (q.dim() == 1) {
    s.lo[1] = 0;
    s.hi[1] = 1;
  }
  for (int i = 0; i < q.dim(); ++i)
    if (s.lo[i] >= s.hi[i]) return Span{{0, 0}, {0, 0}};
  return s;
}

void Window::for_each(const Span& s,
                      const std::function<void(i64)>& fn) const {
  if (s.empty()) return;
  for (i64 iy = s.lo[1]; iy < s.hi[1]; ++iy)
    for (i64 ix = s.lo[0]; ix < s.hi[0]; ++ix) fn(index(ix, iy));
}

LatticeSet::LatticeSet(std::vector<i64> cells) : cells_(std::move(cells)) {
  std::sort(cells_.begin(), cells_.end());
  cells_.erase(std::unique(cells_.begin(), cells_.end()), cells_.end());
}

LatticeSet LatticeSet::cube_cells(const Window& w, const Cube& q) {
  return span_cells(w, w.span(q));
}

LatticeSet LatticeSet::span_cells(const Window& w, const Window::Span& s) {
  std::vector<i64> v;
  v.reserve(static_cast<std::size_t>(s.count()));
  w.for_each(s, [&](i64 idx) { v.push_back(idx); });
  LatticeSet out;
  out.cells_ = std::move(v);  // already sorted for row-major traversal
  std::sort(out.cells_.begin(), out.cells_.end());
  return out;
}

bool LatticeSet::contains(i64 idx) const {
  return std::binary_search(cells_.begin(), cells_.end(), idx);
}

LatticeSet LatticeSet::unite(const LatticeSet& o) const {
  LatticeSet out;
  out.cells_.reserve(cells_.size() + o.cells_.size());
  std::set_union(cells_.begin(), cells_.end(), o.cells_.begin(), o.cells_.end(),
                 std::back_inserter(out.cells_));
  return out;
}

LatticeSet LatticeSet::subtract(const LatticeSet& o) const {
  LatticeSet out;
  std::set_difference(cells_.begin(), cells_.end(), o.cells_.begin(),
                      o.cells_.end(), std::back_inserter(out.cells_));
  return out;
}

LatticeSet LatticeSet::intersect(const LatticeSet& o) const {
  LatticeSet out;
  std::set_intersection(cells_.begin(), cells_.end(), o.cells_.begin(),
                        o.cells_.end(), std::back_inserter(out.cells_));
  return out;
}

bool LatticeSet::intersects(const LatticeSet& o) const {
  auto a = cells_.begin();
  auto b = o.cells_.begin();
  while (a != cells_.end() && b != o.cells_.end()) {
    if (*a < *b)
      ++a;
    else if (*b < *a)
      ++b;
    else
      return true;
  }
  return false;
}

std::vector<std::pair<i64, i64>> LatticeSet::runs() const {
  std::vector<std::pair<i64, i64>> out;
  for (std::size_t i = 0; i < cells_.size();) {
    std::size_t j = i + 1;
    while (j < cells_.size() && cells_[j] == cells_[j - 1] + 1) ++j;
    out.emplace_back(cells_[i], cells_[j - 1] + 1);
    i = j;
  }
  return out;
}

}  // namespace sparsedom
