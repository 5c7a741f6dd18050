#include "sparsedom/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sparsedom {

namespace {

using i64 = std::int64_t;
using i128 = __int128;

i64 pow3(int e) {
  i64 v = 1;
  while (e-- > 0) v *= 3;
  return v;
}

// Both cubes re-expressed over the common denominator 2^max_level 3^max_thirds.
struct Aligned {
  std::array<i128, 2> a_corner, b_corner;
  i128 a_side, b_side;
};

Aligned align(const Cube& a, const Cube& b) {
  const int lv = std::max(a.level(), b.level());
  const int th = std::max(a.thirds(), b.thirds());
  const i128 fa = (i128{1} << (lv - a.level())) * pow3(th - a.thirds());
  const i128 fb = (i128{1} << (lv - b.level())) * pow3(th - b.thirds());
  Aligned r;
  for (int i = 0; i < a.dim(); ++i) {
    r.a_corner[i] = fa * a.corner(i);
    r.b_corner[i] = fb * b.corner(i);
  }
  r.a_side = fa * a.side();
  r.b_side = fb * b.side();
  return r;
}

}  // namespace

Cube::Cube(int dim, const std::array<i64, 2>& corner, i64 side, int level,
           int thirds)
    : corner_(corner),
      side_(side),
      dim_(static_cast<std::int8_t>(dim)),
      level_(static_cast<std::int8_t>(level)),
      thirds_(static_cast<std::int8_t>(thirds)) {
  if (dim < 1 || dim > 2) throw PreconditionError("cube dimension must be 1 or 2");
  if (side < 1) throw PreconditionError("cube side must be positive");
  if (level < 0 || level > kMaxLevel) throw PreconditionError("cube level out of range");
  if (thirds < 0 || thirds > 2) throw PreconditionError("cube thirds out of range");
  if (dim == 1) corner_[1] = 0;
  normalize();
}

Cube Cube::interval(i64 corner, i64 side, int level) {
  return Cube(1, {corner, 0}, side, level);
}

Cube Cube::box(i64 cx, i64 cy, i64 side, int level) {
  return Cube(2, {cx, cy}, side, level);
}

void Cube::normalize() {
  while (thirds_ > 0 && side_ % 3 == 0) {
    bool ok = true;
    for (int i = 0; i < dim_; ++i) ok = ok && corner_[i] % 3 == 0;
    if (!ok) break;
    side_ /= 3;
    for (int i = 0; i < dim_; ++i) corner_[i] /= 3;
    --thirds_;
  }
}

double Cube::unit() const {
  return std::ldexp(1.0, -level_) / static_cast<double>(pow3(thirds_));
}

double Cube::measure() const {
  double m = 1.0;
  for (int i = 0; i < dim_; ++i) m *= side_length();
  return m;
}

bool Cube::contains(const Cube& other) const {
  if (dim_ != other.dim()) return false;
  const Aligned al = align(*this, other);
  for (int i = 0; i < dim_; ++i) {
    if (al.b_corner[i] < al.a_corner[i]) return false;
    if (al.b_corner[i] + al.b_side > al.a_corner[i] + al.a_side) return false;
  }
  return true;
}

bool Cube::disjoint(const Cube& other) const {
  if (dim_ != other.dim()) return true;
  const Aligned al = align(*this, other);
  for (int i = 0; i < dim_; ++i) {
    if (al.a_corner[i] + al.a_side <= al.b_corner[i]) return true;
    if (al.b_corner[i] + al.b_side <= al.a_corner[i]) return true;
  }
  return false;
}

bool Cube::operator==(const Cube& other) const {
  if (dim_ != other.dim()) return false;
  const Aligned al = align(*this, other);
  if (al.a_side != al.b_side) return false;
  for (int i = 0; i < dim_; ++i)
    if (al.a_corner[i] != al.b_corner[i]) return false;
  return true;
}

bool Cube::measure_at_least(const Cube& other, i64 num, i64 den) const {
  const Aligned al = align(*this, other);
  i128 lhs = den, rhs = num;
  for (int i = 0; i < dim_; ++i) {
    lhs *= al.a_side;
    rhs *= al.b_side;
  }
  return lhs >= rhs;
}

std::string Cube::to_string() const {
  std::ostringstream os;
  os << "[";
  for (int i = 0; i < dim_; ++i) {
    if (i) os << " x ";
    os << corner_coord(i) << "," << corner_coord(i) + side_length() << ")";
    if (i + 1 < dim_) os << " [";
  }
  os << " (side " << side_ << " @2^-" << int(level_);
  if (thirds_) os << "/3^" << int(thirds_);
  os << ")";
  return os.str();
}

std::vector<Cube> children(const Cube& q) {
  Cube base = q;
  if (q.side() % 2 != 0) {
    if (q.level() >= kMaxLevel)
      throw ResolutionFloorError("cannot halve side " + std::to_string(q.side()) +
                                 " at the finest supported level");
    base = Cube(q.dim(), {q.corner(0) * 2, q.corner(1) * 2}, q.side() * 2,
                q.level() + 1, q.thirds());
  }
  const i64 h = base.side() / 2;
  std::vector<Cube> out;
  out.reserve(std::size_t{1} << base.dim());
  const int nx = 2, ny = base.dim() == 2 ? 2 : 1;
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix)
      out.push_back(Cube(base.dim(),
                         {base.corner(0) + ix * h, base.corner(1) + iy * h}, h,
                         base.level(), base.thirds()));
  return out;
}

Cube dilate(const Cube& q, i64 factor) {
  if (factor < 1 || factor % 2 == 0)
    throw PreconditionError("dilation factor must be odd and positive");
  const i64 pad = (factor - 1) / 2 * q.side();
  return Cube(q.dim(), {q.corner(0) - pad, q.corner(1) - pad},
              q.side() * factor, q.level(), q.thirds());
}

std::vector<DyadicGrid> shifted_grids(int dim) {
  if (dim < 1 || dim > 2) throw PreconditionError("dimension must be 1 or 2");
  std::vector<DyadicGrid> out;
  const int count = dim == 1 ? 3 : 9;
  out.reserve(count);
  for (int id = 0; id < count; ++id)
    out.push_back(DyadicGrid{id, dim, {id % 3, (id / 3) % 3}});
  return out;
}

std::optional<Cube> grid_cube_at(const DyadicGrid& grid, const Cube& q, int j) {
  if (q.thirds() != 0)
    throw PreconditionError("grid search expects a cube on the binary lattice");
  if (j < 0) return std::nullopt;
  if (j > 60) throw ScaleRangeError("grid scale exponent too large");
  // Work in units of 2^-level / 3.  The grid cube of side 2^j (lattice units)
  // at parity (-1)^k with k = level - j has corners 3*2^j*m + sgn*2^j*shift.
  const int k = q.level() - j;
  const i64 sgn = (k % 2 == 0) ? 1 : -1;
  const i64 cell = i64{1} << j;          // 2^j in fine units /3 of a lattice unit
  const i64 stride = 3 * cell;
  std::array<i64, 2> corner{0, 0};
  for (int i = 0; i < q.dim(); ++i) {
    const i64 off = sgn * cell * grid.shift[i];
    const i64 c = 3 * q.corner(i);  // fine units
    i64 m = (c - off) / stride;
    if ((c - off) % stride != 0 && (c - off) < 0) --m;  // floor division
    corner[i] = stride * m + off;
  }
  Cube candidate(q.dim(), corner, stride, q.level(), 1);
  if (candidate.contains(q)) return candidate;
  return std::nullopt;
}

std::optional<Cube> enclosing_grid_cube(const DyadicGrid& grid, const Cube& q,
                                        i64 max_ratio) {
  int j0 = 0;
  while ((i64{1} << j0) < q.side()) ++j0;  // smallest grid side >= side(q)
  for (int j = j0; (i64{1} << j) <= max_ratio * q.side(); ++j) {
    if (auto c = grid_cube_at(grid, q, j)) return c;
  }
  return std::nullopt;
}

bool grid_contains(const DyadicGrid& grid, const Cube& q) {
  if (q.thirds() > 1) return false;
  // Everything in fine units: thirds of a lattice unit at q.level().
  const i64 fine_side = q.thirds() == 1 ? q.side() : 3 * q.side();
  if (fine_side % 3 != 0) return false;
  const i64 cell = fine_side / 3;  // must be 2^j
  if ((cell & (cell - 1)) != 0) return false;
  int j = 0;
  while ((i64{1} << j) < cell) ++j;
  const int k = q.level() - j;
  const i64 sgn = (k % 2 == 0) ? 1 : -1;
  for (int i = 0; i < q.dim(); ++i) {
    const i64 c = q.thirds() == 1 ? q.corner(i) : 3 * q.corner(i);
    if ((c - sgn * cell * grid.shift[i]) % fine_side != 0) return false;
  }
  return true;
}

std::vector<Cube> cover_partition(const Cube& q0, int rings) {
  if (rings < 0) throw PreconditionError("ring count must be >= 0");
  std::vector<Cube> out;
  out.push_back(q0);
  for (int k = 1; k <= rings; ++k) {
    i64 scale = 1;
    for (int e = 1; e < k; ++e) scale *= 3;
    const Cube core = scale == 1 ? q0 : dilate(q0, scale);
    const i64 s = core.side();
    const int ny = q0.dim() == 2 ? 1 : 0;
    for (int oy = -ny; oy <= ny; ++oy)
      for (int ox = -1; ox <= 1; ++ox) {
        if (ox == 0 && oy == 0) continue;
        out.push_back(Cube(q0.dim(),
                           {core.corner(0) + ox * s, core.corner(1) + oy * s},
                           s, core.level(), core.thirds()));
      }
  }
  return out;
}

}  // namespace sparsedom
