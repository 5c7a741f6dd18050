#include "sparsedom/operators.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace sparsedom {

namespace {

using i64 = std::int64_t;
using i128 = __int128;
using Span = Window::Span;

constexpr i64 kDenseCellLimit = 2048;
constexpr i64 kExhaustiveCellLimit = 256;

Span intersect(const Span& a, const Span& b) {
  Span s;
  for (int i = 0; i < 2; ++i) {
    s.lo[i] = std::max(a.lo[i], b.lo[i]);
    s.hi[i] = std::min(a.hi[i], b.hi[i]);
    if (s.lo[i] >= s.hi[i]) return Span{{0, 0}, {0, 0}};
  }
  return s;
}

Span full_span(const Window& w) {
  Span s;
  s.lo = {0, 0};
  s.hi = {w.cells_per_axis(), w.dim() == 2 ? w.cells_per_axis() : 1};
  return s;
}

// Prefix sums of K(x_cell, y_j) f_j h^dim over one rectangle of cells, for a
// fixed evaluation cell.  Any sub-rectangle sum is then O(1); in 2-D this is
// a summed-area table.
class CellRow {
 public:
  CellRow(const KernelTable& t, const GridFunction& f, i64 cell,
          const Span& range)
      : dim_(t.window().dim()), range_(range) {
    const Window& w = t.window();
    const double hn = w.cell_measure();
    const i64 nx = std::max<i64>(range.hi[0] - range.lo[0], 0);
    const i64 ny = dim_ == 2 ? std::max<i64>(range.hi[1] - range.lo[1], 0) : 1;
    nx_ = nx;
    sums_.assign(static_cast<std::size_t>((nx + 1) * (ny + 1)), 0.0);
    for (i64 ry = 0; ry < ny; ++ry) {
      const i64 iy = range.lo[1] + ry;
      for (i64 rx = 0; rx < nx; ++rx) {
        const i64 j = w.index(range.lo[0] + rx, dim_ == 2 ? iy : 0);
        const double term = t.coef(cell, j) * f[j] * hn;
        at(rx + 1, ry + 1) = term + at(rx, ry + 1) + at(rx + 1, ry) - at(rx, ry);
      }
    }
  }

  double rect(const Span& s) const {
    const Span c = intersect(s, range_);
    if (c.empty()) return 0.0;
    const i64 x0 = c.lo[0] - range_.lo[0], x1 = c.hi[0] - range_.lo[0];
    const i64 y0 = dim_ == 2 ? c.lo[1] - range_.lo[1] : 0;
    const i64 y1 = dim_ == 2 ? c.hi[1] - range_.lo[1] : 1;
    return at(x1, y1) - at(x0, y1) - at(x1, y0) + at(x0, y0);
  }

  double total() const { return rect(range_); }

 private:
  double& at(i64 x, i64 y) { return sums_[static_cast<std::size_t>(y * (nx_ + 1) + x)]; }
  double at(i64 x, i64 y) const { return sums_[static_cast<std::size_t>(y * (nx_ + 1) + x)]; }
  int dim_;
  Span range_;
  i64 nx_ = 0;
  std::vector<double> sums_;
};

// Equivalent prefix structure over plain cell values (no kernel), used by the
// Hardy-Littlewood maximal function.
class ValueTable {
 public:
  ValueTable(const Eigen::ArrayXd& vals, const Window& w)
      : dim_(w.dim()), nx_(w.cells_per_axis()) {
    const i64 ny = dim_ == 2 ? nx_ : 1;
    sums_.assign(static_cast<std::size_t>((nx_ + 1) * (ny + 1)), 0.0);
    for (i64 iy = 0; iy < ny; ++iy)
      for (i64 ix = 0; ix < nx_; ++ix) {
        const double v = vals[dim_ == 2 ? iy * nx_ + ix : ix];
        at(ix + 1, iy + 1) = v + at(ix, iy + 1) + at(ix + 1, iy) - at(ix, iy);
      }
  }
  double rect(const Span& s) const {
    if (s.empty()) return 0.0;
    const i64 y0 = dim_ == 2 ? s.lo[1] : 0, y1 = dim_ == 2 ? s.hi[1] : 1;
    return at(s.hi[0], y1) - at(s.lo[0], y1) - at(s.hi[0], y0) + at(s.lo[0], y0);
  }

 private:
  double& at(i64 x, i64 y) { return sums_[static_cast<std::size_t>(y * (nx_ + 1) + x)]; }
  double at(i64 x, i64 y) const { return sums_[static_cast<std::size_t>(y * (nx_ + 1) + x)]; }
  int dim_;
  i64 nx_;
  std::vector<double> sums_;
};

// Shifted-grid cubes laid out per (grid, scale) block so that the cube
// containing a given cell center is an O(1) index computation.
struct FamilyBlocks {
  struct Block {
    DyadicGrid grid;
    int j = 0;                       // cube side = 2^j lattice units
    std::array<i64, 2> m_lo{0, 0};   // first per-axis grid index
    std::array<i64, 2> m_cnt{0, 0};
    std::size_t offset = 0;          // into cubes, row-major over m
  };
  std::vector<Cube> cubes;
  std::vector<Block> blocks;

  // Index of the block cube whose half-open body holds the center of cell
  // (ix, iy), or -1 when that cube was not enumerated.
  i64 locate(const Window& w, const Block& b, i64 ix, i64 iy) const {
    const int k = w.level() - b.j;
    const i64 sgn = (k % 2 == 0) ? 1 : -1;
    const i64 cell2 = i64{2} << b.j;       // 2 * 2^j, fine units doubled
    const i64 stride2 = 3 * cell2;
    std::array<i64, 2> m{0, 0};
    const std::array<i64, 2> c{ix, iy};
    for (int a = 0; a < w.dim(); ++a) {
      // center numerator over denominator 2^(level+1) * 3; cube corners in the
      // same doubled fine units are stride2 * m + off2
      const i64 num = 3 * (2 * (w.cube().corner(a) + c[a]) + 1);
      const i64 off2 = 2 * sgn * (i64{1} << b.j) * b.grid.shift[a];
      i64 mm = (num - off2) / stride2;
      if ((num - off2) % stride2 != 0 && (num - off2) < 0) --mm;
      if (mm < b.m_lo[a] || mm >= b.m_lo[a] + b.m_cnt[a]) return -1;
      m[a] = mm - b.m_lo[a];
    }
    const i64 local = w.dim() == 2 ? m[1] * b.m_cnt[0] + m[0] : m[0];
    return static_cast<i64>(b.offset) + local;
  }
};

FamilyBlocks build_shifted_blocks(const Window& w) {
  FamilyBlocks fam;
  int jmax = 0;
  while ((i64{1} << jmax) < w.cells_per_axis()) ++jmax;
  ++jmax;  // one scale beyond the covering one
  for (const DyadicGrid& g : shifted_grids(w.dim())) {
    for (int j = 0; j <= jmax; ++j) {
      FamilyBlocks::Block b;
      b.grid = g;
      b.j = j;
      const int k = w.level() - j;
      const i64 sgn = (k % 2 == 0) ? 1 : -1;
      const i64 cell = i64{1} << j;
      const i64 stride = 3 * cell;
      bool nonempty = true;
      for (int a = 0; a < w.dim(); ++a) {
        const i64 off = sgn * cell * g.shift[a];
        const i64 wlo = 3 * w.cube().corner(a);
        const i64 whi = 3 * (w.cube().corner(a) + w.cube().side());
        // cubes with corner + stride > wlo and corner < whi
        i64 m_first = (wlo - off - stride + 1) / stride;
        while (stride * m_first + off + stride <= wlo) ++m_first;
        while (stride * (m_first - 1) + off + stride > wlo) --m_first;
        i64 m_last = (whi - off) / stride;
        while (stride * m_last + off < whi) ++m_last;
        while (m_last > m_first && stride * (m_last - 1) + off >= whi) --m_last;
        b.m_lo[a] = m_first;
        b.m_cnt[a] = m_last - m_first;
        if (b.m_cnt[a] <= 0) nonempty = false;
      }
      if (!nonempty) continue;
      if (w.dim() == 1) {
        b.m_lo[1] = 0;
        b.m_cnt[1] = 1;
      }
      b.offset = fam.cubes.size();
      for (i64 my = 0; my < b.m_cnt[1]; ++my)
        for (i64 mx = 0; mx < b.m_cnt[0]; ++mx) {
          std::array<i64, 2> corner{0, 0};
          const std::array<i64, 2> m{b.m_lo[0] + mx, b.m_lo[1] + my};
          for (int a = 0; a < w.dim(); ++a)
            corner[a] = stride * m[a] + sgn * cell * g.shift[a];
          fam.cubes.push_back(Cube(w.dim(), corner, stride, w.level(), 1));
        }
      fam.blocks.push_back(b);
    }
  }
  return fam;
}

}  // namespace

KernelTable::KernelTable(KernelSpec kernel, const Window& window)
    : kernel_(std::move(kernel)), window_(window), mode_(Mode::kDirect) {
  if (kernel_.dim != window.dim())
    throw PreconditionError("kernel dimension does not match the window");
  const i64 n = window.cell_count();
  if (window.dim() == 1 && kernel_.translation_invariant) {
    mode_ = Mode::kDiff;
    diff_.assign(static_cast<std::size_t>(2 * n - 1), 0.0);
    for (i64 d = -(n - 1); d <= n - 1; ++d) {
      if (d == 0) continue;
      const i64 i = d > 0 ? d : 0;
      const i64 j = d > 0 ? 0 : -d;
      diff_[static_cast<std::size_t>(d + n - 1)] =
          kernel_.evaluate(window.center(i), window.center(j));
    }
  } else if (n <= kDenseCellLimit) {
    mode_ = Mode::kDense;
    dense_.setZero(n, n);
    for (i64 i = 0; i < n; ++i)
      for (i64 j = 0; j < n; ++j)
        if (i != j)
          dense_(i, j) = kernel_.evaluate(window.center(i), window.center(j));
  }
}

double apply_truncated(const KernelTable& t, const GridFunction& f,
                       const LatticeSet& e, i64 x) {
  if (f.window() != t.window())
    throw PreconditionError("function and kernel table windows differ");
  const double hn = t.window().cell_measure();
  double total = 0.0;
  for (const i64 j : e.cells()) total += t.coef(x, j) * f[j] * hn;
  return total;
}

std::vector<Cube> shifted_family(const Window& w) {
  return build_shifted_blocks(w).cubes;
}

std::vector<Cube> exhaustive_family(const Window& w) {
  if (w.cells_per_axis() > kExhaustiveCellLimit)
    throw PreconditionError("exhaustive cube family is limited to small windows");
  std::vector<Cube> out;
  const i64 n = w.cells_per_axis();
  const Cube& c = w.cube();
  for (i64 side = 1; side <= n; ++side)
    for (i64 ax = 0; ax + side <= n; ++ax) {
      if (w.dim() == 1) {
        out.push_back(Cube(1, {c.corner(0) + ax, 0}, side, w.level()));
      } else {
        for (i64 ay = 0; ay + side <= n; ++ay)
          out.push_back(Cube(2, {c.corner(0) + ax, c.corner(1) + ay}, side,
                             w.level()));
      }
    }
  return out;
}

Eigen::ArrayXd hardy_littlewood_all(const GridFunction& f, CubeFamily family) {
  const Window& w = f.window();
  const ValueTable table(f.values().abs(), w);
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(w.cell_count());
  const auto consider = [&](const Cube& q) {
    const Span ev = w.center_span(q);
    if (ev.empty()) return;
    const double avg = table.rect(ev) / static_cast<double>(ev.count());
    w.for_each(ev, [&](i64 idx) { out[idx] = std::max(out[idx], avg); });
  };
  if (family == CubeFamily::kShiftedDyadic)
    for (const Cube& q : shifted_family(w)) consider(q);
  else
    for (const Cube& q : exhaustive_family(w)) consider(q);
  return out;
}

double hardy_littlewood(const GridFunction& f, i64 x, CubeFamily family) {
  return hardy_littlewood_all(f, family)[x];
}

Eigen::ArrayXd truncated_maximal_all(const KernelTable& t,
                                     const GridFunction& f) {
  const Window& w = t.window();
  if (f.window() != w)
    throw PreconditionError("function and kernel table windows differ");
  const Span all = full_span(w);
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(w.cell_count());
  if (w.dim() == 1) {
    const i64 n = w.cell_count();
    for (i64 i = 0; i < n; ++i) {
      const CellRow row(t, f, i, all);
      const double fullv = row.total();
      double best = std::abs(fullv);  // radius below one cell: diagonal only
      const i64 dmax = std::max(i, n - 1 - i);
      for (i64 d = 1; d <= dmax; ++d) {
        Span mid;
        mid.lo = {std::max<i64>(i - d, 0), 0};
        mid.hi = {std::min<i64>(i + d + 1, n), 1};
        best = std::max(best, std::abs(fullv - row.rect(mid)));
      }
      out[i] = best;
    }
    return out;
  }
  // 2-D: enumerate the distinct center distances directly.
  const double hn = w.cell_measure();
  const i64 n = w.cell_count();
  for (i64 i = 0; i < n; ++i) {
    const auto ci = w.coords(i);
    std::vector<std::pair<i64, double>> terms;  // (squared cell distance, term)
    terms.reserve(static_cast<std::size_t>(n - 1));
    for (i64 j = 0; j < n; ++j) {
      if (j == i) continue;
      const auto cj = w.coords(j);
      const i64 dx = cj[0] - ci[0], dy = cj[1] - ci[1];
      terms.emplace_back(dx * dx + dy * dy, t.coef(i, j) * f[j] * hn);
    }
    std::sort(terms.begin(), terms.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    // suffix sums over strictly larger distances
    double suffix = 0.0;
    std::vector<double> tail_at;  // |sum over dist >= group| per distance group
    for (std::size_t k = terms.size(); k-- > 0;) {
      suffix += terms[k].second;
      if (k == 0 || terms[k - 1].first != terms[k].first)
        tail_at.push_back(suffix);
    }
    double best = 0.0;
    for (double v : tail_at) best = std::max(best, std::abs(v));
    out[i] = best;
  }
  return out;
}

double truncated_maximal(const KernelTable& t, const GridFunction& f, i64 x) {
  return truncated_maximal_all(t, f)[x];
}

ScopedMaximal scoped_grand_maximal(const KernelTable& t, const GridFunction& f,
                                   const Cube& scope) {
  const Window& w = t.window();
  if (f.window() != w)
    throw PreconditionError("function and kernel table windows differ");
  ScopedMaximal out;
  out.scope = scope;
  out.scope_span = w.span(scope);
  const Span qs = out.scope_span;
  const i64 sx = qs.hi[0] - qs.lo[0];
  if (sx <= 0) throw PreconditionError("scope cube has no cells in the window");
  const Span g = w.span(dilate(scope, 3));

  // Halving tower: depth l has 2^l cubes per axis of side sx / 2^l cells.
  int depth = 0;
  i64 side = sx;
  while (side % 2 == 0) {
    side /= 2;
    ++depth;
  }
  std::vector<std::vector<Span>> trunc(depth);
  out.tower.resize(depth);
  out.boundary_max.resize(depth);
  const Cube& wc = w.cube();
  for (int l = 1; l <= depth; ++l) {
    const i64 cnt = i64{1} << l;
    const i64 cs = sx >> l;
    const i64 ny = w.dim() == 2 ? cnt : 1;
    for (i64 cy = 0; cy < ny; ++cy)
      for (i64 cx = 0; cx < cnt; ++cx) {
        const Cube p(w.dim(),
                     {wc.corner(0) + qs.lo[0] + cx * cs,
                      wc.corner(1) + qs.lo[1] + cy * cs},
                     cs, w.level());
        out.tower[l - 1].push_back(p);
        trunc[l - 1].push_back(w.span(dilate(p, 3)));
      }
    out.boundary_max[l - 1] =
        Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(out.tower[l - 1].size()));
  }

  const i64 ncells = qs.count();
  out.full = Eigen::ArrayXd::Zero(ncells);
  out.pointwise = Eigen::ArrayXd::Zero(ncells);
  const i64 ny = w.dim() == 2 ? qs.hi[1] - qs.lo[1] : 1;
  for (i64 ly = 0; ly < ny; ++ly)
    for (i64 lx = 0; lx < sx; ++lx) {
      const i64 local = ly * sx + lx;
      const i64 gi = w.index(qs.lo[0] + lx, qs.lo[1] + ly);
      const CellRow row(t, f, gi, g);
      const double fullv = row.total();
      out.full[local] = fullv;
      for (int l = 1; l <= depth; ++l) {
        const i64 cs = sx >> l;
        const i64 cx = lx / cs, cy = ly / cs;
        const i64 k = w.dim() == 2 ? cy * (i64{1} << l) + cx : cx;
        const double v = std::abs(fullv - row.rect(trunc[l - 1][k]));
        auto& b = out.boundary_max[l - 1][k];
        b = std::max(b, v);
      }
    }
  for (i64 ly = 0; ly < ny; ++ly)
    for (i64 lx = 0; lx < sx; ++lx) {
      const i64 local = ly * sx + lx;
      double m = 0.0;
      for (int l = 1; l <= depth; ++l) {
        const i64 cs = sx >> l;
        const i64 k =
            w.dim() == 2 ? (ly / cs) * (i64{1} << l) + lx / cs : lx / cs;
        m = std::max(m, out.boundary_max[l - 1][k]);
      }
      out.pointwise[local] = m;
    }
  return out;
}

std::optional<std::pair<int, i64>> ScopedMaximal::locate(const Cube& p) const {
  for (int l = 0; l < static_cast<int>(tower.size()); ++l) {
    if (tower[l].empty() || tower[l][0].side() != p.side() ||
        tower[l][0].level() != p.level())
      continue;
    for (i64 k = 0; k < static_cast<i64>(tower[l].size()); ++k)
      if (tower[l][static_cast<std::size_t>(k)] == p) return std::pair{l, k};
  }
  return std::nullopt;
}

Eigen::ArrayXd grand_maximal_all(const KernelTable& t, const GridFunction& f,
                                 CubeFamily family) {
  const Window& w = t.window();
  if (f.window() != w)
    throw PreconditionError("function and kernel table windows differ");
  const Span all = full_span(w);
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(w.cell_count());

  if (family == CubeFamily::kExhaustive) {
    if (w.cells_per_axis() > kExhaustiveCellLimit)
      throw PreconditionError("exhaustive mode is limited to small windows");
    for (const Cube& q : exhaustive_family(w)) {
      const Span ev = w.span(q);
      if (ev.empty()) continue;
      const Span tr = w.span(dilate(q, 3));
      double b = 0.0;
      w.for_each(ev, [&](i64 xi) {
        const CellRow row(t, f, xi, all);
        b = std::max(b, std::abs(row.total() - row.rect(tr)));
      });
      w.for_each(ev, [&](i64 x) { out[x] = std::max(out[x], b); });
    }
    return out;
  }

  const FamilyBlocks fam = build_shifted_blocks(w);
  std::vector<Span> eval(fam.cubes.size()), trunc(fam.cubes.size());
  for (std::size_t c = 0; c < fam.cubes.size(); ++c) {
    eval[c] = w.center_span(fam.cubes[c]);
    trunc[c] = w.center_span(dilate(fam.cubes[c], 3));
  }
  std::vector<double> bmax(fam.cubes.size(), 0.0);
  const i64 nx = w.cells_per_axis();
  const i64 ny = w.dim() == 2 ? nx : 1;
  for (i64 iy = 0; iy < ny; ++iy)
    for (i64 ix = 0; ix < nx; ++ix) {
      const i64 xi = w.index(ix, iy);
      const CellRow row(t, f, xi, all);
      const double fullv = row.total();
      for (const auto& b : fam.blocks) {
        const i64 c = fam.locate(w, b, ix, iy);
        if (c < 0) continue;
        const std::size_t cc = static_cast<std::size_t>(c);
        if (eval[cc].empty()) continue;
        const double v = std::abs(fullv - row.rect(trunc[cc]));
        bmax[cc] = std::max(bmax[cc], v);
      }
    }
  for (std::size_t c = 0; c < fam.cubes.size(); ++c)
    w.for_each(eval[c], [&](i64 x) { out[x] = std::max(out[x], bmax[c]); });
  return out;
}

double grand_maximal(const KernelTable& t, const GridFunction& f, i64 x,
                     const std::optional<Cube>& scope, CubeFamily family) {
  if (!scope) return grand_maximal_all(t, f, family)[x];
  const Window& w = t.window();
  const Span qs = w.span(*scope);
  const auto c = w.coords(x);
  if (c[0] < qs.lo[0] || c[0] >= qs.hi[0] ||
      (w.dim() == 2 && (c[1] < qs.lo[1] || c[1] >= qs.hi[1])))
    throw ScopeError("evaluation point lies outside the scope cube");
  const ScopedMaximal sm = scoped_grand_maximal(t, f, *scope);
  const i64 local = (w.dim() == 2 ? (c[1] - qs.lo[1]) * (qs.hi[0] - qs.lo[0])
                                  : 0) +
                    (c[0] - qs.lo[0]);
  return sm.pointwise[local];
}

double estimate_l2_norm(const KernelSpec& kernel, const Window& window,
                        double rel_tol, int max_iters, std::uint64_t seed) {
  const i64 n = window.cell_count();
  if (n > 4096)
    throw PreconditionError("operator norm estimation is limited to 4096 cells");
  const KernelTable t(kernel, window);
  const double hn = window.cell_measure();
  Eigen::MatrixXd a(n, n);
  for (i64 i = 0; i < n; ++i)
    for (i64 j = 0; j < n; ++j) a(i, j) = t.coef(i, j) * hn;

  std::mt19937_64 rng(seed);
  Eigen::VectorXd v(n);
  for (i64 i = 0; i < n; ++i)
    v[i] = (static_cast<double>(rng() >> 11) * 0x1p-53) - 0.5;
  const double vn = v.norm();
  if (vn == 0.0) return 0.0;
  v /= vn;

  double sigma_prev = -1.0;
  int stable = 0;
  for (int it = 0; it < max_iters; ++it) {
    const Eigen::VectorXd u = a * v;
    const double sigma = u.norm();
    if (sigma == 0.0) return 0.0;
    Eigen::VectorXd next = a.transpose() * u;
    const double nn = next.norm();
    if (nn == 0.0) return 0.0;
    v = next / nn;
    if (sigma_prev >= 0.0 &&
        std::abs(sigma - sigma_prev) <= rel_tol * std::max(sigma, 1e-300)) {
      if (++stable >= 3) return sigma;
    } else {
      stable = 0;
    }
    sigma_prev = sigma;
  }
  throw ConvergenceError("power iteration did not meet its stopping rule");
}

OperatorConstants measure_constants(const KernelSpec& kernel,
                                    const Window& window) {
  OperatorConstants c;
  c.l2_norm = estimate_l2_norm(kernel, window);
  c.c_k = kernel.size_constant;
  c.dini = dini_norm(kernel.omega);
  c.c_t = c.l2_norm + c.c_k + c.dini;
  return c;
}

KernelAuditReport audit_kernel(const KernelSpec& kernel, const Window& window,
                               std::uint64_t seed, int samples) {
  KernelAuditReport rep;
  std::mt19937_64 rng(seed);
  const auto uniform = [&]() {
    return static_cast<double>(rng() >> 11) * 0x1p-53;
  };
  const double lo = window.cube().corner_coord(0);
  const double len = window.cube().side_length();
  const auto random_point = [&]() {
    Point p{0.0, 0.0};
    for (int a = 0; a < window.dim(); ++a) p[a] = lo + len * uniform();
    return p;
  };
  const auto dist = [&](const Point& x, const Point& y) {
    double s = 0.0;
    for (int a = 0; a < window.dim(); ++a) s += (x[a] - y[a]) * (x[a] - y[a]);
    return std::sqrt(s);
  };
  const double n = window.dim();

  // modulus axioms
  if (kernel.omega(0.0) != 0.0) ++rep.modulus_violations;
  double prev = 0.0;
  for (int i = 1; i <= 64; ++i) {
    const double t = static_cast<double>(i) / 64.0;
    const double v = kernel.omega(t);
    if (v + 1e-15 < prev) ++rep.modulus_violations;
    prev = std::max(prev, v);
  }
  for (int i = 0; i < samples / 4; ++i) {
    const double s = 0.5 * uniform(), u = 0.5 * uniform();
    if (kernel.omega(s + u) > kernel.omega(s) + kernel.omega(u) + 1e-12)
      ++rep.modulus_violations;
  }

  for (int i = 0; i < samples; ++i) {
    const Point x = random_point();
    const Point y = random_point();
    const double d = dist(x, y);
    if (d <= 0.0) continue;
    ++rep.size_checked;
    const double ratio =
        std::abs(kernel.evaluate(x, y)) * std::pow(d, n) / kernel.size_constant;
    rep.worst_size_ratio = std::max(rep.worst_size_ratio, ratio);
    if (ratio > 1.0 + 1e-9) ++rep.size_violations;
  }

  for (int i = 0; i < samples; ++i) {
    const Point x = random_point();
    const Point y = random_point();
    const double d = dist(x, y);
    if (d <= 0.0) continue;
    // perturb x by less than d/2 so the smoothness condition applies
    Point xp = x;
    const double step = d * 0.49 * uniform();
    for (int a = 0; a < window.dim(); ++a) {
      xp[a] = x[a] + (uniform() < 0.5 ? -1.0 : 1.0) * step /
                          std::sqrt(static_cast<double>(window.dim()));
    }
    const double dd = dist(x, xp);
    if (dd <= 0.0 || d <= 2.0 * dd) continue;
    const double om = kernel.omega(dd / d);
    if (om <= 0.0) continue;
    ++rep.smooth_checked;
    const double diff = std::abs(kernel.evaluate(x, y) - kernel.evaluate(xp, y));
    const double ratio = diff * std::pow(d, n) / om;
    rep.worst_smooth_ratio = std::max(rep.worst_smooth_ratio, ratio);
    if (ratio > 1.0 + 1e-9) ++rep.smooth_violations;
  }

  rep.ok = rep.size_violations == 0 && rep.smooth_violations == 0 &&
           rep.modulus_violations == 0;
  return rep;
}

}  // namespace sparsedom
