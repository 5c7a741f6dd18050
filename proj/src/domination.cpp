#include "sparsedom/domination.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <ostream>

#include "sparsedom/detail/text.hpp"

namespace sparsedom {

namespace {

using i64 = std::int64_t;
using Span = Window::Span;

i64 pow3i(int e) {
  i64 v = 1;
  while (e-- > 0) v *= 3;
  return v;
}

// Geometry of the halving tower of one cube over the window lattice.
struct Tower {
  Cube q;
  Span span;
  i64 sx = 0;  // cells per axis
  i64 ny = 1;  // rows (2-D) or 1
  int depth = 0;
  int dim = 1;

  i64 cubes_per_axis(int l) const { return i64{1} << l; }
  i64 cells_per_axis_at(int l) const { return sx >> l; }
  i64 cube_cells(int l) const {
    const i64 c = cells_per_axis_at(l);
    return dim == 2 ? c * c : c;
  }
  i64 total_cells() const { return dim == 2 ? sx * sx : sx; }
};

Tower make_tower(const Window& w, const Cube& q) {
  Tower t;
  t.q = q;
  t.span = w.span(q);
  t.dim = w.dim();
  t.sx = t.span.hi[0] - t.span.lo[0];
  t.ny = t.dim == 2 ? t.span.hi[1] - t.span.lo[1] : 1;
  if (t.sx <= 0) throw PreconditionError("cube has no cells in the window");
  i64 side = t.sx;
  while (side % 2 == 0) {
    side /= 2;
    ++t.depth;
  }
  return t;
}

Cube tower_cube(const Window& w, const Tower& t, int l, i64 kx, i64 ky) {
  const i64 cs = t.cells_per_axis_at(l);
  return Cube(t.dim,
              {w.cube().corner(0) + t.span.lo[0] + kx * cs,
               w.cube().corner(1) + t.span.lo[1] + ky * cs},
              cs, w.level());
}

// Prefix counts of a local cell mask, for O(1) rectangle cardinalities.
struct MaskCounter {
  i64 sx, ny;
  std::vector<i64> pre;  // (sx+1) x (ny+1)
  MaskCounter(const std::vector<char>& mask, i64 sx, i64 ny) : sx(sx), ny(ny) {
    pre.assign(static_cast<std::size_t>((sx + 1) * (ny + 1)), 0);
    for (i64 y = 0; y < ny; ++y)
      for (i64 x = 0; x < sx; ++x)
        at(x + 1, y + 1) =
            (mask[static_cast<std::size_t>(y * sx + x)] ? 1 : 0) +
            at(x, y + 1) + at(x + 1, y) - at(x, y);
  }
  i64& at(i64 x, i64 y) { return pre[static_cast<std::size_t>(y * (sx + 1) + x)]; }
  i64 at(i64 x, i64 y) const {
    return pre[static_cast<std::size_t>(y * (sx + 1) + x)];
  }
  i64 rect(i64 x0, i64 x1, i64 y0, i64 y1) const {
    return at(x1, y1) - at(x0, y1) - at(x1, y0) + at(x0, y0);
  }
};

struct TowerSelection {
  // (level, kx, ky) triples in depth-first traversal order
  std::vector<std::array<i64, 3>> picks;
  bool floor = false;
  std::vector<i64> uncovered_local;
};

TowerSelection cz_on_tower(const Tower& t, const std::vector<char>& mask,
                           const MaskCounter& cnt, const Ratio& lambda) {
  TowerSelection out;
  const std::function<void(int, i64, i64)> descend = [&](int l, i64 kx, i64 ky) {
    const i64 cs = t.cells_per_axis_at(l);
    const i64 x0 = kx * cs, y0 = t.dim == 2 ? ky * cs : 0;
    const i64 y1 = t.dim == 2 ? y0 + cs : 1;
    const i64 c = cnt.rect(x0, x0 + cs, y0, y1);
    if (c == 0) return;
    if (c * lambda.den > lambda.num * t.cube_cells(l)) {
      out.picks.push_back({l, kx, ky});
      return;
    }
    if (l == t.depth) {
      out.floor = true;
      for (i64 y = y0; y < y1; ++y)
        for (i64 x = x0; x < x0 + cs; ++x)
          if (mask[static_cast<std::size_t>(y * t.sx + x)])
            out.uncovered_local.push_back(y * t.sx + x);
      return;
    }
    const int children_y = t.dim == 2 ? 2 : 1;
    for (int dy = 0; dy < children_y; ++dy)
      for (int dx = 0; dx < 2; ++dx)
        descend(l + 1, 2 * kx + dx, t.dim == 2 ? 2 * ky + dy : 0);
  };
  if (t.depth == 0) {
    const i64 c = cnt.rect(0, t.sx, 0, t.dim == 2 ? t.sx : 1);
    if (c > 0) {
      out.floor = true;
      for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i]) out.uncovered_local.push_back(static_cast<i64>(i));
    }
    return out;
  }
  descend(0, 0, 0);
  return out;
}

// The (budget+1)-th largest value: the smallest cut v with #{x : x > v}
// bounded by the budget.
double quantile_cut(std::vector<double> v, i64 budget) {
  std::nth_element(v.begin(), v.begin() + budget, v.end(),
                   std::greater<double>());
  return v[static_cast<std::size_t>(budget)];
}

struct NodeEval {
  Tower tower;
  ScopedMaximal sm;
  std::vector<double> absf;  // |f| on node cells, local order
  double avg_ref = 0.0;
};

NodeEval eval_node(const KernelTable& t, const GridFunction& f,
                   const GridFunction& absf, const Cube& q, double r) {
  NodeEval e;
  e.tower = make_tower(t.window(), q);
  e.avg_ref = r_average(absf, dilate(q, 3), r);
  if (e.avg_ref == 0.0) return e;
  e.sm = scoped_grand_maximal(t, f, q);
  const Window& w = t.window();
  e.absf.reserve(static_cast<std::size_t>(e.tower.total_cells()));
  for (i64 ly = 0; ly < e.tower.ny; ++ly)
    for (i64 lx = 0; lx < e.tower.sx; ++lx)
      e.absf.push_back(
          absf[w.index(e.tower.span.lo[0] + lx, e.tower.span.lo[1] + ly)]);
  return e;
}

i64 exceptional_budget(i64 cells, int dim) { return cells >> (dim + 3); }

// Exceptional mask from absolute cuts; returns the local mask.
std::vector<char> exceptional_mask(const NodeEval& e, double cut_f,
                                   double cut_m) {
  std::vector<char> mask(static_cast<std::size_t>(e.tower.total_cells()), 0);
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (e.absf[i] > cut_f ||
        e.sm.pointwise[static_cast<Eigen::Index>(i)] > cut_m)
      mask[i] = 1;
  return mask;
}

struct Builder {
  const KernelTable& t;
  const GridFunction& f;
  const GridFunction& absf;
  double r;
  int max_depth;
  DominationCertificate* cert;
  SparseFamily* family;

  std::size_t process(const Cube& q, int depth) {
    const Window& w = t.window();
    const std::size_t idx = cert->nodes.size();
    cert->nodes.emplace_back();
    cert->nodes[idx].cube = q;
    cert->nodes[idx].depth = depth;

    NodeEval e = eval_node(t, f, absf, q, r);
    cert->nodes[idx].avg_ref = e.avg_ref;
    if (e.avg_ref == 0.0) {
      family->entries.push_back(
          SparseEntry{q, LatticeSet::span_cells(w, w.span(q))});
      return idx;
    }

    const i64 cells = e.tower.total_cells();
    const i64 budget = exceptional_budget(cells, w.dim());
    const bool capped = depth >= max_depth;
    std::vector<char> selected_mask(static_cast<std::size_t>(cells), 0);

    if (!capped && e.tower.depth > 0) {
      std::vector<double> mvals(
          e.sm.pointwise.data(), e.sm.pointwise.data() + e.sm.pointwise.size());
      const double cut_f = quantile_cut(e.absf, budget);
      const double cut_m = quantile_cut(std::move(mvals), budget);
      cert->nodes[idx].threshold_f = cut_f;
      cert->nodes[idx].threshold_mt = cut_m;
      const std::vector<char> emask = exceptional_mask(e, cut_f, cut_m);
      const MaskCounter counter(emask, e.tower.sx, e.tower.ny);
      const TowerSelection sel =
          cz_on_tower(e.tower, emask, counter, default_cz_height(w.dim()));
      cert->nodes[idx].cz_floor = sel.floor;

      double bmax = 0.0;
      for (const auto& p : sel.picks) {
        const int l = static_cast<int>(p[0]);
        const i64 kx = p[1], ky = p[2];
        const Cube pc = tower_cube(w, e.tower, l, kx, ky);
        cert->nodes[idx].selected.push_back(pc);
        const i64 k = e.tower.dim == 2 ? ky * e.tower.cubes_per_axis(l) + kx : kx;
        bmax = std::max(bmax, e.sm.boundary_max[l - 1][k]);
        const i64 cs = e.tower.cells_per_axis_at(l);
        const i64 ylo = e.tower.dim == 2 ? ky * cs : 0;
        const i64 yhi = e.tower.dim == 2 ? ylo + cs : 1;
        for (i64 y = ylo; y < yhi; ++y)
          for (i64 x = kx * cs; x < kx * cs + cs; ++x)
            selected_mask[static_cast<std::size_t>(y * e.tower.sx + x)] = 1;
      }
      cert->nodes[idx].boundary_max = bmax;
    } else {
      cert->nodes[idx].resolution_floor = capped;
      cert->nodes[idx].threshold_f = e.absf.empty()
                                         ? 0.0
                                         : *std::max_element(e.absf.begin(),
                                                             e.absf.end());
      cert->nodes[idx].threshold_mt = e.sm.pointwise.size()
                                          ? e.sm.pointwise.maxCoeff()
                                          : 0.0;
    }

    double rmax = 0.0;
    std::vector<i64> witness;
    for (i64 i = 0; i < cells; ++i) {
      if (selected_mask[static_cast<std::size_t>(i)]) continue;
      rmax = std::max(rmax, std::abs(e.sm.full[i]));
      const i64 lx = i % e.tower.sx, ly = i / e.tower.sx;
      witness.push_back(
          w.index(e.tower.span.lo[0] + lx, e.tower.span.lo[1] + ly));
    }
    cert->nodes[idx].residual_max = rmax;
    cert->nodes[idx].threshold =
        std::max(cert->nodes[idx].boundary_max, rmax);
    family->entries.push_back(SparseEntry{q, LatticeSet(std::move(witness))});

    const std::vector<Cube> sel_cubes = cert->nodes[idx].selected;
    for (const Cube& pc : sel_cubes) {
      const std::size_t child = process(pc, depth + 1);
      cert->nodes[idx].children.push_back(child);
    }
    return idx;
  }
};

}  // namespace

Ratio default_cz_height(int dim) { return Ratio{1, i64{1} << (dim + 1)}; }

ExceptionalSet build_exceptional_set(const KernelTable& t,
                                     const GridFunction& f, const Cube& q0,
                                     double r) {
  const GridFunction absf = f.abs();
  const NodeEval e = eval_node(t, f, absf, q0, r);
  ExceptionalSet out;
  if (e.avg_ref == 0.0) return out;
  const Window& w = t.window();
  const i64 cells = e.tower.total_cells();
  const i64 budget = exceptional_budget(cells, w.dim());
  std::vector<double> mvals(e.sm.pointwise.data(),
                            e.sm.pointwise.data() + e.sm.pointwise.size());
  out.threshold_f = quantile_cut(e.absf, budget);
  out.threshold_mt = quantile_cut(std::move(mvals), budget);
  const auto mask = exceptional_mask(e, out.threshold_f, out.threshold_mt);
  std::vector<i64> cellsv;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) {
      const i64 lx = static_cast<i64>(i) % e.tower.sx;
      const i64 ly = static_cast<i64>(i) / e.tower.sx;
      cellsv.push_back(
          w.index(e.tower.span.lo[0] + lx, e.tower.span.lo[1] + ly));
    }
  out.cells = LatticeSet(std::move(cellsv));
  return out;
}

CzResult cz_decompose(const Window& w, const LatticeSet& e, const Cube& q0,
                      const Ratio& lambda) {
  const Tower tower = make_tower(w, q0);
  std::vector<char> mask(static_cast<std::size_t>(tower.total_cells()), 0);
  for (const i64 c : e.cells()) {
    const auto xy = w.coords(c);
    const i64 lx = xy[0] - tower.span.lo[0];
    const i64 ly = xy[1] - tower.span.lo[1];
    if (lx < 0 || lx >= tower.sx || ly < 0 || ly >= tower.ny)
      throw PreconditionError("exceptional cell outside the decomposition cube");
    mask[static_cast<std::size_t>(ly * tower.sx + lx)] = 1;
  }
  if (e.size() * lambda.den > lambda.num * tower.total_cells())
    throw PreconditionError(
        "indicator average over the root cube already exceeds the height");
  const MaskCounter counter(mask, tower.sx, tower.ny);
  const TowerSelection sel = cz_on_tower(tower, mask, counter, lambda);
  CzResult out;
  out.floor = sel.floor;
  for (const auto& p : sel.picks)
    out.selected.push_back(
        tower_cube(w, tower, static_cast<int>(p[0]), p[1], p[2]));
  std::vector<i64> unc;
  for (const i64 lc : sel.uncovered_local)
    unc.push_back(w.index(tower.span.lo[0] + lc % tower.sx,
                          tower.span.lo[1] + lc / tower.sx));
  out.uncovered = LatticeSet(std::move(unc));
  return out;
}

double DominationCertificate::c_emp() const {
  double c = 0.0;
  for (const auto& n : nodes) c = std::max(c, n.c_star());
  return c;
}

int DominationCertificate::max_depth() const {
  int d = 0;
  for (const auto& n : nodes) d = std::max(d, n.depth);
  return d;
}

LocalDomination local_dominate(const KernelTable& t, const GridFunction& f,
                               const Cube& q0, double r, int max_depth) {
  if (f.window() != t.window())
    throw PreconditionError("function and kernel table windows differ");
  if (!f.window().cube().contains(dilate(q0, 3)))
    throw PreconditionError("window must contain the tripled root cube");
  LocalDomination out{SparseFamily(f.window(), Ratio{1, 2}),
                      DominationCertificate{}};
  out.certificate.kernel_name = t.kernel().name;
  out.certificate.r = r;
  out.certificate.window = f.window();
  const GridFunction absf = f.abs();
  Builder b{t, f, absf, r, max_depth, &out.certificate, &out.family};
  out.certificate.roots.push_back(b.process(q0, 0));
  return out;
}

GlobalDomination global_dominate(const KernelTable& t, const GridFunction& f,
                                 const Cube& q0, int rings, double r,
                                 int max_depth) {
  const Window& w = t.window();
  if (f.window() != w)
    throw PreconditionError("function and kernel table windows differ");
  i64 scale = 1;
  for (int k = 0; k < rings; ++k) scale *= 3;
  if (!w.cube().contains(scale == 1 ? q0 : dilate(q0, scale)))
    throw PreconditionError("window does not cover the ring partition");
  {
    // supp f must lie in the first partition cube
    const Span qs = w.span(q0);
    const i64 nx = w.cells_per_axis();
    const i64 ny = w.dim() == 2 ? nx : 1;
    for (i64 iy = 0; iy < ny; ++iy)
      for (i64 ix = 0; ix < nx; ++ix) {
        const bool inside = ix >= qs.lo[0] && ix < qs.hi[0] &&
                            (w.dim() == 1 || (iy >= qs.lo[1] && iy < qs.hi[1]));
        if (!inside && f[w.index(ix, iy)] != 0.0)
          throw PreconditionError("function is supported outside the root cube");
      }
  }

  GlobalDomination out{SparseFamily(w, Ratio{1, 2 * pow3i(w.dim())}),
                       SparseFamily(w, Ratio{1, 2}),
                       DominationCertificate{}, 0.0};
  out.certificate.kernel_name = t.kernel().name;
  out.certificate.r = r;
  out.certificate.window = w;
  const GridFunction absf = f.abs();
  Builder b{t, f, absf, r, max_depth, &out.certificate, &out.pre_dilation};
  for (const Cube& part : cover_partition(q0, rings))
    out.certificate.roots.push_back(b.process(part, 0));
  for (const SparseEntry& e : out.pre_dilation.entries)
    out.family.entries.push_back(SparseEntry{dilate(e.cube, 3), e.witness});
  out.c_emp = out.certificate.c_emp();
  return out;
}

namespace {

void replay_node(const DominationCertificate& cert, const KernelTable& t,
                 const GridFunction& f, const GridFunction& absf,
                 std::size_t idx, ReplayReport& rep) {
  const Window& w = t.window();
  const CertificateNode& node = cert.nodes[idx];
  ++rep.nodes_checked;
  const auto flag = [&](const std::string& what, double lhs, double rhs) {
    rep.ok = false;
    rep.violations.push_back(ReplayViolation{idx, what, lhs, rhs});
  };

  NodeEval e = eval_node(t, f, absf, node.cube, cert.r);
  if (e.avg_ref != node.avg_ref)
    flag("reference average drift", e.avg_ref, node.avg_ref);
  if (node.avg_ref == 0.0 || e.avg_ref == 0.0) {
    if (!node.children.empty())
      flag("zero node carries children",
           static_cast<double>(node.children.size()), 0.0);
    if (node.threshold != 0.0) flag("zero node threshold", node.threshold, 0.0);
    return;
  }

  const i64 cells = e.tower.total_cells();
  std::vector<char> selected_mask(static_cast<std::size_t>(cells), 0);

  if (!node.selected.empty() || (!node.resolution_floor && e.tower.depth > 0)) {
    // Reconstruct the exceptional set from the stored cuts and re-derive the
    // stopping-time selection.
    const auto emask = exceptional_mask(e, node.threshold_f, node.threshold_mt);
    i64 ecount = 0;
    for (char m : emask) ecount += m;
    if (ecount * (i64{1} << (w.dim() + 2)) > cells)
      flag("exceptional set too large", static_cast<double>(ecount),
           static_cast<double>(cells) / (1 << (w.dim() + 2)));
    const MaskCounter counter(emask, e.tower.sx, e.tower.ny);
    const TowerSelection sel =
        cz_on_tower(e.tower, emask, counter, default_cz_height(w.dim()));
    if (sel.picks.size() != node.selected.size()) {
      flag("selection count mismatch", static_cast<double>(sel.picks.size()),
           static_cast<double>(node.selected.size()));
    } else {
      i64 total_sel_cells = 0;
      i64 covered = 0;
      for (std::size_t s = 0; s < sel.picks.size(); ++s) {
        const auto& p = sel.picks[s];
        const int l = static_cast<int>(p[0]);
        const Cube pc = tower_cube(w, e.tower, l, p[1], p[2]);
        if (pc != node.selected[s])
          flag("selected cube mismatch at position " + std::to_string(s), 0, 0);
        const i64 cs = e.tower.cells_per_axis_at(l);
        const i64 pcells = e.tower.cube_cells(l);
        total_sel_cells += pcells;
        const i64 x0 = p[1] * cs;
        const i64 y0 = e.tower.dim == 2 ? p[2] * cs : 0;
        const i64 y1 = e.tower.dim == 2 ? y0 + cs : 1;
        const i64 pe = counter.rect(x0, x0 + cs, y0, y1);
        covered += pe;
        const Ratio lam = default_cz_height(w.dim());
        if (pe * lam.den <= lam.num * pcells)
          flag("selected cube misses the stopping rule",
               static_cast<double>(pe), static_cast<double>(pcells));
        if (pe >= pcells)
          flag("selected cube has no cell outside the exceptional set",
               static_cast<double>(pe), static_cast<double>(pcells));
        for (i64 y = y0; y < y1; ++y)
          for (i64 x = x0; x < x0 + cs; ++x)
            selected_mask[static_cast<std::size_t>(y * e.tower.sx + x)] = 1;
        const double b = e.sm.boundary_max[l - 1][e.tower.dim == 2
                           ? p[2] * e.tower.cubes_per_axis(l) + p[1]
                           : p[1]];
        if (b > node.threshold)
          flag("boundary value exceeds the node threshold", b, node.threshold);
      }
      if (2 * total_sel_cells > cells)
        flag("selected mass exceeds half the cube",
             static_cast<double>(total_sel_cells),
             static_cast<double>(cells) / 2.0);
      if (covered < ecount && !node.cz_floor)
        flag("exceptional cells left uncovered",
             static_cast<double>(ecount - covered), 0.0);
    }
  }

  double rmax = 0.0;
  for (i64 i = 0; i < cells; ++i)
    if (!selected_mask[static_cast<std::size_t>(i)])
      rmax = std::max(rmax, std::abs(e.sm.full[i]));
  if (rmax > node.threshold)
    flag("residual value exceeds the node threshold", rmax, node.threshold);
  if (node.threshold !=
      std::max(node.boundary_max, node.residual_max))
    flag("stored threshold is not the max of its parts", node.threshold,
         std::max(node.boundary_max, node.residual_max));

  if (node.children.size() != node.selected.size())
    flag("children and selection differ in count",
         static_cast<double>(node.children.size()),
         static_cast<double>(node.selected.size()));
  for (std::size_t c = 0;
       c < std::min(node.children.size(), node.selected.size()); ++c) {
    const std::size_t child = node.children[c];
    if (child >= cert.nodes.size() || cert.nodes[child].cube != node.selected[c])
      flag("child node does not match its selected cube",
           static_cast<double>(child), 0.0);
  }
}

}  // namespace

ReplayReport replay_certificate(const DominationCertificate& cert,
                                const KernelTable& t, const GridFunction& f) {
  ReplayReport rep;
  if (f.window() != cert.window || t.window() != cert.window) {
    rep.ok = false;
    rep.violations.push_back(
        ReplayViolation{0, "window mismatch between certificate and inputs"});
    return rep;
  }
  const GridFunction absf = f.abs();
  for (std::size_t i = 0; i < cert.nodes.size(); ++i)
    replay_node(cert, t, f, absf, i, rep);
  return rep;
}

void save_certificate(const DominationCertificate& cert, std::ostream& os) {
  using detail::fmt_double;
  const Cube& w = cert.window.cube();
  os << "sparse-dominator-certificate v1\n";
  os << "kernel " << cert.kernel_name << "\n";
  os << "r " << fmt_double(cert.r) << "\n";
  os << "dim " << w.dim() << "\n";
  os << "window";
  for (int i = 0; i < w.dim(); ++i) os << " " << w.corner(i);
  os << " " << w.side() << " " << w.level() << "\n";
  os << "constants " << fmt_double(cert.constants.l2_norm) << " "
     << fmt_double(cert.constants.c_k) << " " << fmt_double(cert.constants.dini)
     << " " << fmt_double(cert.constants.c_t) << "\n";
  os << "roots";
  for (const std::size_t r : cert.roots) os << " " << r;
  os << "\n";
  os << "nodes " << cert.nodes.size() << "\n";
  const auto put_cube = [&](const Cube& c) {
    for (int i = 0; i < c.dim(); ++i) os << " " << c.corner(i);
    os << " " << c.side() << " " << c.level() << " " << c.thirds();
  };
  for (std::size_t i = 0; i < cert.nodes.size(); ++i) {
    const CertificateNode& n = cert.nodes[i];
    os << "node " << i << " depth " << n.depth << " flags "
       << (n.resolution_floor ? 1 : 0) << " " << (n.cz_floor ? 1 : 0)
       << " cube";
    put_cube(n.cube);
    os << "\n";
    os << "vals " << fmt_double(n.avg_ref) << " " << fmt_double(n.threshold_f)
       << " " << fmt_double(n.threshold_mt) << " " << fmt_double(n.boundary_max)
       << " " << fmt_double(n.residual_max) << " " << fmt_double(n.threshold)
       << "\n";
    os << "children";
    for (const std::size_t c : n.children) os << " " << c;
    os << "\n";
    os << "selected " << n.selected.size() << "\n";
    for (const Cube& s : n.selected) {
      os << "sel";
      put_cube(s);
      os << "\n";
    }
  }
}

DominationCertificate load_certificate(std::istream& is) {
  using detail::expect;
  using detail::parse_double;
  using detail::parse_int;
  auto head = detail::read_tokens(is, "certificate header");
  expect(head.size() == 2 && head[0] == "sparse-dominator-certificate" &&
             head[1] == "v1",
         "not a certificate file");
  auto ktok = detail::read_tokens(is, "kernel");
  expect(ktok.size() == 2 && ktok[0] == "kernel", "malformed kernel line");
  auto rtok = detail::read_tokens(is, "r");
  expect(rtok.size() == 2 && rtok[0] == "r", "malformed r line");
  auto dtok = detail::read_tokens(is, "dim");
  expect(dtok.size() == 2 && dtok[0] == "dim", "malformed dim line");
  const int dim = static_cast<int>(parse_int(dtok[1]));
  expect(dim == 1 || dim == 2, "bad dimension");
  auto wtok = detail::read_tokens(is, "window");
  expect(wtok.size() == static_cast<std::size_t>(3 + dim) && wtok[0] == "window",
         "malformed window line");
  std::array<i64, 2> corner{0, 0};
  for (int i = 0; i < dim; ++i) corner[i] = parse_int(wtok[1 + i]);
  DominationCertificate cert{
      ktok[1],
      parse_double(rtok[1]),
      Window(Cube(dim, corner, parse_int(wtok[1 + dim]),
                  static_cast<int>(parse_int(wtok[2 + dim])))),
      OperatorConstants{},
      {},
      {}};
  auto ctok = detail::read_tokens(is, "constants");
  expect(ctok.size() == 5 && ctok[0] == "constants", "malformed constants line");
  cert.constants.l2_norm = parse_double(ctok[1]);
  cert.constants.c_k = parse_double(ctok[2]);
  cert.constants.dini = parse_double(ctok[3]);
  cert.constants.c_t = parse_double(ctok[4]);
  auto rootstok = detail::read_tokens(is, "roots");
  expect(!rootstok.empty() && rootstok[0] == "roots", "malformed roots line");
  for (std::size_t i = 1; i < rootstok.size(); ++i)
    cert.roots.push_back(static_cast<std::size_t>(parse_int(rootstok[i])));
  auto ntok = detail::read_tokens(is, "nodes");
  expect(ntok.size() == 2 && ntok[0] == "nodes", "malformed nodes line");
  const i64 count = parse_int(ntok[1]);
  const auto get_cube = [&](const std::vector<std::string>& tok,
                            std::size_t at) {
    expect(tok.size() >= at + 3 + dim, "truncated cube record");
    std::array<i64, 2> cc{0, 0};
    for (int i = 0; i < dim; ++i) cc[i] = parse_int(tok[at + i]);
    return Cube(dim, cc, parse_int(tok[at + dim]),
                static_cast<int>(parse_int(tok[at + dim + 1])),
                static_cast<int>(parse_int(tok[at + dim + 2])));
  };
  for (i64 k = 0; k < count; ++k) {
    auto tok = detail::read_tokens(is, "node");
    expect(tok.size() >= static_cast<std::size_t>(10 + dim) && tok[0] == "node" &&
               tok[2] == "depth" && tok[4] == "flags" && tok[7] == "cube",
           "malformed node line");
    expect(parse_int(tok[1]) == k, "node index out of order");
    CertificateNode n;
    n.depth = static_cast<int>(parse_int(tok[3]));
    n.resolution_floor = parse_int(tok[5]) != 0;
    n.cz_floor = parse_int(tok[6]) != 0;
    n.cube = get_cube(tok, 8);
    auto vtok = detail::read_tokens(is, "vals");
    expect(vtok.size() == 7 && vtok[0] == "vals", "malformed vals line");
    n.avg_ref = parse_double(vtok[1]);
    n.threshold_f = parse_double(vtok[2]);
    n.threshold_mt = parse_double(vtok[3]);
    n.boundary_max = parse_double(vtok[4]);
    n.residual_max = parse_double(vtok[5]);
    n.threshold = parse_double(vtok[6]);
    auto chtok = detail::read_tokens(is, "children");
    expect(!chtok.empty() && chtok[0] == "children", "malformed children line");
    for (std::size_t i = 1; i < chtok.size(); ++i)
      n.children.push_back(static_cast<std::size_t>(parse_int(chtok[i])));
    auto stok = detail::read_tokens(is, "selected");
    expect(stok.size() == 2 && stok[0] == "selected", "malformed selected line");
    const i64 scount = parse_int(stok[1]);
    for (i64 s = 0; s < scount; ++s) {
      auto seltok = detail::read_tokens(is, "sel");
      expect(!seltok.empty() && seltok[0] == "sel", "malformed sel line");
      n.selected.push_back(get_cube(seltok, 1));
    }
    cert.nodes.push_back(std::move(n));
  }
  for (const std::size_t r : cert.roots)
    expect(r < cert.nodes.size(), "root index out of range");
  for (const auto& n : cert.nodes)
    for (const std::size_t c : n.children)
      expect(c < cert.nodes.size(), "child index out of range");
  return cert;
}

}  // namespace sparsedom
