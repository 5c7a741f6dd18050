#include "sparsedom/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>

#include "sparsedom/detail/text.hpp"
#include "sparsedom/geometry.hpp"

namespace sparsedom {

namespace {
using i64 = std::int64_t;
using i128 = __int128;

i64 pow3(int e) {
  i64 v = 1;
  while (e-- > 0) v *= 3;
  return v;
}

// |E_Q| >= eta |Q| exactly: witness cells live at the window resolution, the
// cube may carry its own denominators.
bool witness_mass_ok(const Window& w, const Cube& q, i64 witness_cells,
                     const Ratio& eta) {
  // witness measure = cells * 2^(-n*L); |Q| = side^n * 2^(-n*ql) * 3^(-n*qt)
  // compare cells * den * side_scale against num * side^n * cell_scale over
  // the common denominator.
  const int n = w.dim();
  i128 lhs = i128{witness_cells} * eta.den;
  i128 rhs = eta.num;
  for (int a = 0; a < n; ++a) rhs *= q.side();
  // scale both to the common denominator 2^(n*max(L,ql)) 3^(n*qt)
  const int dl = w.level() - q.level();
  for (int a = 0; a < n; ++a) {
    if (dl >= 0)
      rhs *= i128{1} << dl;  // q side upscaled to window resolution
    else
      lhs *= i128{1} << -dl;
    lhs *= pow3(q.thirds());
  }
  return lhs >= rhs;
}

}  // namespace

SparseReport verify_sparse(const SparseFamily& s) {
  SparseReport rep;
  double worst = s.entries.empty() ? 1.0 : 1e300;
  std::vector<i64> all_cells;
  for (std::size_t i = 0; i < s.entries.size(); ++i) {
    const SparseEntry& e = s.entries[i];
    bool bad = false;
    // witness inside the cube
    for (const i64 c : e.witness.cells()) {
      if (!e.cube.contains(s.window.cell_cube(c))) {
        bad = true;
        break;
      }
    }
    if (!witness_mass_ok(s.window, e.cube, e.witness.size(), s.eta)) bad = true;
    const double ratio = static_cast<double>(e.witness.size()) *
                         s.window.cell_measure() / e.cube.measure();
    worst = std::min(worst, ratio);
    if (bad) {
      rep.ok = false;
      rep.violating_entries.push_back(i);
    }
    all_cells.insert(all_cells.end(), e.witness.cells().begin(),
                     e.witness.cells().end());
  }
  std::sort(all_cells.begin(), all_cells.end());
  if (std::adjacent_find(all_cells.begin(), all_cells.end()) !=
      all_cells.end()) {
    rep.ok = false;
    rep.detail = "witness sets overlap";
  }
  rep.worst_ratio = worst;
  return rep;
}

GridFunction apply_sparse(const SparseFamily& s, const GridFunction& f,
                          double r) {
  if (f.window() != s.window)
    throw PreconditionError("function window differs from the family window");
  if (f.size() && f.min_value() < 0.0)
    throw NegativityError("sparse operators act on nonnegative functions");
  GridFunction out = GridFunction::zero(f.window());
  for (const SparseEntry& e : s.entries) {
    const double avg = r_average_general(f, e.cube, r);
    if (avg == 0.0) continue;
    const Window::Span sp = f.window().center_span(e.cube);
    f.window().for_each(sp, [&](i64 idx) { out[idx] += avg; });
  }
  return out;
}

ThreeGridDecomposition three_grid_decompose(const SparseFamily& s) {
  const int dim = s.window.dim();
  const auto grids = shifted_grids(dim);
  ThreeGridDecomposition out;
  const i64 six_n = dim == 1 ? 6 : 36;
  const Ratio sub_eta{s.eta.num, s.eta.den * six_n};
  for (const DyadicGrid& g : grids) {
    SparseFamily fam(s.window, sub_eta);
    fam.grid_tag = g.id;
    out.families.push_back(std::move(fam));
  }
  for (const SparseEntry& e : s.entries) {
    bool placed = false;
    for (const DyadicGrid& g : grids) {
      const auto enclosing = enclosing_grid_cube(g, e.cube, 6);
      if (!enclosing) continue;
      i64 ratio = enclosing->side() / e.cube.side();
      {
        // sides may carry different denominators after normalization
        const double rr = enclosing->side_length() / e.cube.side_length();
        ratio = static_cast<i64>(std::llround(rr));
      }
      out.max_side_ratio = std::max(out.max_side_ratio, ratio);
      out.families[static_cast<std::size_t>(g.id)].entries.push_back(
          SparseEntry{*enclosing, e.witness});
      placed = true;
      break;
    }
    if (!placed)
      throw ScaleRangeError("no shifted grid offers a 6x enclosing cube for " +
                            e.cube.to_string());
  }
  return out;
}

void save_family(const SparseFamily& s, std::ostream& os) {
  const Cube& w = s.window.cube();
  os << "sparse-family v1\n";
  os << "dim " << w.dim() << "\n";
  os << "window";
  for (int i = 0; i < w.dim(); ++i) os << " " << w.corner(i);
  os << " " << w.side() << " " << w.level() << "\n";
  os << "eta " << s.eta.num << " " << s.eta.den << "\n";
  os << "grid_tag " << (s.grid_tag ? *s.grid_tag : -1) << "\n";
  os << "entries " << s.entries.size() << "\n";
  for (const SparseEntry& e : s.entries) {
    os << "cube";
    for (int i = 0; i < w.dim(); ++i) os << " " << e.cube.corner(i);
    os << " " << e.cube.side() << " " << e.cube.level() << " "
       << e.cube.thirds() << " witness";
    for (const auto& run : e.witness.runs())
      os << " " << run.first << ":" << run.second;
    os << "\n";
  }
}

SparseFamily load_family(std::istream& is) {
  using detail::expect;
  auto head = detail::read_tokens(is, "family header");
  expect(head.size() == 2 && head[0] == "sparse-family" && head[1] == "v1",
         "not a sparse-family file");
  auto dimtok = detail::read_tokens(is, "dim");
  expect(dimtok.size() == 2 && dimtok[0] == "dim", "missing dim line");
  const int dim = static_cast<int>(detail::parse_int(dimtok[1]));
  expect(dim == 1 || dim == 2, "bad dimension");
  auto wtok = detail::read_tokens(is, "window");
  expect(wtok.size() == static_cast<std::size_t>(3 + dim) && wtok[0] == "window",
         "malformed window line");
  std::array<i64, 2> corner{0, 0};
  for (int i = 0; i < dim; ++i) corner[i] = detail::parse_int(wtok[1 + i]);
  Window w(Cube(dim, corner, detail::parse_int(wtok[1 + dim]),
                static_cast<int>(detail::parse_int(wtok[2 + dim]))));
  auto etok = detail::read_tokens(is, "eta");
  expect(etok.size() == 3 && etok[0] == "eta", "malformed eta line");
  SparseFamily fam(w, Ratio{detail::parse_int(etok[1]), detail::parse_int(etok[2])});
  auto gtok = detail::read_tokens(is, "grid_tag");
  expect(gtok.size() == 2 && gtok[0] == "grid_tag", "malformed grid_tag line");
  const i64 tag = detail::parse_int(gtok[1]);
  if (tag >= 0) fam.grid_tag = static_cast<int>(tag);
  auto ctok = detail::read_tokens(is, "entries");
  expect(ctok.size() == 2 && ctok[0] == "entries", "malformed entries line");
  const i64 count = detail::parse_int(ctok[1]);
  for (i64 k = 0; k < count; ++k) {
    auto tok = detail::read_tokens(is, "entry");
    expect(tok.size() >= static_cast<std::size_t>(5 + dim) && tok[0] == "cube",
           "malformed entry line");
    std::array<i64, 2> cc{0, 0};
    for (int i = 0; i < dim; ++i) cc[i] = detail::parse_int(tok[1 + i]);
    const i64 side = detail::parse_int(tok[1 + dim]);
    const int level = static_cast<int>(detail::parse_int(tok[2 + dim]));
    const int thirds = static_cast<int>(detail::parse_int(tok[3 + dim]));
    expect(tok[4 + dim] == "witness", "missing witness marker");
    std::vector<i64> cells;
    for (std::size_t i = 5 + dim; i < tok.size(); ++i) {
      const auto colon = tok[i].find(':');
      expect(colon != std::string::npos, "malformed witness run");
      const i64 a = detail::parse_int(tok[i].substr(0, colon));
      const i64 b = detail::parse_int(tok[i].substr(colon + 1));
      expect(a < b && a >= 0 && b <= w.cell_count(), "witness run out of range");
      for (i64 c = a; c < b; ++c) cells.push_back(c);
    }
    fam.entries.push_back(
        SparseEntry{Cube(dim, cc, side, level, thirds), LatticeSet(std::move(cells))});
  }
  return fam;
}

}  // namespace sparsedom
