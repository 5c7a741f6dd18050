#include "sparsedom/grid_function.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include "sparsedom/detail/text.hpp"

namespace sparsedom {

namespace {
using i64 = std::int64_t;
using i128 = __int128;

i64 pow3(int e) {
  i64 v = 1;
  while (e-- > 0) v *= 3;
  return v;
}

double sum_on(const GridFunction& f, const Window::Span& s) {
  if (s.empty()) return 0.0;
  const Window& w = f.window();
  double total = 0.0;
  for (i64 iy = s.lo[1]; iy < s.hi[1]; ++iy)
    total += f.values().segment(w.index(s.lo[0], iy), s.hi[0] - s.lo[0]).sum();
  return total;
}

double pow_sum_on(const GridFunction& f, const Window::Span& s, double r) {
  if (s.empty()) return 0.0;
  const Window& w = f.window();
  double total = 0.0;
  for (i64 iy = s.lo[1]; iy < s.hi[1]; ++iy)
    total += f.values()
                 .segment(w.index(s.lo[0], iy), s.hi[0] - s.lo[0])
                 .pow(r)
                 .sum();
  return total;
}

void check_nonnegative_on(const GridFunction& f, const Window::Span& s) {
  const Window& w = f.window();
  for (i64 iy = s.lo[1]; iy < s.hi[1]; ++iy) {
    const auto seg =
        f.values().segment(w.index(s.lo[0], iy), s.hi[0] - s.lo[0]);
    if (seg.size() && seg.minCoeff() < 0.0)
      throw NegativityError("function is negative on the averaging cube");
  }
}

}  // namespace

GridFunction::GridFunction(const Window& window, Eigen::ArrayXd values)
    : window_(window), values_(std::move(values)) {
  if (values_.size() != window_.cell_count())
    throw PreconditionError("value count does not match the window lattice");
}

GridFunction GridFunction::zero(const Window& window) {
  return GridFunction(window, Eigen::ArrayXd::Zero(window.cell_count()));
}

GridFunction GridFunction::constant(const Window& window, double c) {
  return GridFunction(window,
                      Eigen::ArrayXd::Constant(window.cell_count(), c));
}

double average(const GridFunction& f, const Cube& q) {
  const auto s = f.window().span(q);
  return sum_on(f, s) * f.window().cell_measure() / q.measure();
}

double r_average(const GridFunction& f, const Cube& q, double r) {
  if (r < 1.0) throw PreconditionError("r-average requires r >= 1");
  const auto s = f.window().span(q);
  check_nonnegative_on(f, s);
  if (r == 1.0)
    return sum_on(f, s) * f.window().cell_measure() / q.measure();
  const double mass = pow_sum_on(f, s, r) * f.window().cell_measure();
  return std::pow(mass / q.measure(), 1.0 / r);
}

namespace {

// Per-axis exact overlaps of lattice cells with an arbitrary cube, as integer
// numerators over the common denominator 2^max(level) * 3^thirds.
struct AxisOverlap {
  i64 first_cell = 0;
  std::vector<i64> weights;  // one per cell with positive overlap
  i64 full = 1;              // numerator of a full cell
};

AxisOverlap axis_overlap(const Window& w, const Cube& q, int axis) {
  const int dl = std::max(0, q.level() - w.level());
  const i64 f_cell = (i64{1} << dl) * pow3(q.thirds());  // cell width, common units
  const int dq = w.level() + dl - q.level();
  const i64 f_q = i64{1} << dq;
  const i128 qlo = i128{q.corner(axis)} * f_q;
  const i128 qhi = i128{q.corner(axis) + q.side()} * f_q;
  AxisOverlap out;
  out.full = f_cell;
  const i64 cells = w.cells_per_axis();
  for (i64 i = 0; i < cells; ++i) {
    const i128 clo = i128{w.cube().corner(axis) + i} * f_cell;
    const i128 chi = clo + f_cell;
    const i128 lo = clo > qlo ? clo : qlo;
    const i128 hi = chi < qhi ? chi : qhi;
    if (hi <= lo) {
      if (!out.weights.empty()) break;  // past the cube
      continue;
    }
    if (out.weights.empty()) out.first_cell = i;
    out.weights.push_back(static_cast<i64>(hi - lo));
  }
  return out;
}

}  // namespace

double integral_over(const GridFunction& f, const Cube& q) {
  const Window& w = f.window();
  if (auto s = w.try_span(q))
    return sum_on(f, *s) * w.cell_measure();
  const AxisOverlap ox = axis_overlap(w, q, 0);
  const int dl = std::max(0, q.level() - w.level());
  const double unit =
      std::ldexp(1.0, -(w.level() + dl)) / static_cast<double>(pow3(q.thirds()));
  double total = 0.0;
  if (w.dim() == 1) {
    for (std::size_t a = 0; a < ox.weights.size(); ++a)
      total += f[ox.first_cell + static_cast<i64>(a)] *
               static_cast<double>(ox.weights[a]);
    return total * unit;
  }
  const AxisOverlap oy = axis_overlap(w, q, 1);
  for (std::size_t b = 0; b < oy.weights.size(); ++b)
    for (std::size_t a = 0; a < ox.weights.size(); ++a)
      total += f[w.index(ox.first_cell + static_cast<i64>(a),
                         oy.first_cell + static_cast<i64>(b))] *
               static_cast<double>(ox.weights[a]) *
               static_cast<double>(oy.weights[b]);
  return total * unit * unit;
}

double r_average_general(const GridFunction& f, const Cube& q, double r) {
  if (r < 1.0) throw PreconditionError("r-average requires r >= 1");
  if (auto s = f.window().try_span(q)) {
    check_nonnegative_on(f, *s);
    if (r == 1.0)
      return sum_on(f, *s) * f.window().cell_measure() / q.measure();
    return std::pow(pow_sum_on(f, *s, r) * f.window().cell_measure() /
                        q.measure(),
                    1.0 / r);
  }
  if (f.min_value() < 0.0)
    throw NegativityError("function is negative on the averaging cube");
  if (r == 1.0) return integral_over(f, q) / q.measure();
  GridFunction fr(f.window(), f.values().pow(r));
  return std::pow(integral_over(fr, q) / q.measure(), 1.0 / r);
}

GridFunction truncate(const GridFunction& f, std::span<const Cube> s,
                      TruncateMode mode) {
  const Window& w = f.window();
  GridFunction out = mode == TruncateMode::kKeep
                         ? GridFunction::zero(w)
                         : GridFunction(w, f.values());
  for (const Cube& q : s) {
    const auto sp = w.span(q);
    for (i64 iy = sp.lo[1]; iy < sp.hi[1]; ++iy) {
      const i64 base = w.index(sp.lo[0], iy);
      const i64 len = sp.hi[0] - sp.lo[0];
      if (mode == TruncateMode::kKeep)
        out.values().segment(base, len) = f.values().segment(base, len);
      else
        out.values().segment(base, len).setZero();
    }
  }
  return out;
}

double lp_norm(const GridFunction& f, double p, const GridFunction* w) {
  if (p < 1.0) throw PreconditionError("lp norm requires p >= 1");
  if (w) {
    if (w->window() != f.window())
      throw PreconditionError("weight lives on a different window");
    if (w->values().size() && w->values().minCoeff() <= 0.0)
      throw NonpositiveWeightError("weight must be cell-wise positive");
    return std::pow((f.values().abs().pow(p) * w->values()).sum() *
                        f.window().cell_measure(),
                    1.0 / p);
  }
  return std::pow(f.values().abs().pow(p).sum() * f.window().cell_measure(),
                  1.0 / p);
}

double sup_abs_on(const GridFunction& f, const Window::Span& s) {
  if (s.empty()) return 0.0;
  const Window& w = f.window();
  double best = 0.0;
  for (i64 iy = s.lo[1]; iy < s.hi[1]; ++iy) {
    const double m = f.values()
                         .segment(w.index(s.lo[0], iy), s.hi[0] - s.lo[0])
                         .abs()
                         .maxCoeff();
    best = std::max(best, m);
  }
  return best;
}

void save_text(const GridFunction& f, std::ostream& os) {
  const Cube& c = f.window().cube();
  os << "grid-function v1\n";
  os << "dim " << c.dim() << "\n";
  os << "window";
  for (int i = 0; i < c.dim(); ++i) os << " " << c.corner(i);
  os << " " << c.side() << " " << c.level() << "\n";
  os << "values " << f.size() << "\n";
  for (i64 i = 0; i < f.size(); ++i) os << detail::fmt_double(f[i]) << "\n";
}

GridFunction load_text(std::istream& is) {
  using detail::expect;
  auto head = detail::read_tokens(is, "grid-function header");
  expect(head.size() == 2 && head[0] == "grid-function" && head[1] == "v1",
         "not a grid-function file");
  auto dimtok = detail::read_tokens(is, "dim");
  expect(dimtok.size() == 2 && dimtok[0] == "dim", "missing dim line");
  const int dim = static_cast<int>(detail::parse_int(dimtok[1]));
  auto wtok = detail::read_tokens(is, "window");
  expect(wtok.size() == static_cast<std::size_t>(3 + dim) && wtok[0] == "window",
         "malformed window line");
  std::array<i64, 2> corner{0, 0};
  for (int i = 0; i < dim; ++i) corner[i] = detail::parse_int(wtok[1 + i]);
  const i64 side = detail::parse_int(wtok[1 + dim]);
  const int level = static_cast<int>(detail::parse_int(wtok[2 + dim]));
  Window w(Cube(dim, corner, side, level));
  auto vtok = detail::read_tokens(is, "values");
  expect(vtok.size() == 2 && vtok[0] == "values", "missing values line");
  const i64 count = detail::parse_int(vtok[1]);
  expect(count == w.cell_count(), "value count mismatch");
  Eigen::ArrayXd vals(count);
  for (i64 i = 0; i < count; ++i) {
    auto t = detail::read_tokens(is, "value");
    expect(t.size() == 1, "malformed value line");
    vals[i] = detail::parse_double(t[0]);
  }
  return GridFunction(w, std::move(vals));
}

void save_csv(const GridFunction& f, std::ostream& os) {
  os << "cell_index,value\n";
  for (i64 i = 0; i < f.size(); ++i)
    os << i << "," << detail::fmt_double(f[i]) << "\n";
}

GridFunction load_csv(const Window& window, std::istream& is) {
  std::string line;
  detail::expect(static_cast<bool>(std::getline(is, line)) &&
                     line == "cell_index,value",
                 "missing csv header");
  Eigen::ArrayXd vals = Eigen::ArrayXd::Zero(window.cell_count());
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    detail::expect(comma != std::string::npos, "malformed csv row");
    const i64 idx = detail::parse_int(line.substr(0, comma));
    detail::expect(idx >= 0 && idx < window.cell_count(),
                   "cell index out of range");
    vals[idx] = detail::parse_double(line.substr(comma + 1));
  }
  return GridFunction(window, std::move(vals));
}

}  // namespace sparsedom
