// Acceptance suite: one pass/fail line per criterion.  Exit status is the
// number of failed criteria.  `--calibrate` additionally prints the measured
// quantities behind the frozen reference constants.
#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

#include "oracles.hpp"
#include "sparsedom/config.hpp"
#include "sparsedom/domination.hpp"
#include "sparsedom/weights.hpp"

using namespace sparsedom;

namespace {

bool g_calibrate = false;

// Frozen calibration constants, measured once on the reference runs below
// and committed.  kKappa0 bounds C_emp / C_T for the level-10 suite, derived
// from the level-8 oracle run (measured 6.675) with ten percent headroom;
// kCempRef pins the level-10 maximum C_emp with a ten percent regression
// band.
constexpr double kKappa0 = 7.34;
constexpr double kCempRef = 21.2112;

struct Check {
  std::ostringstream detail;    // informational, printed either way
  std::ostringstream problems;  // appended on failed requirements
  bool ok = true;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (problems.tellp() > 0) problems << "; ";
      problems << what;
    }
  }
  std::string summary() const {
    const std::string p = problems.str();
    const std::string d = detail.str();
    if (p.empty()) return d;
    return d.empty() ? p : p + "; " + d;
  }
};

struct SuiteRun {
  GridFunction f;
  GlobalDomination run;
};

struct Suite {
  Window window;
  KernelTable table;
  Cube q0;
  std::vector<SuiteRun> runs;  // r = 1 domination of the 20 seeded functions
  double wall_seconds = 0.0;
};

GridFunction seeded_step(const Window& w, const Cube& support,
                         std::uint64_t index) {
  return build_test_function(w, support, FunctionSpec{"random-step", 16, -1},
                             1000 + index);
}

Suite build_suite(int level) {
  const std::int64_t n = std::int64_t{1} << level;
  const Window window(Cube::interval(-4 * n, 9 * n, level));  // [-4, 5)
  const Cube q0 = Cube::interval(0, 1, 0);
  Suite s{window, KernelTable(builtin_kernel("hilbert"), window), q0, {}, 0.0};
  const auto start = std::chrono::steady_clock::now();
  for (std::uint64_t i = 0; i < 20; ++i) {
    GridFunction f = seeded_step(window, q0, i);
    GlobalDomination run = global_dominate(s.table, f, q0, 2, 1.0);
    s.runs.push_back(SuiteRun{std::move(f), std::move(run)});
  }
  s.wall_seconds = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return s;
}

// ----- criterion bodies ----------------------------------------------------

void criterion_sparseness(Suite& s, Check& c) {
  for (const auto& r : s.runs) {
    c.require(r.run.family.eta.num == 1 && r.run.family.eta.den == 6,
              "dilated family eta is not 1/6");
    c.require(verify_sparse(r.run.family).ok, "dilated family not sparse");
    c.require(r.run.pre_dilation.eta.num == 1 && r.run.pre_dilation.eta.den == 2,
              "pre-dilation eta is not 1/2");
    c.require(verify_sparse(r.run.pre_dilation).ok,
              "pre-dilation family not sparse");
  }
  c.require(s.wall_seconds <= 60.0, "suite exceeded 60 s");
  c.detail << "20 runs in " << s.wall_seconds << " s";
}

void criterion_replay(Suite& s, Check& c) {
  const Window& w = s.window;
  for (const auto& r : s.runs) {
    const auto rep = replay_certificate(r.run.certificate, s.table, r.f);
    c.require(rep.ok, "replay reported violations");
    c.require(rep.nodes_checked == r.run.certificate.nodes.size(),
              "replay skipped nodes");
    for (const auto& node : r.run.certificate.nodes) {
      std::int64_t sel = 0;
      for (const Cube& p : node.selected) sel += w.span(p).count();
      c.require(2 * sel <= w.span(node.cube).count(),
                "selected mass exceeds half the node");
    }
  }
  c.detail << s.runs.size() << " certificates, "
           << [&] {
                std::size_t t = 0;
                for (const auto& r : s.runs)
                  t += r.run.certificate.nodes.size();
                return t;
              }()
           << " nodes";
}

void criterion_domination(Suite& s, Check& c) {
  const Window& w = s.window;
  const LatticeSet all = LatticeSet::cube_cells(w, w.cube());
  const OperatorConstants constants =
      measure_constants(s.table.kernel(), Window(s.q0));
  double worst_ratio = 0.0;
  double cemp_max = 0.0;
  for (const auto& r : s.runs) {
    const GridFunction rhs = apply_sparse(r.run.family, r.f.abs(), 1.0);
    bool dominated = true;
    for (std::int64_t x = 0; x < w.cell_count(); ++x) {
      const double lhs = std::abs(apply_truncated(s.table, r.f, all, x));
      if (lhs > r.run.c_emp * rhs[x] * (1.0 + 1e-9) + 1e-12) dominated = false;
    }
    c.require(dominated, "pointwise domination failed");
    worst_ratio = std::max(worst_ratio, r.run.c_emp / constants.c_t);
    cemp_max = std::max(cemp_max, r.run.c_emp);
  }
  c.require(worst_ratio <= kKappa0, "C_emp/C_T exceeded the frozen kappa0");
  c.require(cemp_max >= 0.9 * kCempRef && cemp_max <= 1.1 * kCempRef,
            "C_emp drifted outside the regression band");
  c.detail << "max C_emp " << cemp_max << ", max C_emp/C_T " << worst_ratio;
  if (g_calibrate)
    std::cout << "  [calibrate] level-10 max C_emp " << cemp_max
              << " max ratio " << worst_ratio << "\n";
}

void calibrate_kappa0() {
  // the level-8 oracle run behind the frozen kappa0
  const std::int64_t n = 256;
  const Window window(Cube::interval(-4 * n, 9 * n, 8));
  const Cube q0 = Cube::interval(0, 1, 0);
  const KernelTable table(builtin_kernel("hilbert"), window);
  const OperatorConstants constants =
      measure_constants(table.kernel(), Window(q0));
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    const GridFunction f = seeded_step(window, q0, i);
    const auto run = global_dominate(table, f, q0, 2, 1.0);
    worst = std::max(worst, run.c_emp / constants.c_t);
  }
  std::cout << "  [calibrate] level-8 max C_emp/C_T " << worst
            << " -> kappa0 with headroom " << 1.1 * worst << "\n";
}

void criterion_maximal_stability(Check& c) {
  const auto start = std::chrono::steady_clock::now();
  const KernelSpec kernel = builtin_kernel("hilbert");
  const double dini_ck = dini_norm(kernel.omega) + kernel.size_constant;
  std::vector<double> kappas;
  for (const int level : {8, 9, 10}) {
    const Window w(Cube::interval(0, std::int64_t{1} << level, level));
    const KernelTable table(kernel, w);
    double kappa = 0.0;
    for (std::uint64_t i = 0; i < 50; ++i) {
      const GridFunction f =
          seeded_step(w, Cube::interval(0, 1, 0), 2000 + i);
      const Eigen::ArrayXd mt = grand_maximal_all(table, f);
      const Eigen::ArrayXd ts = truncated_maximal_all(table, f);
      const Eigen::ArrayXd m = hardy_littlewood_all(f);
      for (std::int64_t x = 0; x < w.cell_count(); ++x) {
        if (mt[x] <= ts[x]) continue;
        c.require(m[x] > 0.0, "maximal function vanished under the grand maximal");
        kappa = std::max(kappa, (mt[x] - ts[x]) / (dini_ck * m[x]));
      }
    }
    kappas.push_back(kappa);
  }
  const double kmin = *std::min_element(kappas.begin(), kappas.end());
  const double kmax = *std::max_element(kappas.begin(), kappas.end());
  c.require(kmax <= 1.2 * kmin, "kappa varies more than 20% across levels");
  // the pointwise inequality with the largest measured kappa, rechecked on
  // the finest level
  {
    const Window w(Cube::interval(0, 1024, 10));
    const KernelTable table(kernel, w);
    const GridFunction f = seeded_step(w, Cube::interval(0, 1, 0), 2049);
    const Eigen::ArrayXd mt = grand_maximal_all(table, f);
    const Eigen::ArrayXd ts = truncated_maximal_all(table, f);
    const Eigen::ArrayXd m = hardy_littlewood_all(f);
    for (std::int64_t x = 0; x < w.cell_count(); ++x)
      c.require(mt[x] <= kmax * dini_ck * m[x] + ts[x] + 1e-12,
                "pointwise bound failed at a cell");
  }
  const double secs = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  c.require(secs <= 300.0, "stability run exceeded 5 minutes");
  c.detail << "kappa " << kappas[0] << " / " << kappas[1] << " / " << kappas[2]
           << " in " << secs << " s";
}

void criterion_cz_oracle(Check& c) {
  // exhaustive at 16 cells with |E| <= 2
  {
    const Window w(Cube::interval(0, 16, 4));
    const Cube q0 = w.cube();
    std::vector<LatticeSet> sets;
    sets.push_back(LatticeSet{});
    for (std::int64_t a = 0; a < 16; ++a) {
      sets.push_back(LatticeSet({a}));
      for (std::int64_t b = a + 1; b < 16; ++b)
        sets.push_back(LatticeSet({a, b}));
    }
    for (const auto& e : sets) {
      const auto got = cz_decompose(w, e, q0, default_cz_height(1));
      const auto want = oracles::cz_oracle(w, e, q0, default_cz_height(1));
      c.require(oracles::same_cubes(got.selected, want),
                "exhaustive case diverged from the oracle");
      c.require(got.uncovered.empty(), "uncovered exceptional cells");
    }
    c.detail << sets.size() << " exhaustive sets";
  }
  // 100 random at 64 cells
  {
    const Window w(Cube::interval(0, 64, 6));
    DeterministicRng rng(4242);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<std::int64_t> cells;
      const std::int64_t count = rng.uniform_int(9);
      for (std::int64_t k = 0; k < count; ++k)
        cells.push_back(rng.uniform_int(64));
      const LatticeSet e(std::move(cells));
      const auto got = cz_decompose(w, e, w.cube(), default_cz_height(1));
      const auto want = oracles::cz_oracle(w, e, w.cube(), default_cz_height(1));
      c.require(oracles::same_cubes(got.selected, want),
                "random case diverged from the oracle");
    }
    c.detail << ", 100 random sets";
  }
}

void criterion_dini(Check& c) {
  const double lin = dini_norm([](double t) { return t; });
  c.require(std::abs(lin - 1.0) <= 1e-6, "linear modulus missed 1");
  const double root = dini_norm([](double t) { return std::sqrt(t); });
  c.require(std::abs(root - 2.0) <= 2e-6, "square-root modulus missed 2");
  bool threw = false;
  try {
    dini_norm([](double t) {
      return t <= 0.0 ? 0.0 : 1.0 / (1.0 - std::log(t));
    });
  } catch (const DiniDivergenceError&) {
    threw = true;
  }
  c.require(threw, "divergent modulus was not flagged");
  c.detail << "linear " << lin << ", root " << root << ", divergence signaled";
}

void criterion_weighted_slope(Suite& s, Check& c) {
  const auto start = std::chrono::steady_clock::now();
  const SparseFamily& family = s.runs.front().run.family;
  std::vector<double> lx, ly;
  double worst_diag = 0.0;
  for (const double alpha : {-0.9, -0.6, -0.3, 0.0, 0.3, 0.6, 0.9}) {
    const auto wp =
        WeightProfile::make(power_weight(s.window, alpha, 0), 2.0, 1.0);
    const double chr = ap_characteristic(wp.w, 2.0);
    const double lb = sparse_weighted_norm(family, wp, 24, 999).value;
    const auto diag = appendix_diagnostic(family, wp);
    c.require(diag.ok, "per-cube diagnostic failed");
    worst_diag = std::max(worst_diag, diag.max_ratio);
    c.require(lb > 0.0 && chr >= 1.0 - 1e-12, "degenerate sweep point");
    lx.push_back(std::log(chr));
    ly.push_back(std::log(lb));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(lx.size());
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  c.require(slope <= 1.15, "slope exceeded 1.15");
  const double secs = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  c.require(secs <= 180.0, "sweep exceeded 3 minutes");
  c.detail << "slope " << slope << ", worst diagnostic " << worst_diag
           << ", " << secs << " s";
}

void criterion_three_grid(Check& c) {
  const Window w(Cube::interval(0, 1024, 10));
  std::vector<GridFunction> fs;
  for (std::uint64_t i = 0; i < 20; ++i)
    fs.push_back(seeded_step(w, w.cube(), 3000 + i));
  double worst_c = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const SparseFamily fam =
        oracles::random_family(w, 50, Ratio{1, 2}, 5000 + trial);
    const auto dec = three_grid_decompose(fam);
    for (const auto& sub : dec.families)
      c.require(verify_sparse(sub).ok, "per-grid family not sparse");
    for (const auto& f : fs) {
      const GridFunction lhs = apply_sparse(fam, f, 1.0);
      GridFunction rhs = GridFunction::zero(w);
      for (const auto& sub : dec.families)
        rhs.values() += apply_sparse(sub, f, 1.0).values();
      for (std::int64_t i = 0; i < w.cell_count(); ++i) {
        if (lhs[i] <= 0.0) continue;
        c.require(lhs[i] <= 6.0 * rhs[i] * (1.0 + 1e-9),
                  "pointwise three-grid bound failed");
        worst_c = std::max(worst_c, lhs[i] / rhs[i]);
      }
    }
  }
  // exact 6x containment for random lattice cubes
  DeterministicRng rng(606);
  int covered = 0;
  for (int i = 0; i < 10000; ++i) {
    const std::int64_t side = 1 + rng.uniform_int(1024);
    const Cube q = Cube::interval(rng.uniform_int(4096) - 2048, side, 10);
    for (const auto& g : shifted_grids(1)) {
      const auto enc = enclosing_grid_cube(g, q, 6);
      if (enc && enc->contains(q)) {
        ++covered;
        break;
      }
    }
  }
  c.require(covered == 10000, "a lattice cube had no 6x enclosure");
  c.detail << "measured c " << worst_c << " (target 6), 10^4 containments";
}

void criterion_r_variant(Suite& s, Check& c) {
  for (const auto& r1 : s.runs) {
    const auto run2 = global_dominate(s.table, r1.f, s.q0, 2, 2.0);
    const auto rep = replay_certificate(run2.certificate, s.table, r1.f);
    c.require(rep.ok, "r = 2 certificate failed replay");
    c.require(verify_sparse(run2.family).ok, "r = 2 family not sparse");
    const GridFunction absf = r1.f.abs();
    const GridFunction a1 = apply_sparse(run2.family, absf, 1.0);
    const GridFunction a2 = apply_sparse(run2.family, absf, 2.0);
    for (std::int64_t i = 0; i < s.window.cell_count(); ++i)
      c.require(a2[i] >= a1[i] - 1e-12, "2-average fell below the 1-average");
  }
  c.detail << s.runs.size() << " r = 2 runs";
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--calibrate") == 0) g_calibrate = true;

  std::cout << "building the level-10 reference suite (20 seeded functions)\n";
  Suite suite = build_suite(10);
  if (g_calibrate) calibrate_kappa0();

  struct Criterion {
    int id;
    const char* name;
    std::function<void(Check&)> body;
  };
  const std::vector<Criterion> criteria{
      {1, "sparseness exactness",
       [&](Check& c) { criterion_sparseness(suite, c); }},
      {2, "certificate replay", [&](Check& c) { criterion_replay(suite, c); }},
      {3, "pointwise domination",
       [&](Check& c) { criterion_domination(suite, c); }},
      {4, "maximal comparison stability",
       [&](Check& c) { criterion_maximal_stability(c); }},
      {5, "stopping-time oracle equivalence",
       [&](Check& c) { criterion_cz_oracle(c); }},
      {6, "dini quadrature", [&](Check& c) { criterion_dini(c); }},
      {7, "weighted norm slope",
       [&](Check& c) { criterion_weighted_slope(suite, c); }},
      {8, "three-grid decomposition",
       [&](Check& c) { criterion_three_grid(c); }},
      {9, "r-variant consistency",
       [&](Check& c) { criterion_r_variant(suite, c); }},
  };

  int failures = 0;
  for (const auto& crit : criteria) {
    Check c;
    try {
      crit.body(c);
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail << "exception: " << e.what();
    }
    std::cout << (c.ok ? "[PASS]" : "[FAIL]") << " criterion " << crit.id
              << ": " << crit.name;
    const std::string d = c.summary();
    if (!d.empty()) std::cout << " (" << d << ")";
    std::cout << "\n";
    if (!c.ok) ++failures;
  }
  return failures;
}
