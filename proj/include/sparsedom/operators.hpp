#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <vector>

#include "sparsedom/grid_function.hpp"
#include "sparsedom/kernels.hpp"
#include "sparsedom/lattice.hpp"

namespace sparsedom {

/// Cell-center kernel samples for one window, cached for the hot paths.
/// Translation-invariant 1-D kernels use a difference table; small windows a
/// dense matrix; anything else falls back to direct evaluation.  The diagonal
/// coefficient is always zero (principal-value convention drops the cell).
class KernelTable {
 public:
  KernelTable(KernelSpec kernel, const Window& window);

  const KernelSpec& kernel() const { return kernel_; }
  const Window& window() const { return window_; }

  double coef(std::int64_t i, std::int64_t j) const {
    if (i == j) return 0.0;
    switch (mode_) {
      case Mode::kDiff:
        return diff_[i - j + window_.cell_count() - 1];
      case Mode::kDense:
        return dense_(i, j);
      default:
        return kernel_.evaluate(window_.center(i), window_.center(j));
    }
  }

 private:
  enum class Mode { kDiff, kDense, kDirect };
  KernelSpec kernel_;
  Window window_;
  Mode mode_;
  std::vector<double> diff_;
  Eigen::MatrixXd dense_;
};

/// Discrete T(f * indicator of E)(x): sum over cells j in E, j != x, of
/// K(x_j-center pair) * f_j * h^dim.
double apply_truncated(const KernelTable& t, const GridFunction& f,
                       const LatticeSet& e, std::int64_t x);

/// Admissible cube families for the maximal operators.
enum class CubeFamily { kShiftedDyadic, kExhaustive };

/// Cells whose centers fall in a cube, and their count: the discrete-measure
/// footprint used by the maximal operators for shifted (thirds) cubes.
/// Lattice-aligned cubes reduce to their exact cell span.

/// Hardy-Littlewood maximal function of |f| at cell x over the family.
double hardy_littlewood(const GridFunction& f, std::int64_t x,
                        CubeFamily family = CubeFamily::kShiftedDyadic);
Eigen::ArrayXd hardy_littlewood_all(const GridFunction& f,
                                    CubeFamily family = CubeFamily::kShiftedDyadic);

/// sup over discrete truncation radii of |sum_{|y-x|>eps} K(x,y) f(y) h^dim|.
double truncated_maximal(const KernelTable& t, const GridFunction& f,
                         std::int64_t x);
Eigen::ArrayXd truncated_maximal_all(const KernelTable& t,
                                     const GridFunction& f);

/// Engine behind the scoped grand maximal operator: for every cube P of the
/// halving tower of `scope`, the boundary value
///   B(P) = max over cells xi of P of |T(f * chi_{(3*scope \ 3P)})(xi)|,
/// the pointwise maximum m(x) = max over tower cubes P containing x of B(P),
/// and the untruncated values u(x) = T(f * chi_{3*scope})(x) on scope cells.
/// Cell data is indexed row-major over the scope span.
struct ScopedMaximal {
  Cube scope;
  Window::Span scope_span;
  /// tower[l] lists the tower cubes at subdivision depth l+1, row-major.
  std::vector<std::vector<Cube>> tower;
  std::vector<Eigen::ArrayXd> boundary_max;  // parallel to tower
  Eigen::ArrayXd pointwise;                  // m(x), one entry per scope cell
  Eigen::ArrayXd full;                       // u(x), one entry per scope cell

  /// Locates a tower cube; returns {level, index} or nullopt.
  std::optional<std::pair<int, std::int64_t>> locate(const Cube& p) const;
};
ScopedMaximal scoped_grand_maximal(const KernelTable& t, const GridFunction& f,
                                   const Cube& scope);

/// Grand maximal truncated operator.  Without scope: sup over family cubes Q
/// containing x of max_{xi in Q} |T(f * chi_{window \ 3Q})(xi)|.  With scope:
/// the local variant over the halving tower of the scope cube (x must lie in
/// the scope).
double grand_maximal(const KernelTable& t, const GridFunction& f,
                     std::int64_t x, const std::optional<Cube>& scope = {},
                     CubeFamily family = CubeFamily::kShiftedDyadic);
Eigen::ArrayXd grand_maximal_all(const KernelTable& t, const GridFunction& f,
                                 CubeFamily family = CubeFamily::kShiftedDyadic);

/// Largest singular value of the discrete full-truncation operator on L2 of
/// the window, by power iteration on T T^t; ConvergenceError if the stopping
/// rule is not met.
double estimate_l2_norm(const KernelSpec& kernel, const Window& window,
                        double rel_tol = 1e-5, int max_iters = 50000,
                        std::uint64_t seed = 0x5eed);

struct OperatorConstants {
  double l2_norm = 0.0;
  double c_k = 0.0;
  double dini = 0.0;
  double c_t = 0.0;  // always the sum of the three components
};
OperatorConstants measure_constants(const KernelSpec& kernel,
                                    const Window& window);

/// Randomized audit of the declared kernel data: size condition, modulus
/// axioms, and the smoothness condition on sampled admissible triples.
struct KernelAuditReport {
  bool ok = true;
  int size_checked = 0, size_violations = 0;
  int smooth_checked = 0, smooth_violations = 0;
  int modulus_violations = 0;
  double worst_size_ratio = 0.0;    // |K| * |x-y|^dim / C_K
  double worst_smooth_ratio = 0.0;  // |dK| * |x-y|^dim / omega(t)
};
KernelAuditReport audit_kernel(const KernelSpec& kernel, const Window& window,
                               std::uint64_t seed, int samples = 2000);

/// Shifted-grid cubes meeting the window, smallest scale = one cell, largest
/// scale the first that covers the window.  Used by the maximal operators and
/// the weight characteristic.
std::vector<Cube> shifted_family(const Window& w);
/// Every lattice-aligned cube inside the window (guarded to small windows).
std::vector<Cube> exhaustive_family(const Window& w);

}  // namespace sparsedom
