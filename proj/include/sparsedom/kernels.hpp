#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "sparsedom/errors.hpp"

namespace sparsedom {

using Point = std::array<double, 2>;

/// A singular integral kernel together with its declared size constant and
/// modulus of continuity.  The declared data is audited, not trusted: see
/// audit_kernel in operators.hpp.
struct KernelSpec {
  std::string name;
  int dim = 1;
  /// K(x, y) for x != y.
  std::function<double(const Point&, const Point&)> evaluate;
  /// C_K in |K(x,y)| <= C_K / |x-y|^dim.
  double size_constant = 1.0;
  /// Modulus of continuity on [0,1] controlling the smoothness condition
  /// |K(x,y) - K(x',y)| <= omega(|x-x'|/|x-y|) / |x-y|^dim for |x-y| > 2|x-x'|.
  std::function<double(double)> omega;
  /// Enables the cached difference-table fast path (1-D convolution kernels).
  bool translation_invariant = false;
};

/// Registered kernels: "hilbert" (1/(x-y), omega(t)=2t), "logdini"
/// (1/(4(x-y)) certified under a log-square modulus that is Dini but not
/// Lipschitz at 0), and "zero".  The singular kernels are one-dimensional;
/// "zero" exists in both dimensions.  Custom kernels are plain KernelSpec
/// values, constructed programmatically.
KernelSpec builtin_kernel(const std::string& name, int dim = 1);
std::vector<std::string> builtin_kernel_names();

/// int_0^1 omega(t) dt/t, computed after the substitution t = e^-s as
/// int_0^inf omega(e^-s) ds with adaptive panels plus a ratio-extrapolated
/// tail.  Throws DiniDivergenceError when the partial integrals fail to
/// Cauchy-converge (tail blocks not decaying geometrically).
double dini_norm(const std::function<double(double)>& omega);

}  // namespace sparsedom
