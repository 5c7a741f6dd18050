#include "sparsedom/kernels.hpp"

#include <cmath>

namespace sparsedom {

namespace {

double hilbert_eval(const Point& x, const Point& y) { return 1.0 / (x[0] - y[0]); }

// Non-Lipschitz Dini modulus: 1/log^2(e/t) up to t = e^-2, continued by its
// tangent line.  The tangent continuation keeps the function concave (the
// log-square branch turns convex past e^-2 and would lose subadditivity),
// and concavity with omega(0) = 0 gives subadditivity.  Near 0 it still
// decays like 1/log^2, so omega(t)/t is unbounded: Dini but not Lipschitz.
double logdini_modulus(double t) {
  if (t <= 0.0) return 0.0;
  constexpr double kKnee = 0.13533528323661270;  // e^-2
  if (t <= kKnee) {
    const double l = 1.0 - std::log(t);
    return 1.0 / (l * l);
  }
  const double slope = 2.0 * std::exp(2.0) / 27.0;
  return slope * t + 1.0 / 27.0;
}

// Scaled Hilbert kernel certified under logdini_modulus.  The increment
// bound of beta/(x-y) is 2 beta t / |x-y|; with beta = 1/4 the inequality
// t/2 <= omega(t) holds on all of (0,1] (the linear branch has slope ~0.547
// and positive intercept; on the log branch t log^2(e/t) <= 9 e^-2 < 2), so
// the declared modulus is honest.
double logdini_eval(const Point& x, const Point& y) {
  return 1.0 / (4.0 * (x[0] - y[0]));
}

double zero_eval(const Point&, const Point&) { return 0.0; }

// Adaptive Simpson on one panel.
double simpson(const std::function<double(double)>& g, double a, double b) {
  const double m = 0.5 * (a + b);
  return (b - a) / 6.0 * (g(a) + 4.0 * g(m) + g(b));
}

double adaptive(const std::function<double(double)>& g, double a, double b,
                double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double left = simpson(g, a, m);
  const double right = simpson(g, m, b);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive(g, a, m, left, tol / 2.0, depth - 1) +
         adaptive(g, m, b, right, tol / 2.0, depth - 1);
}

}  // namespace

KernelSpec builtin_kernel(const std::string& name, int dim) {
  if (dim != 1 && dim != 2)
    throw ConfigError("dim", "kernels exist in dimensions 1 and 2 only");
  if (name == "zero") {
    KernelSpec k;
    k.name = name;
    k.dim = dim;
    k.evaluate = zero_eval;
    k.size_constant = 1.0;
    k.omega = [](double) { return 0.0; };
    k.translation_invariant = true;
    return k;
  }
  if (dim != 1)
    throw ConfigError("kernel",
                      "kernel '" + name + "' is one-dimensional only");
  if (name == "hilbert") {
    KernelSpec k;
    k.name = name;
    k.dim = 1;
    k.evaluate = hilbert_eval;
    k.size_constant = 1.0;
    k.omega = [](double t) { return 2.0 * t; };
    k.translation_invariant = true;
    return k;
  }
  if (name == "logdini") {
    KernelSpec k;
    k.name = name;
    k.dim = 1;
    k.evaluate = logdini_eval;
    k.size_constant = 0.25;
    k.omega = logdini_modulus;
    k.translation_invariant = true;
    return k;
  }
  throw ConfigError("kernel", "unknown kernel '" + name + "'");
}

std::vector<std::string> builtin_kernel_names() {
  return {"hilbert", "logdini", "zero"};
}

double dini_norm(const std::function<double(double)>& omega) {
  // After t = e^-s the integral becomes int_0^inf omega(e^-s) ds.  The head
  // [0, 16] uses adaptive unit panels; the tail is walked in doubling blocks
  // [16*2^k, 16*2^(k+1)] up to s = 512, which stays clear of the point where
  // e^-s underflows and omega can no longer be sampled.  A Dini modulus has
  // summable blocks: either they vanish outright, or they decay at a
  // geometric rate whose ratio extrapolates the remainder.  Block ratios
  // near 1 signal a divergent partial-integral sequence.
  const std::function<double(double)> g = [&](double s) {
    return omega(std::exp(-s));
  };
  constexpr double kPanelTol = 1e-11;
  double total = 0.0;
  for (int p = 0; p < 16; ++p) {
    const double a = p, b = p + 1.0;
    total += adaptive(g, a, b, simpson(g, a, b), kPanelTol, 40);
  }
  double prev_block = -1.0;
  double lo = 16.0;
  for (int k = 0; k < 5; ++k) {
    const double hi = 2.0 * lo;
    // unit-ish panels inside each block keep the adaptive rule honest
    double block = 0.0;
    const int panels = 8;
    for (int p = 0; p < panels; ++p) {
      const double a = lo + (hi - lo) * p / panels;
      const double b = lo + (hi - lo) * (p + 1) / panels;
      block += adaptive(g, a, b, simpson(g, a, b), kPanelTol, 40);
    }
    total += block;
    lo = hi;
    if (k == 4) {
      if (std::abs(block) <= 1e-7 * std::max(1.0, std::abs(total)))
        return total;
      if (prev_block <= 0.0)
        throw DiniDivergenceError("tail blocks of the Dini integral misbehave");
      const double rho = block / prev_block;
      if (rho >= 0.95)
        throw DiniDivergenceError(
            "partial Dini integrals failed to Cauchy-converge");
      return total + block * rho / (1.0 - rho);
    }
    prev_block = block;
  }
  return total;
}

}  // namespace sparsedom
