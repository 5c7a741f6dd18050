#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sparsedom/operators.hpp"
#include "sparsedom/sparse.hpp"

namespace sparsedom {

/// A_p weight data: w > 0 cell-wise with the derived dual densities
/// sigma = w^(-1/(p-1)) and nu = w^(-r/(p-r)), 1 <= r < p.
struct WeightProfile {
  GridFunction w;
  GridFunction sigma;
  GridFunction nu;
  double p = 2.0;
  double r = 1.0;

  static WeightProfile make(GridFunction w, double p, double r);
};

/// Power weight |x - center|^alpha sampled at cell centers; center is a
/// lattice point given in units of the window level.
GridFunction power_weight(const Window& window, double alpha,
                          std::int64_t center_units);

/// sup over the cube family of avg(w, Q) * avg(w^(-1/(p-1)), Q)^(p-1).
/// Family cubes are the shifted-grid (or exhaustive) cubes inside the window.
double ap_characteristic(const GridFunction& w, double p,
                         CubeFamily family = CubeFamily::kShiftedDyadic);

/// avg(w, Q) * avg(dual, Q)^expo with zero extension outside the window.
double ap_form(const GridFunction& w, const GridFunction& dual, double expo,
               const Cube& q);

/// The per-cube testing quantity
///   T_{p,r}(w; Q) = [w(3Q) / w(E_Q)^(1/p')] [nu(3Q)^(1/r) / nu(E_Q)^(1/p)]
///                   / |Q|^(1/r).
double testing_quantity(const WeightProfile& wp, const Cube& q,
                        const LatticeSet& witness);

struct WeightedNormEstimate {
  double value = 0.0;
  std::string best_trial;
};

/// Lower bound for the L^p(w) operator norm of A_{r,S} by ratio maximization
/// over a deterministic trial set plus seeded random perturbations, all
/// concentrated near the weight's minimum.
WeightedNormEstimate sparse_weighted_norm(const SparseFamily& s,
                                          const WeightProfile& wp, int trials,
                                          std::uint64_t seed);

/// B(f, g) / (|f|_{L^p(w)} |g|_{L^p'}(sigma)) with
/// B(f, g) = sum_Q (avg_Q f^r)^(1/r) int_Q g: the bilinear route to the same
/// operator norm, used as a cross-check of the primal ratio.
double sparse_bilinear_ratio(const SparseFamily& s, const WeightProfile& wp,
                             const GridFunction& f, const GridFunction& g);

/// Per-cube replay of the appendix inequality chain.  The centered weighted
/// maximal step of the written argument is classical and outside numeric
/// scope; everything after it is checked cube by cube.
struct AppendixDiagnostic {
  struct PerCube {
    double t_quantity = 0.0;
    double holder_lhs = 0.0, holder_rhs = 0.0;  // |E|^(p/r) vs w(E) nu(E)^(p/r-1)
    double chain_lhs = 0.0, chain_rhs = 0.0;    // X Y^(p/r-1) vs (3^n/eta)^(p/r) [w]
    double ratio = 0.0;                         // T / (c [w]^max(1, 1/(p-r)))
    bool ok = true;
  };
  std::vector<PerCube> cubes;
  double ap_char = 1.0;    // [w]_{A_{p/r}} over the family + tripled cubes
  double constant = 0.0;   // c_{n,p,r,eta} assembled from the chain
  double exponent = 1.0;   // max(1, 1/(p-r))
  double max_ratio = 0.0;
  bool ok = true;
  std::string scope_note;
};
AppendixDiagnostic appendix_diagnostic(const SparseFamily& s,
                                       const WeightProfile& wp);

}  // namespace sparsedom
