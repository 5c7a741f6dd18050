#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>

#include "sparsedom/lattice.hpp"

namespace sparsedom {

/// Piecewise-constant function on the cells of a window.  Cell values use
/// cell-center semantics; the function is identically zero outside the
/// window, so integrals over cubes that stick out are still well defined.
class GridFunction {
 public:
  GridFunction(const Window& window, Eigen::ArrayXd values);
  static GridFunction zero(const Window& window);
  static GridFunction constant(const Window& window, double c);

  const Window& window() const { return window_; }
  const Eigen::ArrayXd& values() const { return values_; }
  Eigen::ArrayXd& values() { return values_; }
  double operator[](std::int64_t idx) const { return values_[idx]; }
  double& operator[](std::int64_t idx) { return values_[idx]; }
  std::int64_t size() const { return values_.size(); }

  GridFunction abs() const { return GridFunction(window_, values_.abs()); }
  double min_value() const { return values_.size() ? values_.minCoeff() : 0.0; }
  double max_abs() const { return values_.size() ? values_.abs().maxCoeff() : 0.0; }

 private:
  Window window_;
  Eigen::ArrayXd values_;
};

/// (1/|Q|) int_Q f, as the exact finite sum over cells; Q must be
/// lattice-aligned (MisalignmentError otherwise).  Cells outside the window
/// count as zero while |Q| is the full cube measure.
double average(const GridFunction& f, const Cube& q);

/// ((1/|Q|) int_Q f^r)^(1/r) for f >= 0 on Q (NegativityError otherwise).
double r_average(const GridFunction& f, const Cube& q, double r);

/// int_Q f for an arbitrary cube: boundary cells contribute their exact
/// fractional overlap (rational with denominator 2^level * 3^thirds).
double integral_over(const GridFunction& f, const Cube& q);
/// r-average against exact overlap weights; reduces to r_average on aligned cubes.
double r_average_general(const GridFunction& f, const Cube& q, double r);

enum class TruncateMode { kKeep, kDrop };

/// f * indicator of the union of S (kKeep) or of its complement (kDrop).
GridFunction truncate(const GridFunction& f, std::span<const Cube> s,
                      TruncateMode mode);

/// (int |f|^p w)^(1/p); w defaults to 1 and must be cell-wise positive.
double lp_norm(const GridFunction& f, double p,
               const GridFunction* w = nullptr);

/// max over cells of Q (clipped to the window) of |f|; 0 on an empty clip.
double sup_abs_on(const GridFunction& f, const Window::Span& s);

/// Text round-trip: self-describing header (window, resolution) + values.
void save_text(const GridFunction& f, std::ostream& os);
GridFunction load_text(std::istream& is);
/// CSV round-trip: columns cell_index,value; the window is supplied by the caller.
void save_csv(const GridFunction& f, std::ostream& os);
GridFunction load_csv(const Window& window, std::istream& is);

}  // namespace sparsedom
