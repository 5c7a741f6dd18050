#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sparsedom/operators.hpp"
#include "sparsedom/sparse.hpp"

namespace sparsedom {

/// Cells of Q0 on which |f| or the local grand maximal operator exceed their
/// adaptive quantile cuts.  The cuts are the smallest value cuts that keep
/// each part within half of the 2^-(dim+2) |Q0| budget, so the measure bound
/// holds by construction.
struct ExceptionalSet {
  LatticeSet cells;
  double threshold_f = 0.0;   // absolute cut on |f|
  double threshold_mt = 0.0;  // absolute cut on the local grand maximal
};

ExceptionalSet build_exceptional_set(const KernelTable& t,
                                     const GridFunction& f, const Cube& q0,
                                     double r = 1.0);

/// Stopping-time decomposition: the maximal cubes P of the halving tower of
/// q0 with |P intersect E| > lambda |P|.  Requires |E| <= lambda |Q0|
/// (PreconditionError otherwise).  In the discrete model the selection
/// normally exhausts E; `uncovered` is nonempty only when the tower bottoms
/// out on odd-side cubes before the stopping rule fires.
struct CzResult {
  std::vector<Cube> selected;
  LatticeSet uncovered;
  bool floor = false;
};
CzResult cz_decompose(const Window& w, const LatticeSet& e, const Cube& q0,
                      const Ratio& lambda);
Ratio default_cz_height(int dim);  // 2^-(dim+1)

/// One recursion node of the domination run.  threshold is the measured
/// bound max(boundary_max, residual_max); dividing by avg_ref gives the
/// node's c*, and the run constant C_emp is the maximum over nodes.
struct CertificateNode {
  Cube cube;
  int depth = 0;
  double avg_ref = 0.0;      // r-average of |f| over 3Q (zero-extended)
  double threshold_f = 0.0;  // quantile cut on |f|
  double threshold_mt = 0.0; // quantile cut on the local grand maximal
  double boundary_max = 0.0; // max_j sup_{xi in P_j} |T(f chi_{3Q \ 3P_j})(xi)|
  double residual_max = 0.0; // sup over unselected cells of |T(f chi_{3Q})|
  double threshold = 0.0;    // max of the two measured quantities
  bool resolution_floor = false;  // subdivision stopped by the depth cap
  bool cz_floor = false;          // exceptional cells left uncovered
  std::vector<Cube> selected;          // the P_j, in tower order
  std::vector<std::size_t> children;   // node indices, parallel to selected

  double c_star() const { return avg_ref > 0.0 ? threshold / avg_ref : 0.0; }
};

struct DominationCertificate {
  std::string kernel_name;
  double r = 1.0;
  Window window;
  OperatorConstants constants;
  std::vector<CertificateNode> nodes;
  std::vector<std::size_t> roots;  // one tree per partition cube

  double c_emp() const;
  int max_depth() const;
};

struct LocalDomination {
  SparseFamily family;  // 1/2-sparse subset of the halving tower of q0
  DominationCertificate certificate;
};

/// Recursive domination of T(f chi_{3Q0}) on Q0.  The returned certificate
/// grants, node by node, the inequalities that telescope into
///   |T(f chi_{3Q0})(x)| <= C_emp * sum_{Q in family} avg_ref(Q) chi_Q(x).
LocalDomination local_dominate(const KernelTable& t, const GridFunction& f,
                               const Cube& q0, double r = 1.0,
                               int max_depth = 64);

struct GlobalDomination {
  SparseFamily family;        // tripled cubes, 1/(2*3^dim)-sparse
  SparseFamily pre_dilation;  // union of the local families, 1/2-sparse
  DominationCertificate certificate;
  double c_emp = 0.0;
};

/// Runs local_dominate over every cube of cover_partition(q0, rings) and
/// assembles the tripled family dominating |Tf| on the whole window
/// 3^rings * Q0.  Requires supp f inside q0 and the window to cover the
/// partition.
GlobalDomination global_dominate(const KernelTable& t, const GridFunction& f,
                                 const Cube& q0, int rings, double r = 1.0,
                                 int max_depth = 64);

struct ReplayViolation {
  std::size_t node = 0;
  std::string what;
  double lhs = 0.0, rhs = 0.0;
};
struct ReplayReport {
  bool ok = true;
  std::size_t nodes_checked = 0;
  std::vector<ReplayViolation> violations;
};

/// Independently recomputes every node's exceptional set, selection,
/// boundary and residual values against the stored thresholds.  Reports;
/// never throws on a failed check.
ReplayReport replay_certificate(const DominationCertificate& cert,
                                const KernelTable& t, const GridFunction& f);

void save_certificate(const DominationCertificate& cert, std::ostream& os);
DominationCertificate load_certificate(std::istream& is);

}  // namespace sparsedom
