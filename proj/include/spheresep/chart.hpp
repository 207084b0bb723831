#pragma once

// Coordinate charts on S^n built from trees: elliptic blocks on the positive
// orthant glued by the block composition
//
//   y o (x_1, ..., x_k) = (y_1 x_1, ..., y_k x_k),
//
// plus the checks that tie a chart back to its Staeckel system.

#include "spheresep/integrability.hpp"
#include "spheresep/rational.hpp"
#include "spheresep/tree.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace spheresep {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
};

/// A smooth map from an open box into S^n with its analytic Jacobian.
class Chart {
public:
  struct Jet {
    Vector x;
    Matrix jacobian;  ///< (n+1) x n
  };

  /// Abstract evaluator behind a chart; implementations are immutable.
  class Node {
  public:
    virtual ~Node() = default;
    virtual int coords() const = 0;
    virtual int ambient() const = 0;
    virtual void eval(const double* u, Vector& x, Matrix* jac) const = 0;
    virtual bool contains(const double* u) const;
    virtual std::string label() const = 0;
    const std::vector<Interval>& domain() const { return domain_; }

  protected:
    std::vector<Interval> domain_;
  };

  explicit Chart(std::shared_ptr<const Node> node);

  /// The one-point chart on S^0, the operad unit.
  static Chart unit();

  int dim() const { return node_->coords(); }
  int ambient() const { return node_->ambient(); }
  const std::vector<Interval>& domain() const { return node_->domain(); }
  std::string label() const { return node_->label(); }

  /// True iff u lies in the open domain (and any inner chart's domain).
  bool contains(std::span<const double> u) const;

  Vector map(std::span<const double> u) const;
  Jet jet(std::span<const double> u) const;

  /// Point whose coordinates sit at the given fractions of each interval.
  std::vector<double> at_fractions(std::span<const double> fractions) const;

  const std::shared_ptr<const Node>& node() const { return node_; }

private:
  std::shared_ptr<const Node> node_;
};

/// Moduli of an elliptic block with k children. For k >= 3 the values are
/// normalized affinely to e[0] = 0, e[k-1] = 1; for k = 2 there are none.
class EllipticParams {
public:
  /// `values` must have k entries (ignored for k = 2 except for the count) and
  /// be strictly increasing with normalized gaps >= gap_min.
  explicit EllipticParams(std::vector<double> values, double gap_min = 1e-6);

  static EllipticParams binary();
  /// Equally spaced i/(k-1).
  static EllipticParams equally_spaced(int k);
  /// Seeded interior values with normalized gaps >= 0.05.
  static EllipticParams random(int k, std::uint64_t seed);

  int arity() const { return arity_; }
  int moduli() const { return arity_ - 2; }
  /// Normalized values; empty for k = 2.
  const std::vector<double>& values() const { return values_; }

  /// The mirror block: e'_i = 1 - e_{k-1-i}.
  EllipticParams reflected() const;

private:
  EllipticParams() = default;
  int arity_ = 2;
  std::vector<double> values_;
};

/// Elliptic coordinates on S^{k-1} for raw parameters e_0 < ... < e_{k-1}:
///   x_i^2 = prod_m (e_i - u_m) / prod_{j != i} (e_i - e_j),  x_i > 0,
/// with u_m in (e_{m-1}, e_m). For k = 2 this is the arc (cos t, sin t),
/// t in (0, pi/2).
Chart elliptic_chart(std::span<const double> e);
Chart elliptic_chart(const EllipticParams& params);

/// The quarter arc (cos t, sin t) on S^1.
Chart arc_chart();

/// Exact x_i^2 for rational e and u (no interlacing check beyond sign).
std::vector<Rational> elliptic_squares_exact(const std::vector<Rational>& e, const std::vector<Rational>& u);

/// Coordinates (u_y, u_1, ..., u_k) -> (y_1 x_1, ..., y_k x_k).
Chart sphere_compose(const Chart& y, std::span<const Chart> xs);

/// x'_{sigma(i)} = x_i.
Chart permute_axes(const Chart& chart, const Permutation& sigma);

/// w -> chart(A w + b) on the box `domain`; points whose image leaves the
/// inner domain are outside the new chart.
Chart linear_reparam(const Chart& chart, Matrix a, Vector b, std::vector<Interval> domain);

/// A tree with elliptic moduli on every internal node and an assignment of
/// leaves to ambient axes (leaf_axes[p] = axis of the p-th leaf, left to right).
class DressedTree {
public:
  DressedTree(RootedPlanarTree tree, std::map<NodePath, EllipticParams> params, std::vector<int> leaf_axes = {});

  static DressedTree with_default_params(const RootedPlanarTree& tree);
  static DressedTree with_random_params(const RootedPlanarTree& tree, std::uint64_t seed);

  const RootedPlanarTree& tree() const { return tree_; }
  const std::map<NodePath, EllipticParams>& params() const { return params_; }
  const Permutation& leaf_axes() const { return leaf_axes_; }
  const EllipticParams& params_at(const NodePath& path) const;

  int sphere_dim() const { return tree_.leaf_count() - 1; }
  int moduli() const { return tree_.moduli_count(); }

  DressedTree with_leaf_axes(std::vector<int> axes) const;

private:
  RootedPlanarTree tree_;
  std::map<NodePath, EllipticParams> params_;
  Permutation leaf_axes_;
};

/// Leaf -> S^0 unit; internal node -> sphere_compose(elliptic block, children);
/// finally leaves are sent to their axes.
Chart chart_from_tree(const DressedTree& tree);

/// Planar leaf positions before -> after reversing the node at `path`.
Permutation planar_reversal(const RootedPlanarTree& tree, const NodePath& path);

/// Reverses the node at `path`, reflects its moduli, re-keys the parameters
/// below it and carries every leaf's axis along, so the chart has the same
/// image and the same coordinate hypersurfaces as the original.
DressedTree dyslectic_mirror(const DressedTree& tree, const NodePath& path);

struct OrthogonalityReport {
  double max_off_diagonal = 0.0;  ///< max |G_ij| / sqrt(G_ii G_jj), i != j
  double min_rank_ratio = 0.0;    ///< smallest / largest singular value of the FD Jacobian
  int points_sampled = 0;
  std::uint64_t seed = 0;
  double threshold = 0.0;
  bool pass = false;
};

/// Pulled-back metric from central differences with step 1e-6 * interval
/// length. Samples whose stencil leaves the domain are redrawn (NumericalError
/// after 64 consecutive failures).
OrthogonalityReport verify_orthogonal(const Chart& chart, int n_points, std::uint64_t seed,
                                      const Tolerances& tol = {});

/// Seeded interior coordinates (fractions in [0.05, 0.95] of each interval),
/// redrawn until the chart contains them.
std::vector<double> sample_interior(const Chart& chart, std::uint64_t seed, double margin = 0.05);

/// Every Killing tensor diagonal in the chart's normalized coordinate frame at
/// the sampled points. Requires verify_orthogonal to pass; the result is
/// checked with verify_stackel.
StackelSystem stackel_of_chart(const DressedTree& tree, int n_points, std::uint64_t seed,
                               const Tolerances& tol = {}, Exec exec = Exec::parallel);
StackelSystem stackel_of_chart(const Chart& chart, int n_points, std::uint64_t seed,
                               const Tolerances& tol = {}, Exec exec = Exec::parallel);

/// Largest |K(t_i, t_j)| over i != j for the normalized coordinate vectors
/// t_i at seeded interior points, over all basis forms.
double max_pullback_off_diagonal(const Chart& chart, const StackelSystem& system, int n_points, std::uint64_t seed);

/// Diagonal form b_(ij) = (e_i + e_j)/2. Validated on construction: the
/// normalized form must satisfy the Nijenhuis conditions, have simple
/// eigenvalues, and its eigenvalues at x(u) must equal
/// (sum e - sum u + u_m)/2. NumericalError if any check fails.
NormalFormDiag elliptic_form(std::span<const double> e);

struct Polyline {
  int family = 0;  ///< index of the coordinate that varies along the curve
  std::vector<Eigen::Vector3d> points;
};

struct PolylineSet {
  std::vector<Polyline> curves;
  /// Header "curve_id,t_index,x0,x1,x2", one row per vertex, %.17g.
  std::string to_csv() const;
};

/// For each coordinate, `lines_per_family` curves along which it varies over
/// its closed interval while the other coordinate is fixed at interior
/// fractions (j+1)/(lines+1). With full_sphere, every curve is repeated under
/// the eight sign changes of the axes. Requires a chart on S^2.
PolylineSet emit_gridlines(const Chart& chart, int resolution, int lines_per_family = 8, bool full_sphere = true);

}  // namespace spheresep
