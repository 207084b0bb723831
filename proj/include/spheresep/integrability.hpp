#pragma once

// Pointwise integrability checks for Killing tensors on S^n and extraction of
// Staeckel systems as a linear nullspace problem.
//
// All residuals are Frobenius norms of the relevant tensor in an orthonormal
// frame, so they do not depend on which orthonormal frame is used at x.

#include "spheresep/bivector.hpp"
#include "spheresep/permutation.hpp"
#include "spheresep/sampling.hpp"
#include "spheresep/tolerances.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace spheresep {

/// Norm of the full symmetrization of (nabla K)_{c,ab}.
double killing_residual(const BivectorForm& form, const PointFrame& p);

/// Same, with a caller-supplied derivative (used with finite-difference oracles).
double killing_residual(const Tensor3& nabla_k);

/// Norms of the three Nijenhuis integrability tensors
///   K_{d[a} nabla_b K_{c]d}
///   K_de K_e[a nabla_b K_c]d + K_d[a K_eb nabla_d K_c]e
///   (K^2)_d[a nabla_b K_c]d + K_d[a (K^2)_eb nabla_d K_c]e
/// each antisymmetrized over (a, b, c), in an orthonormal frame.
std::array<double, 3> nijenhuis_residual(const BivectorForm& form, const PointFrame& p);
std::array<double, 3> nijenhuis_residual(const Matrix& k, const Tensor3& nabla_k);

/// Norm of K1 K2 - K2 K1 at p.
double commutation_residual(const BivectorForm& first, const BivectorForm& second, const PointFrame& p);

/// True iff all eigenvalues of K at p are pairwise separated by more than gap.
/// Throws NumericalError if the eigensolver fails.
bool eigen_simplicity(const BivectorForm& form, const PointFrame& p, double gap);

/// Ascending eigenvalues of K at p.
Vector killing_eigenvalues(const BivectorForm& form, const PointFrame& p);

// ---------------------------------------------------------------------------
// The space of Killing tensors as a quotient of S^2 so(n+1).

/// Forms B with B(x^u, x^v) = 0 identically: the image of Lambda^4 R^{n+1},
/// one form per 4-subset i<j<k<l, given as Frobenius coordinates. Empty for n < 3.
Matrix plucker_kernel(int n);

/// Orthonormal basis (Frobenius coordinates, columns) of the orthogonal
/// complement of plucker_kernel(n). Its span maps isomorphically onto K(S^n).
Matrix killing_quotient_basis(int n);

/// n(n+1)^2(n+2)/12, the dimension of the space of Killing tensors on S^n.
long long killing_space_dimension(int n);

// ---------------------------------------------------------------------------

/// Nullspace with its audit trail.
struct NullspaceResult {
  Matrix basis;                        ///< orthonormal columns
  std::vector<double> singular_values; ///< descending
  int nullity = 0;
  double gap_ratio = 0.0;              ///< smallest kept / largest discarded singular value
};

/// Nullspace of `rows` by SVD: singular values below tol_rank * sigma_max.
NullspaceResult nullspace(const Matrix& rows, double tol_rank);

/// Principal angles between two column spaces (radians, descending).
std::vector<double> principal_angles(const Matrix& a, const Matrix& b);

/// Tangent directions whose pairwise products must vanish at one point.
struct DiagonalConstraint {
  Vector x;
  Matrix directions;  ///< (n+1) x n, tangent at x
};

/// Forms B (within killing_quotient_basis) with B(x^d_a, x^d_b) = 0 for all
/// a != b at every constraint site. Columns of `basis` are Frobenius
/// coordinates of the solutions.
NullspaceResult diagonal_forms(int n, std::span<const DiagonalConstraint> sites, double tol_rank,
                               Exec exec = Exec::parallel);

/// An n-dimensional space of Killing tensors containing the metric.
class StackelSystem {
public:
  /// Checks independence (smallest singular value > tol.rank) and that the
  /// identity form is in the span within tol.identity_span.
  StackelSystem(int n, std::vector<BivectorForm> basis, const Tolerances& tol = {});

  /// No checks beyond matching dimensions; for assembling test candidates.
  static StackelSystem unchecked(int n, std::vector<BivectorForm> basis);

  int n() const { return n_; }
  const std::vector<BivectorForm>& basis() const { return basis_; }
  bool contains_metric() const { return contains_metric_; }
  /// Distance of the normalized identity form from the span.
  double metric_distance() const { return metric_distance_; }

  /// Columns: Frobenius coordinates of the basis.
  Matrix coordinate_matrix() const;

  /// Extraction audit data (empty when built directly).
  std::vector<double> singular_values;
  double gap_ratio = 0.0;
  int raw_nullity = 0;

private:
  StackelSystem() = default;
  int n_ = 0;
  std::vector<BivectorForm> basis_;
  bool contains_metric_ = false;
  double metric_distance_ = 0.0;
};

/// Default sample count 3 * N(N+1)/2 with N = n(n+1)/2.
int default_sample_count(int n);

/// The unique Staeckel system containing `form`: every Killing tensor that is
/// diagonal in the eigenframe of K at all sampled points. PreconditionError if
/// the form has a repeated eigenvalue or fails the Nijenhuis conditions at a
/// sample; RankError if the nullspace is not n-dimensional.
StackelSystem stackel_from_killing(const BivectorForm& form, int n_points, std::uint64_t seed,
                                   const Tolerances& tol = {}, Exec exec = Exec::parallel);

struct ResidualReport {
  double killing_max = 0.0;
  std::array<double, 3> nijenhuis_max{0.0, 0.0, 0.0};
  double commutation_max = 0.0;
  int points_sampled = 0;
  std::uint64_t seed = 0;
  bool eigen_simple = true;  ///< meaningful for single-form reports
  bool dimension_ok = true;  ///< basis size equals n (Staeckel reports)
  double threshold = 0.0;
  bool pass = false;

  double max_residual() const;
};

/// Samples n_points frames; maximal commutation residual over basis pairs,
/// Nijenhuis residuals of every basis element with simple spectrum at the
/// point plus one generic combination, and Killing residuals. PASS iff the
/// basis has n elements and all maxima are below tol.commute.
ResidualReport verify_stackel(const StackelSystem& system, int n_points, std::uint64_t seed,
                              const Tolerances& tol = {}, Exec exec = Exec::parallel);

/// Killing, Nijenhuis and eigen-simplicity sweep of a single form. PASS iff
/// Killing and Nijenhuis maxima are below tol.commute.
ResidualReport verify_form(const BivectorForm& form, int n_points, std::uint64_t seed,
                           const Tolerances& tol = {}, Exec exec = Exec::parallel);

// ---------------------------------------------------------------------------
// Normal form and the permutation action.

/// Diagonal form in the basis (e_i ^ e_j)^2; entries in flat pair order.
class NormalFormDiag {
public:
  NormalFormDiag(int n, Vector diag);
  int n() const { return n_; }
  const Vector& diag() const { return diag_; }
  double entry(int i, int j) const;
  BivectorForm form() const { return BivectorForm::diagonal(n_, diag_); }

private:
  int n_;
  Vector diag_;
};

/// Entry at pair (i,j) moves to the sorted pair (sigma(i), sigma(j)).
NormalFormDiag act_permutation(const NormalFormDiag& d, const Permutation& sigma);

/// Same action on an arbitrary form, via the permutation matrix.
BivectorForm act_permutation(const BivectorForm& form, const Permutation& sigma);

StackelSystem act_permutation(const StackelSystem& system, const Permutation& sigma, const Tolerances& tol = {});

}  // namespace spheresep
