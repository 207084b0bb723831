#pragma once

// Bivectors on R^{n+1}, symmetric forms on so(n+1) = Lambda^2 R^{n+1}, and the
// Killing tensor field such a form induces on the unit sphere S^n:
//
//   K_x(u, v) = B(x ^ u, x ^ v)          for tangent u, v at x.
//
// Pairs (i, j), i < j, are flattened lexicographically:
//   (0,1), (0,2), ..., (0,n), (1,2), ..., (n-1,n).

#include "spheresep/errors.hpp"
#include "spheresep/rational.hpp"
#include "spheresep/tolerances.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace spheresep {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Number of pairs i < j among `ambient` indices.
constexpr int pair_count(int ambient) { return ambient * (ambient - 1) / 2; }

/// Flat index of (i, j), i < j, among `ambient` indices.
int pair_index(int i, int j, int ambient);

/// Inverse of pair_index.
std::pair<int, int> pair_of(int index, int ambient);

/// Sphere dimension n recovered from the pair count N = n(n+1)/2.
/// Throws DimensionError if N is not triangular.
int sphere_dim_from_pairs(int pairs);

class Bivector {
public:
  explicit Bivector(int ambient);
  Bivector(int ambient, Vector components);

  int ambient() const { return ambient_; }
  const Vector& components() const { return comp_; }
  double operator()(int i, int j) const;

  /// Euclidean on components, i.e. <a^b, c^d> = <a,c><b,d> - <a,d><b,c>.
  double dot(const Bivector& other) const;

private:
  int ambient_;
  Vector comp_;
};

/// Component (i,j) is x_i u_j - x_j u_i.
Bivector wedge(const Vector& x, const Vector& u);

/// Columns of the result are wedge(x, frame.col(a)).
Matrix wedge_columns(const Vector& x, const Matrix& frame);

/// Rational counterpart of wedge, component vector in flat pair order.
std::vector<Rational> wedge_exact(const std::vector<Rational>& x, const std::vector<Rational>& u);

/// Symmetric bilinear form on so(n+1). Always carries a floating matrix; in
/// exact mode it also carries the rational upper triangle it was built from.
class BivectorForm {
public:
  /// Symmetrizes nothing: throws if `b` is not exactly symmetric.
  BivectorForm(int n, Matrix b);

  /// Exact form from its upper triangle in row-major order (N(N+1)/2 values).
  static BivectorForm exact(int n, std::vector<Rational> upper);

  static BivectorForm identity(int n);
  static BivectorForm zero(int n);
  static BivectorForm diagonal(int n, const Vector& diag);

  /// Symmetric Gaussian form with the given seed.
  static BivectorForm random(int n, std::uint64_t seed);

  int n() const { return n_; }
  int ambient() const { return n_ + 1; }
  int pairs() const { return static_cast<int>(b_.rows()); }
  bool is_exact() const { return exact_.has_value(); }

  const Matrix& matrix() const { return b_; }
  double operator()(const Bivector& a, const Bivector& c) const;

  /// Upper triangle, row-major, as doubles.
  std::vector<double> upper() const;
  /// Upper triangle as rationals; throws std::logic_error in float mode.
  const std::vector<Rational>& exact_upper() const;

  /// Coordinates with respect to a Frobenius-orthonormal basis of symmetric
  /// matrices: diagonal entries as is, off-diagonal entries scaled by sqrt(2).
  Vector coordinates() const;
  static BivectorForm from_coordinates(int n, const Vector& coords);

  double frobenius_norm() const { return b_.norm(); }

  BivectorForm operator+(const BivectorForm& rhs) const;
  BivectorForm operator-(const BivectorForm& rhs) const;
  BivectorForm scaled(double s) const;
  /// Exact linear combination; both operands must be exact.
  static BivectorForm exact_combination(const Rational& a, const BivectorForm& p,
                                        const Rational& b, const BivectorForm& q);

private:
  int n_;
  Matrix b_;
  std::optional<std::vector<Rational>> exact_;
};

/// Unit point on S^n. Construction checks |x|^2 = 1 within tol.unit.
class SpherePoint {
public:
  explicit SpherePoint(Vector x, const Tolerances& tol = {});
  const Vector& x() const { return x_; }
  int n() const { return static_cast<int>(x_.size()) - 1; }

private:
  Vector x_;
};

/// A point of S^n together with an orthonormal basis of its tangent space,
/// stored as the n columns of an (n+1) x n matrix.
class PointFrame {
public:
  PointFrame(SpherePoint x, Matrix frame, const Tolerances& tol = {});

  const Vector& x() const { return point_.x(); }
  const Matrix& frame() const { return frame_; }
  int n() const { return point_.n(); }

  /// Rigid motion of the evaluation site: (Rx, R f_1, ..., R f_n).
  PointFrame transformed(const Matrix& rotation) const;

private:
  SpherePoint point_;
  Matrix frame_;
};

/// Frame from seeded Gaussian draws projected to T_x S^n and Gram-Schmidt
/// orthonormalized. Degenerate draws are redrawn; NumericalError after 32.
PointFrame orthonormal_frame(const SpherePoint& x, std::uint64_t seed);

/// Uniformly distributed point with a seeded frame.
PointFrame random_point_frame(int n, std::uint64_t seed);

/// 3-index tensor on the tangent space, (c, a, b) storage.
class Tensor3 {
public:
  explicit Tensor3(int n) : n_(n), data_(static_cast<std::size_t>(n * n * n), 0.0) {}
  int n() const { return n_; }
  double& operator()(int c, int a, int b) { return data_[idx(c, a, b)]; }
  double operator()(int c, int a, int b) const { return data_[idx(c, a, b)]; }
  double max_abs() const;
  double norm() const;

private:
  std::size_t idx(int c, int a, int b) const {
    return (static_cast<std::size_t>(c) * n_ + a) * n_ + b;
  }
  int n_;
  std::vector<double> data_;
};

/// K_ab = B(x ^ f_a, x ^ f_b).
Matrix eval_killing(const BivectorForm& form, const PointFrame& p);

/// (nabla K)_{c,ab} = B(f_c ^ f_a, x ^ f_b) + B(x ^ f_a, f_c ^ f_b).
///
/// Tangent vectors are extended off x by u(y) = u - <u,y> y, which is parallel
/// at x for the round metric, so the derivative reduces to differentiating
/// the two wedge slots.
Tensor3 eval_nabla_killing(const BivectorForm& form, const PointFrame& p);

/// Lambda^2 R: the induced action of a linear map on bivectors.
Matrix lambda2(const Matrix& r);

/// B'(a^b, c^d) = B(R^{-1}a ^ R^{-1}b, R^{-1}c ^ R^{-1}d). R must be
/// orthogonal within tol.unit (PreconditionError otherwise).
BivectorForm act_isometry(const BivectorForm& form, const Matrix& r, const Tolerances& tol = {});

/// Exact variant for rational orthogonal R; requires an exact form.
BivectorForm act_isometry_exact(const BivectorForm& form, const RationalMatrix& r);

/// Exact K at the frame given by the columns of a rational orthogonal matrix:
/// x = R e_0 and f_a = R e_a.
RationalMatrix eval_killing_exact(const BivectorForm& form, const RationalMatrix& r);

/// Orthogonal matrix as a rational PointFrame source: throws unless R^T R = I.
void require_rational_orthogonal(const RationalMatrix& r);

}  // namespace spheresep
