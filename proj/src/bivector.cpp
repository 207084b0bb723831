#include "spheresep/bivector.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace spheresep {

int pair_index(int i, int j, int ambient) {
  if (i < 0 || j <= i || j >= ambient)
    throw DimensionError("pair_index: need 0 <= i < j < " + std::to_string(ambient));
  // Pairs starting with 0..i-1 come first.
  return i * ambient - i * (i + 1) / 2 + (j - i - 1);
}

std::pair<int, int> pair_of(int index, int ambient) {
  if (index < 0 || index >= pair_count(ambient)) throw DimensionError("pair_of: index out of range");
  int i = 0;
  int row = ambient - 1;
  while (index >= row) {
    index -= row;
    ++i;
    --row;
  }
  return {i, i + 1 + index};
}

int sphere_dim_from_pairs(int pairs) {
  for (int n = 1; n * (n + 1) / 2 <= pairs; ++n)
    if (n * (n + 1) / 2 == pairs) return n;
  throw DimensionError("pair count " + std::to_string(pairs) + " is not n(n+1)/2");
}

Bivector::Bivector(int ambient) : ambient_(ambient), comp_(Vector::Zero(pair_count(ambient))) {}

Bivector::Bivector(int ambient, Vector components) : ambient_(ambient), comp_(std::move(components)) {
  if (comp_.size() != pair_count(ambient)) throw DimensionError("Bivector: wrong component count");
}

double Bivector::operator()(int i, int j) const {
  if (i == j) return 0.0;
  if (i < j) return comp_[pair_index(i, j, ambient_)];
  return -comp_[pair_index(j, i, ambient_)];
}

double Bivector::dot(const Bivector& other) const {
  if (other.ambient_ != ambient_) throw DimensionError("Bivector::dot: dimension mismatch");
  return comp_.dot(other.comp_);
}

Bivector wedge(const Vector& x, const Vector& u) {
  if (x.size() != u.size()) throw DimensionError("wedge: dimension mismatch");
  const int d = static_cast<int>(x.size());
  Vector c(pair_count(d));
  int p = 0;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) c[p++] = x[i] * u[j] - x[j] * u[i];
  return Bivector(d, std::move(c));
}

Matrix wedge_columns(const Vector& x, const Matrix& frame) {
  if (frame.rows() != x.size()) throw DimensionError("wedge_columns: dimension mismatch");
  Matrix w(pair_count(static_cast<int>(x.size())), frame.cols());
  for (Eigen::Index a = 0; a < frame.cols(); ++a) w.col(a) = wedge(x, frame.col(a)).components();
  return w;
}

std::vector<Rational> wedge_exact(const std::vector<Rational>& x, const std::vector<Rational>& u) {
  if (x.size() != u.size()) throw DimensionError("wedge_exact: dimension mismatch");
  const std::size_t d = x.size();
  std::vector<Rational> c;
  c.reserve(d * (d - 1) / 2);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) c.push_back(x[i] * u[j] - x[j] * u[i]);
  return c;
}

// ---------------------------------------------------------------------------

BivectorForm::BivectorForm(int n, Matrix b) : n_(n), b_(std::move(b)) {
  if (n < 1) throw DimensionError("BivectorForm: sphere dimension must be >= 1");
  const int big_n = pair_count(n + 1);
  if (b_.rows() != big_n || b_.cols() != big_n)
    throw DimensionError("BivectorForm: expected " + std::to_string(big_n) + "x" + std::to_string(big_n) +
                         " matrix for n=" + std::to_string(n));
  if (!b_.allFinite()) throw std::invalid_argument("BivectorForm: non-finite entry");
  if (b_ != b_.transpose()) throw std::invalid_argument("BivectorForm: matrix is not symmetric");
}

BivectorForm BivectorForm::exact(int n, std::vector<Rational> upper) {
  const int big_n = pair_count(n + 1);
  if (upper.size() != static_cast<std::size_t>(big_n * (big_n + 1) / 2))
    throw DimensionError("BivectorForm::exact: expected N(N+1)/2 = " + std::to_string(big_n * (big_n + 1) / 2) +
                         " entries");
  Matrix b(big_n, big_n);
  std::size_t k = 0;
  for (int p = 0; p < big_n; ++p)
    for (int q = p; q < big_n; ++q) {
      b(p, q) = b(q, p) = upper[k++].get_d();
    }
  BivectorForm f(n, std::move(b));
  f.exact_ = std::move(upper);
  return f;
}

BivectorForm BivectorForm::identity(int n) {
  const int big_n = pair_count(n + 1);
  std::vector<Rational> upper;
  upper.reserve(static_cast<std::size_t>(big_n * (big_n + 1) / 2));
  for (int p = 0; p < big_n; ++p)
    for (int q = p; q < big_n; ++q) upper.emplace_back(p == q ? 1 : 0);
  return exact(n, std::move(upper));
}

BivectorForm BivectorForm::zero(int n) {
  const int big_n = pair_count(n + 1);
  return exact(n, std::vector<Rational>(static_cast<std::size_t>(big_n * (big_n + 1) / 2), Rational(0)));
}

BivectorForm BivectorForm::diagonal(int n, const Vector& diag) {
  const int big_n = pair_count(n + 1);
  if (diag.size() != big_n) throw DimensionError("BivectorForm::diagonal: wrong entry count");
  return BivectorForm(n, Matrix(diag.asDiagonal()));
}

BivectorForm BivectorForm::random(int n, std::uint64_t seed) {
  const int big_n = pair_count(n + 1);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Matrix b(big_n, big_n);
  for (int p = 0; p < big_n; ++p)
    for (int q = p; q < big_n; ++q) b(p, q) = b(q, p) = normal(rng);
  return BivectorForm(n, std::move(b));
}

double BivectorForm::operator()(const Bivector& a, const Bivector& c) const {
  if (a.ambient() != ambient() || c.ambient() != ambient()) throw DimensionError("BivectorForm: dimension mismatch");
  return a.components().dot(b_ * c.components());
}

std::vector<double> BivectorForm::upper() const {
  std::vector<double> out;
  const int big_n = pairs();
  out.reserve(static_cast<std::size_t>(big_n * (big_n + 1) / 2));
  for (int p = 0; p < big_n; ++p)
    for (int q = p; q < big_n; ++q) out.push_back(b_(p, q));
  return out;
}

const std::vector<Rational>& BivectorForm::exact_upper() const {
  if (!exact_) throw std::logic_error("BivectorForm: form is not in exact mode");
  return *exact_;
}

Vector BivectorForm::coordinates() const {
  const int big_n = pairs();
  Vector c(big_n * (big_n + 1) / 2);
  const double s = std::sqrt(2.0);
  int k = 0;
  for (int p = 0; p < big_n; ++p)
    for (int q = p; q < big_n; ++q) c[k++] = (p == q) ? b_(p, q) : s * b_(p, q);
  return c;
}

BivectorForm BivectorForm::from_coordinates(int n, const Vector& coords) {
  const int big_n = pair_count(n + 1);
  if (coords.size() != big_n * (big_n + 1) / 2) throw DimensionError("from_coordinates: wrong coordinate count");
  Matrix b(big_n, big_n);
  const double s = std::sqrt(0.5);
  int k = 0;
  for (int p = 0; p < big_n; ++p)
    for (int q = p; q < big_n; ++q) {
      const double v = (p == q) ? coords[k] : s * coords[k];
      b(p, q) = b(q, p) = v;
      ++k;
    }
  return BivectorForm(n, std::move(b));
}

BivectorForm BivectorForm::operator+(const BivectorForm& rhs) const {
  if (rhs.n_ != n_) throw DimensionError("BivectorForm: dimension mismatch");
  if (is_exact() && rhs.is_exact()) return exact_combination(1, *this, 1, rhs);
  return BivectorForm(n_, b_ + rhs.b_);
}

BivectorForm BivectorForm::operator-(const BivectorForm& rhs) const {
  if (rhs.n_ != n_) throw DimensionError("BivectorForm: dimension mismatch");
  if (is_exact() && rhs.is_exact()) return exact_combination(1, *this, -1, rhs);
  return BivectorForm(n_, b_ - rhs.b_);
}

BivectorForm BivectorForm::scaled(double s) const { return BivectorForm(n_, s * b_); }

BivectorForm BivectorForm::exact_combination(const Rational& a, const BivectorForm& p, const Rational& b,
                                             const BivectorForm& q) {
  if (p.n_ != q.n_) throw DimensionError("exact_combination: dimension mismatch");
  const auto& pu = p.exact_upper();
  const auto& qu = q.exact_upper();
  std::vector<Rational> out(pu.size());
  for (std::size_t i = 0; i < pu.size(); ++i) out[i] = a * pu[i] + b * qu[i];
  return exact(p.n_, std::move(out));
}

// ---------------------------------------------------------------------------

SpherePoint::SpherePoint(Vector x, const Tolerances& tol) : x_(std::move(x)) {
  if (x_.size() < 2) throw DimensionError("SpherePoint: ambient dimension must be >= 2");
  if (!x_.allFinite()) throw std::invalid_argument("SpherePoint: non-finite entry");
  if (std::abs(x_.squaredNorm() - 1.0) > tol.unit)
    throw PreconditionError("SpherePoint: |x|^2 deviates from 1 by " + std::to_string(std::abs(x_.squaredNorm() - 1.0)));
}

PointFrame::PointFrame(SpherePoint x, Matrix frame, const Tolerances& tol)
    : point_(std::move(x)), frame_(std::move(frame)) {
  const int n = point_.n();
  if (frame_.rows() != n + 1 || frame_.cols() != n)
    throw DimensionError("PointFrame: frame must be (n+1) x n");
  const Vector tangency = frame_.transpose() * point_.x();
  if (tangency.size() > 0 && tangency.cwiseAbs().maxCoeff() > tol.unit)
    throw PreconditionError("PointFrame: frame vectors are not tangent");
  const Matrix gram = frame_.transpose() * frame_ - Matrix::Identity(n, n);
  if (gram.size() > 0 && gram.cwiseAbs().maxCoeff() > tol.unit)
    throw PreconditionError("PointFrame: frame is not orthonormal");
}

PointFrame PointFrame::transformed(const Matrix& rotation) const {
  // Orthogonality of `rotation` is the caller's business; the constructor
  // re-validates the resulting frame.
  return PointFrame(SpherePoint(rotation * x(), Tolerances{1e-10}), rotation * frame_, Tolerances{1e-10});
}

namespace {

std::optional<Matrix> gram_schmidt_tangent(const Vector& x, std::mt19937_64& rng) {
  const int d = static_cast<int>(x.size());
  const int n = d - 1;
  std::normal_distribution<double> normal;
  Matrix f(d, n);
  for (int a = 0; a < n; ++a) {
    Vector v(d);
    for (int i = 0; i < d; ++i) v[i] = normal(rng);
    // Two passes of classical Gram-Schmidt against x and previous vectors.
    for (int pass = 0; pass < 2; ++pass) {
      v -= x.dot(v) * x;
      for (int b = 0; b < a; ++b) v -= f.col(b).dot(v) * f.col(b);
    }
    const double len = v.norm();
    if (len < 1e-6) return std::nullopt;
    f.col(a) = v / len;
  }
  return f;
}

}  // namespace

PointFrame orthonormal_frame(const SpherePoint& x, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < 32; ++attempt) {
    if (auto f = gram_schmidt_tangent(x.x(), rng)) return PointFrame(x, std::move(*f));
  }
  throw NumericalError("orthonormal_frame: 32 degenerate draws in a row");
}

PointFrame random_point_frame(int n, std::uint64_t seed) {
  if (n < 1) throw DimensionError("random_point_frame: n must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vector x(n + 1);
  double len = 0.0;
  do {
    for (int i = 0; i <= n; ++i) x[i] = normal(rng);
    len = x.norm();
  } while (len < 1e-6);
  x /= len;
  return orthonormal_frame(SpherePoint(std::move(x)), rng());
}

double Tensor3::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double Tensor3::norm() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------

namespace {

void require_compatible(const BivectorForm& form, const PointFrame& p) {
  if (form.n() != p.n())
    throw DimensionError("form on S^" + std::to_string(form.n()) + " evaluated at a point of S^" +
                         std::to_string(p.n()));
}

}  // namespace

Matrix eval_killing(const BivectorForm& form, const PointFrame& p) {
  require_compatible(form, p);
  const Matrix w = wedge_columns(p.x(), p.frame());
  Matrix k = w.transpose() * form.matrix() * w;
  // Exact symmetry, independent of summation order.
  for (Eigen::Index a = 0; a < k.rows(); ++a)
    for (Eigen::Index b = a + 1; b < k.cols(); ++b) k(b, a) = k(a, b);
  return k;
}

Tensor3 eval_nabla_killing(const BivectorForm& form, const PointFrame& p) {
  require_compatible(form, p);
  const int n = p.n();
  const Matrix& f = p.frame();
  const Matrix bw = form.matrix() * wedge_columns(p.x(), f);  // column b: B (x ^ f_b)
  Tensor3 out(n);
  for (int c = 0; c < n; ++c) {
    const Matrix fw = wedge_columns(f.col(c), f);  // column a: f_c ^ f_a
    const Matrix t = fw.transpose() * bw;          // t(a,b) = B(f_c ^ f_a, x ^ f_b)
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b) out(c, a, b) = out(c, b, a) = t(a, b) + t(b, a);
  }
  return out;
}

Matrix lambda2(const Matrix& r) {
  if (r.rows() != r.cols()) throw DimensionError("lambda2: matrix must be square");
  const int d = static_cast<int>(r.rows());
  const int big_n = pair_count(d);
  Matrix m(big_n, big_n);
  for (int p = 0; p < big_n; ++p) {
    const auto [i, j] = pair_of(p, d);
    for (int q = 0; q < big_n; ++q) {
      const auto [k, l] = pair_of(q, d);
      // (R e_k ^ R e_l)_{ij}
      m(p, q) = r(i, k) * r(j, l) - r(j, k) * r(i, l);
    }
  }
  return m;
}

BivectorForm act_isometry(const BivectorForm& form, const Matrix& r, const Tolerances& tol) {
  if (r.rows() != form.ambient() || r.cols() != form.ambient()) throw DimensionError("act_isometry: dimension mismatch");
  const double defect = (r.transpose() * r - Matrix::Identity(r.rows(), r.cols())).cwiseAbs().maxCoeff();
  if (defect > tol.unit) throw PreconditionError("act_isometry: matrix is not orthogonal (defect " + std::to_string(defect) + ")");
  const Matrix m = lambda2(r);
  Matrix b = m * form.matrix() * m.transpose();
  b = 0.5 * (b + b.transpose()).eval();
  return BivectorForm(form.n(), std::move(b));
}

void require_rational_orthogonal(const RationalMatrix& r) {
  if (r.rows() != r.cols() || !(r.transpose() * r == RationalMatrix::identity(r.rows())))
    throw PreconditionError("rational matrix is not exactly orthogonal");
}

namespace {

RationalMatrix exact_matrix(const BivectorForm& form) {
  const auto& up = form.exact_upper();
  const auto big_n = static_cast<std::size_t>(form.pairs());
  RationalMatrix b(big_n, big_n);
  std::size_t k = 0;
  for (std::size_t p = 0; p < big_n; ++p)
    for (std::size_t q = p; q < big_n; ++q) {
      b(p, q) = up[k];
      b(q, p) = up[k];
      ++k;
    }
  return b;
}

RationalMatrix exact_lambda2(const RationalMatrix& r) {
  const int d = static_cast<int>(r.rows());
  const auto big_n = static_cast<std::size_t>(pair_count(d));
  RationalMatrix m(big_n, big_n);
  for (std::size_t p = 0; p < big_n; ++p) {
    const auto [i, j] = pair_of(static_cast<int>(p), d);
    for (std::size_t q = 0; q < big_n; ++q) {
      const auto [k, l] = pair_of(static_cast<int>(q), d);
      m(p, q) = r(i, k) * r(j, l) - r(j, k) * r(i, l);
    }
  }
  return m;
}

}  // namespace

BivectorForm act_isometry_exact(const BivectorForm& form, const RationalMatrix& r) {
  if (static_cast<int>(r.rows()) != form.ambient()) throw DimensionError("act_isometry_exact: dimension mismatch");
  require_rational_orthogonal(r);
  const RationalMatrix m = exact_lambda2(r);
  const RationalMatrix b = m * exact_matrix(form) * m.transpose();
  std::vector<Rational> up;
  for (std::size_t p = 0; p < b.rows(); ++p)
    for (std::size_t q = p; q < b.cols(); ++q) up.push_back(b(p, q));
  return BivectorForm::exact(form.n(), std::move(up));
}

RationalMatrix eval_killing_exact(const BivectorForm& form, const RationalMatrix& r) {
  if (static_cast<int>(r.rows()) != form.ambient()) throw DimensionError("eval_killing_exact: dimension mismatch");
  require_rational_orthogonal(r);
  const std::size_t d = r.rows();
  const std::size_t n = d - 1;
  auto column = [&](std::size_t c) {
    std::vector<Rational> v(d);
    for (std::size_t i = 0; i < d; ++i) v[i] = r(i, c);
    return v;
  };
  const auto x = column(0);
  const auto big_n = static_cast<std::size_t>(form.pairs());
  RationalMatrix w(big_n, n);
  for (std::size_t a = 0; a < n; ++a) {
    const auto xa = wedge_exact(x, column(a + 1));
    for (std::size_t p = 0; p < big_n; ++p) w(p, a) = xa[p];
  }
  return w.transpose() * exact_matrix(form) * w;
}

}  // namespace spheresep
