#include "spheresep/integrability.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

namespace spheresep {

namespace {

constexpr std::array<std::array<int, 3>, 6> kPerms{{{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {0, 2, 1}, {2, 1, 0}, {1, 0, 2}}};
constexpr std::array<int, 6> kSigns{1, 1, 1, -1, -1, -1};

// Norm of the (anti)symmetrization over all three slots of t(i0, i1, i2).
template <class F>
double symmetrized_norm(int n, F&& t, bool antisymmetric) {
  double sum = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        const std::array<int, 3> idx{a, b, c};
        double v = 0.0;
        for (std::size_t s = 0; s < kPerms.size(); ++s) {
          const double term = t(idx[kPerms[s][0]], idx[kPerms[s][1]], idx[kPerms[s][2]]);
          v += antisymmetric ? kSigns[s] * term : term;
        }
        v /= 6.0;
        sum += v * v;
      }
  return std::sqrt(sum);
}

}  // namespace

double killing_residual(const Tensor3& nabla_k) {
  return symmetrized_norm(nabla_k.n(), [&](int c, int a, int b) { return nabla_k(c, a, b); }, false);
}

double killing_residual(const BivectorForm& form, const PointFrame& p) {
  return killing_residual(eval_nabla_killing(form, p));
}

std::array<double, 3> nijenhuis_residual(const Matrix& k, const Tensor3& d) {
  const int n = d.n();
  if (k.rows() != n || k.cols() != n) throw DimensionError("nijenhuis_residual: shape mismatch");
  std::array<double, 3> out{0.0, 0.0, 0.0};
  if (n < 3) return out;  // antisymmetrization over three indices of a 2-frame

  const Matrix k2 = k * k;
  const Matrix k3 = k2 * k;
  const std::array<const Matrix*, 3> first{&k, &k2, &k3};
  const std::array<const Matrix*, 3> second{nullptr, &k, &k2};

  for (int cond = 0; cond < 3; ++cond) {
    const Matrix& p1 = *first[cond];
    // T(a,b,c) = sum_d P1_da D(b,c,d) + sum_d K_da sum_f D(d,c,f) P2_fb
    Tensor3 t(n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) {
          double v = 0.0;
          for (int dd = 0; dd < n; ++dd) v += p1(dd, a) * d(b, c, dd);
          if (second[cond] != nullptr) {
            const Matrix& p2 = *second[cond];
            for (int dd = 0; dd < n; ++dd) {
              double inner = 0.0;
              for (int f = 0; f < n; ++f) inner += d(dd, c, f) * p2(f, b);
              v += k(dd, a) * inner;
            }
          }
          t(a, b, c) = v;
        }
    out[static_cast<std::size_t>(cond)] = symmetrized_norm(n, [&](int a, int b, int c) { return t(a, b, c); }, true);
  }
  return out;
}

std::array<double, 3> nijenhuis_residual(const BivectorForm& form, const PointFrame& p) {
  return nijenhuis_residual(eval_killing(form, p), eval_nabla_killing(form, p));
}

double commutation_residual(const BivectorForm& first, const BivectorForm& second, const PointFrame& p) {
  if (first.n() != second.n()) throw DimensionError("commutation_residual: dimension mismatch");
  const Matrix k1 = eval_killing(first, p);
  const Matrix k2 = eval_killing(second, p);
  return (k1 * k2 - k2 * k1).norm();
}

Vector killing_eigenvalues(const BivectorForm& form, const PointFrame& p) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(eval_killing(form, p), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("killing_eigenvalues: eigensolver failed");
  return solver.eigenvalues();
}

bool eigen_simplicity(const BivectorForm& form, const PointFrame& p, double gap) {
  if (!(gap > 0.0)) throw std::invalid_argument("eigen_simplicity: gap must be positive");
  const Vector ev = killing_eigenvalues(form, p);
  if (ev.size() < 2) return true;
  for (Eigen::Index i = 1; i < ev.size(); ++i)
    if (!(ev[i] - ev[i - 1] > gap)) return false;
  return true;
}

// ---------------------------------------------------------------------------

long long killing_space_dimension(int n) {
  const long long m = n;
  return m * (m + 1) * (m + 1) * (m + 2) / 12;
}

Matrix plucker_kernel(int n) {
  const int d = n + 1;
  const int big_n = pair_count(d);
  const int dim = big_n * (big_n + 1) / 2;
  std::vector<Vector> cols;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      for (int k = j + 1; k < d; ++k)
        for (int l = k + 1; l < d; ++l) {
          Matrix b = Matrix::Zero(big_n, big_n);
          auto put = [&](int p1, int p2, int q1, int q2, double s) {
            const int p = pair_index(p1, p2, d);
            const int q = pair_index(q1, q2, d);
            b(p, q) = b(q, p) = s;
          };
          // Lambda^4 coefficient of alpha ^ beta, symmetrized.
          put(i, j, k, l, 1.0);
          put(i, k, j, l, -1.0);
          put(i, l, j, k, 1.0);
          Vector c = BivectorForm(n, b).coordinates();
          cols.push_back(c.normalized());
        }
  Matrix out(dim, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) out.col(static_cast<Eigen::Index>(c)) = cols[c];
  return out;
}

Matrix killing_quotient_basis(int n) {
  const Matrix kernel = plucker_kernel(n);
  const Eigen::Index dim = kernel.rows();
  if (kernel.cols() == 0) return Matrix::Identity(dim, dim);
  Eigen::HouseholderQR<Matrix> qr(kernel);
  const Matrix q = qr.householderQ() * Matrix::Identity(dim, dim);
  return q.rightCols(dim - kernel.cols());
}

// ---------------------------------------------------------------------------

NullspaceResult nullspace(const Matrix& rows, double tol_rank) {
  const Eigen::Index cols = rows.cols();
  Matrix a = rows;
  if (a.rows() < cols) {
    a.conservativeResize(cols, Eigen::NoChange);
    a.bottomRows(cols - rows.rows()).setZero();
  }
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinV);
  const Vector s = svd.singularValues();
  NullspaceResult out;
  out.singular_values.assign(s.data(), s.data() + s.size());
  const double smax = s.size() > 0 ? s[0] : 0.0;
  Eigen::Index kept = 0;
  while (kept < s.size() && smax > 0.0 && s[kept] >= tol_rank * smax) ++kept;
  out.nullity = static_cast<int>(cols - kept);
  out.basis = svd.matrixV().rightCols(out.nullity);
  if (out.nullity == 0) {
    out.gap_ratio = 0.0;
  } else if (kept == 0) {
    out.gap_ratio = std::numeric_limits<double>::infinity();
  } else {
    const double discarded = s[kept];
    out.gap_ratio = discarded > 0.0 ? s[kept - 1] / discarded : std::numeric_limits<double>::infinity();
  }
  return out;
}

std::vector<double> principal_angles(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw DimensionError("principal_angles: ambient dimension mismatch");
  const Matrix& big = a.cols() >= b.cols() ? a : b;
  const Matrix& small = a.cols() >= b.cols() ? b : a;
  const Eigen::Index p = big.cols();
  const Eigen::Index q = small.cols();
  const Matrix qa = Eigen::HouseholderQR<Matrix>(big).householderQ() * Matrix::Identity(big.rows(), p);
  const Matrix qb = Eigen::HouseholderQR<Matrix>(small).householderQ() * Matrix::Identity(small.rows(), q);
  const Matrix m = qa.transpose() * qb;
  const Matrix r = qb - qa * m;
  Vector cosines = Eigen::JacobiSVD<Matrix>(m).singularValues();     // descending
  Vector sines = Eigen::JacobiSVD<Matrix>(r).singularValues();       // descending
  std::vector<double> angles;
  for (Eigen::Index i = 0; i < q; ++i) {
    // Largest cosine pairs with smallest sine.
    const double c = std::min(1.0, cosines[i]);
    const double s = std::min(1.0, sines[q - 1 - i]);
    angles.push_back(std::atan2(s, c));
  }
  for (Eigen::Index i = q; i < p; ++i) angles.push_back(std::numbers::pi / 2);
  std::sort(angles.begin(), angles.end(), std::greater<>());
  return angles;
}

NullspaceResult diagonal_forms(int n, std::span<const DiagonalConstraint> sites, double tol_rank, Exec exec) {
  const Matrix quotient = killing_quotient_basis(n);
  const int d = n + 1;
  const int big_n = pair_count(d);
  const Eigen::Index per_site = n * (n - 1) / 2;
  const double inv_sqrt2 = std::sqrt(0.5);

  Matrix rows = stack_blocks(
      sites.size(), per_site, quotient.cols(),
      [&](std::size_t s, Eigen::Ref<Matrix> block) {
        const auto& site = sites[s];
        if (site.x.size() != d || site.directions.rows() != d || site.directions.cols() != n)
          throw DimensionError("diagonal_forms: constraint site has the wrong shape");
        const Matrix w = wedge_columns(site.x, site.directions);
        Vector coeff(quotient.rows());
        Eigen::Index r = 0;
        for (int a = 0; a < n; ++a)
          for (int b = a + 1; b < n; ++b) {
            const auto alpha = w.col(a);
            const auto beta = w.col(b);
            Eigen::Index k = 0;
            for (int p = 0; p < big_n; ++p)
              for (int q = p; q < big_n; ++q)
                coeff[k++] = (p == q) ? alpha[p] * beta[p] : (alpha[p] * beta[q] + alpha[q] * beta[p]) * inv_sqrt2;
            block.row(r++) = coeff.transpose() * quotient;
          }
      },
      exec);

  NullspaceResult ns = nullspace(rows, tol_rank);
  ns.basis = quotient * ns.basis;
  return ns;
}

// ---------------------------------------------------------------------------

StackelSystem StackelSystem::unchecked(int n, std::vector<BivectorForm> basis) {
  StackelSystem s;
  s.n_ = n;
  for (const auto& f : basis)
    if (f.n() != n) throw DimensionError("StackelSystem: basis form of the wrong dimension");
  s.basis_ = std::move(basis);
  if (!s.basis_.empty()) {
    const Matrix c = s.coordinate_matrix();
    const Vector id = BivectorForm::identity(n).coordinates().normalized();
    const Matrix q = Eigen::HouseholderQR<Matrix>(c).householderQ() * Matrix::Identity(c.rows(), c.cols());
    s.metric_distance_ = (id - q * (q.transpose() * id)).norm();
  } else {
    s.metric_distance_ = 1.0;
  }
  return s;
}

StackelSystem::StackelSystem(int n, std::vector<BivectorForm> basis, const Tolerances& tol) {
  if (basis.empty()) throw PreconditionError("StackelSystem: empty basis");
  *this = unchecked(n, std::move(basis));
  const Vector sv = Eigen::JacobiSVD<Matrix>(coordinate_matrix()).singularValues();
  if (!(sv[sv.size() - 1] > tol.rank * sv[0]))
    throw PreconditionError("StackelSystem: basis is linearly dependent");
  contains_metric_ = metric_distance_ < tol.identity_span;
  if (!contains_metric_) {
    std::ostringstream os;
    os << "StackelSystem: metric form is not in the span (distance " << metric_distance_ << ")";
    throw PreconditionError(os.str());
  }
}

Matrix StackelSystem::coordinate_matrix() const {
  if (basis_.empty()) return Matrix();
  const Eigen::Index dim = basis_.front().coordinates().size();
  Matrix c(dim, static_cast<Eigen::Index>(basis_.size()));
  for (std::size_t i = 0; i < basis_.size(); ++i) c.col(static_cast<Eigen::Index>(i)) = basis_[i].coordinates();
  return c;
}

int default_sample_count(int n) {
  const int big_n = pair_count(n + 1);
  return 3 * big_n * (big_n + 1) / 2;
}

StackelSystem stackel_from_killing(const BivectorForm& form, int n_points, std::uint64_t seed, const Tolerances& tol,
                                   Exec exec) {
  if (n_points < 1) throw std::invalid_argument("stackel_from_killing: n_points must be >= 1");
  const int n = form.n();
  const auto frames = sample_frames(n, static_cast<std::size_t>(n_points), seed, exec);
  std::vector<DiagonalConstraint> sites(frames.size());
  for_each_index(
      frames.size(),
      [&](std::size_t i) {
        const PointFrame& p = frames[i];
        const Matrix k = eval_killing(form, p);
        Eigen::SelfAdjointEigenSolver<Matrix> solver(k);
        if (solver.info() != Eigen::Success) throw NumericalError("stackel_from_killing: eigensolver failed");
        const Vector& ev = solver.eigenvalues();
        for (Eigen::Index a = 1; a < ev.size(); ++a)
          if (!(ev[a] - ev[a - 1] > tol.eigen_gap))
            throw PreconditionError("stackel_from_killing: repeated eigenvalue at sample " + std::to_string(i));
        const auto nij = nijenhuis_residual(k, eval_nabla_killing(form, p));
        const double worst = *std::max_element(nij.begin(), nij.end());
        if (!(worst < tol.nijenhuis)) {
          std::ostringstream os;
          os << "stackel_from_killing: Nijenhuis residual " << worst << " at sample " << i;
          throw PreconditionError(os.str());
        }
        sites[i] = DiagonalConstraint{p.x(), p.frame() * solver.eigenvectors()};
      },
      exec);

  NullspaceResult ns = diagonal_forms(n, sites, tol.rank, exec);
  if (ns.nullity != n) {
    std::ostringstream os;
    os << "stackel_from_killing: nullspace has dimension " << ns.nullity << ", expected " << n;
    throw RankError(os.str(), ns.singular_values);
  }
  if (ns.gap_ratio < tol.gap_ratio) {
    std::ostringstream os;
    os << "stackel_from_killing: ambiguous singular-value gap " << ns.gap_ratio;
    throw RankError(os.str(), ns.singular_values);
  }
  std::vector<BivectorForm> basis;
  for (Eigen::Index c = 0; c < ns.basis.cols(); ++c) basis.push_back(BivectorForm::from_coordinates(n, ns.basis.col(c)));
  StackelSystem system(n, std::move(basis), tol);
  system.singular_values = ns.singular_values;
  system.gap_ratio = ns.gap_ratio;
  system.raw_nullity = ns.nullity + static_cast<int>(plucker_kernel(n).cols());
  return system;
}

// ---------------------------------------------------------------------------

double ResidualReport::max_residual() const {
  return std::max({killing_max, nijenhuis_max[0], nijenhuis_max[1], nijenhuis_max[2], commutation_max});
}

namespace {

struct PointStats {
  double killing = 0.0;
  std::array<double, 3> nijenhuis{0.0, 0.0, 0.0};
  double commutation = 0.0;
  bool simple = true;
};

void merge_into(ResidualReport& report, const std::vector<PointStats>& stats) {
  // Max-reduction in index order; NaN poisons the result.
  auto fold = [](double acc, double v) { return (std::isnan(acc) || std::isnan(v)) ? std::nan("") : std::max(acc, v); };
  for (const auto& s : stats) {
    report.killing_max = fold(report.killing_max, s.killing);
    for (std::size_t c = 0; c < 3; ++c) report.nijenhuis_max[c] = fold(report.nijenhuis_max[c], s.nijenhuis[c]);
    report.commutation_max = fold(report.commutation_max, s.commutation);
    report.eigen_simple = report.eigen_simple && s.simple;
  }
}

void fold_nijenhuis(PointStats& st, const std::array<double, 3>& nij) {
  for (std::size_t c = 0; c < 3; ++c) st.nijenhuis[c] = std::max(st.nijenhuis[c], nij[c]);
}

bool below(double v, double threshold) { return v < threshold; }  // false for NaN

}  // namespace

ResidualReport verify_stackel(const StackelSystem& system, int n_points, std::uint64_t seed, const Tolerances& tol,
                              Exec exec) {
  ResidualReport report;
  report.seed = seed;
  report.points_sampled = std::max(n_points, 1);
  report.threshold = tol.commute;
  const int n = system.n();
  const auto& basis = system.basis();
  report.dimension_ok = static_cast<int>(basis.size()) == n;

  // A generic member of the span: seeded Gaussian combination.
  std::optional<BivectorForm> generic;
  if (!basis.empty()) {
    std::mt19937_64 rng(mix_seed(seed, 0xC0FFEE));
    std::normal_distribution<double> normal;
    Matrix combo = Matrix::Zero(basis.front().pairs(), basis.front().pairs());
    for (const auto& f : basis) combo += normal(rng) * f.matrix();
    combo = (0.5 * (combo + combo.transpose())).eval();
    generic.emplace(n, combo);
  }

  const auto frames = sample_frames(n, static_cast<std::size_t>(report.points_sampled), seed, exec);
  std::vector<PointStats> stats(frames.size());
  for_each_index(
      frames.size(),
      [&](std::size_t i) {
        const PointFrame& p = frames[i];
        PointStats& st = stats[i];
        std::vector<Matrix> ks;
        ks.reserve(basis.size());
        for (const auto& f : basis) {
          ks.push_back(eval_killing(f, p));
          const Tensor3 dk = eval_nabla_killing(f, p);
          st.killing = std::max(st.killing, killing_residual(dk));
          if (eigen_simplicity(f, p, tol.eigen_gap)) fold_nijenhuis(st, nijenhuis_residual(ks.back(), dk));
        }
        for (std::size_t a = 0; a < ks.size(); ++a)
          for (std::size_t b = a + 1; b < ks.size(); ++b)
            st.commutation = std::max(st.commutation, (ks[a] * ks[b] - ks[b] * ks[a]).norm());
        if (generic) {
          if (eigen_simplicity(*generic, p, tol.eigen_gap)) {
            fold_nijenhuis(st, nijenhuis_residual(*generic, p));
          } else {
            st.simple = false;
          }
        }
      },
      exec);
  merge_into(report, stats);
  report.pass = report.dimension_ok && below(report.killing_max, tol.commute) &&
                below(report.commutation_max, tol.commute) && below(report.nijenhuis_max[0], tol.commute) &&
                below(report.nijenhuis_max[1], tol.commute) && below(report.nijenhuis_max[2], tol.commute);
  return report;
}

ResidualReport verify_form(const BivectorForm& form, int n_points, std::uint64_t seed, const Tolerances& tol,
                           Exec exec) {
  ResidualReport report;
  report.seed = seed;
  report.points_sampled = std::max(n_points, 1);
  report.threshold = tol.commute;
  const auto frames = sample_frames(form.n(), static_cast<std::size_t>(report.points_sampled), seed, exec);
  std::vector<PointStats> stats(frames.size());
  for_each_index(
      frames.size(),
      [&](std::size_t i) {
        const PointFrame& p = frames[i];
        const Matrix k = eval_killing(form, p);
        const Tensor3 dk = eval_nabla_killing(form, p);
        stats[i].killing = killing_residual(dk);
        stats[i].nijenhuis = nijenhuis_residual(k, dk);
        stats[i].simple = eigen_simplicity(form, p, tol.eigen_gap);
      },
      exec);
  merge_into(report, stats);
  report.pass = below(report.killing_max, tol.commute) && below(report.nijenhuis_max[0], tol.commute) &&
                below(report.nijenhuis_max[1], tol.commute) && below(report.nijenhuis_max[2], tol.commute);
  return report;
}

// ---------------------------------------------------------------------------

NormalFormDiag::NormalFormDiag(int n, Vector diag) : n_(n), diag_(std::move(diag)) {
  if (n < 1) throw DimensionError("NormalFormDiag: n must be >= 1");
  if (diag_.size() != pair_count(n + 1)) throw DimensionError("NormalFormDiag: expected n(n+1)/2 entries");
}

double NormalFormDiag::entry(int i, int j) const {
  if (i > j) std::swap(i, j);
  return diag_[pair_index(i, j, n_ + 1)];
}

NormalFormDiag act_permutation(const NormalFormDiag& d, const Permutation& sigma) {
  const int ambient = d.n() + 1;
  if (sigma.size() != ambient) throw std::invalid_argument("act_permutation: permutation size must be n+1");
  Vector out(d.diag().size());
  for (int p = 0; p < d.diag().size(); ++p) {
    const auto [i, j] = pair_of(p, ambient);
    const int a = std::min(sigma(i), sigma(j));
    const int b = std::max(sigma(i), sigma(j));
    out[pair_index(a, b, ambient)] = d.diag()[p];
  }
  return NormalFormDiag(d.n(), std::move(out));
}

BivectorForm act_permutation(const BivectorForm& form, const Permutation& sigma) {
  if (sigma.size() != form.ambient()) throw std::invalid_argument("act_permutation: permutation size must be n+1");
  if (form.is_exact()) {
    RationalMatrix p(static_cast<std::size_t>(sigma.size()), static_cast<std::size_t>(sigma.size()));
    for (int i = 0; i < sigma.size(); ++i) p(static_cast<std::size_t>(sigma(i)), static_cast<std::size_t>(i)) = 1;
    return act_isometry_exact(form, p);
  }
  return act_isometry(form, sigma.matrix());
}

StackelSystem act_permutation(const StackelSystem& system, const Permutation& sigma, const Tolerances& tol) {
  std::vector<BivectorForm> basis;
  for (const auto& f : system.basis()) basis.push_back(act_permutation(f, sigma));
  return StackelSystem(system.n(), std::move(basis), tol);
}

}  // namespace spheresep
