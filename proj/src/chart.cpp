#include "spheresep/chart.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

namespace spheresep {

bool Chart::Node::contains(const double* u) const {
  for (std::size_t i = 0; i < domain_.size(); ++i)
    if (!(u[i] > domain_[i].lo && u[i] < domain_[i].hi)) return false;
  return true;
}

namespace {

std::string join(std::span<const double> v) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

class UnitNode final : public Chart::Node {
public:
  int coords() const override { return 0; }
  int ambient() const override { return 1; }
  void eval(const double*, Vector& x, Matrix* jac) const override {
    x = Vector::Ones(1);
    if (jac) jac->resize(1, 0);
  }
  std::string label() const override { return "unit"; }
};

class ArcNode final : public Chart::Node {
public:
  ArcNode() { domain_ = {{0.0, std::numbers::pi / 2}}; }
  int coords() const override { return 1; }
  int ambient() const override { return 2; }
  void eval(const double* u, Vector& x, Matrix* jac) const override {
    const double c = std::cos(u[0]);
    const double s = std::sin(u[0]);
    x.resize(2);
    x << c, s;
    if (jac) {
      jac->resize(2, 1);
      *jac << -s, c;
    }
  }
  std::string label() const override { return "arc"; }
};

class EllipticNode final : public Chart::Node {
public:
  explicit EllipticNode(std::vector<double> e) : e_(std::move(e)) {
    for (std::size_t m = 1; m < e_.size(); ++m) domain_.push_back({e_[m - 1], e_[m]});
    const int k = static_cast<int>(e_.size());
    denom_.resize(e_.size());
    for (int i = 0; i < k; ++i) {
      double d = 1.0;
      for (int j = 0; j < k; ++j)
        if (j != i) d *= e_[i] - e_[j];
      denom_[i] = d;
    }
  }
  int coords() const override { return static_cast<int>(e_.size()) - 1; }
  int ambient() const override { return static_cast<int>(e_.size()); }
  void eval(const double* u, Vector& x, Matrix* jac) const override {
    const int k = ambient();
    x.resize(k);
    for (int i = 0; i < k; ++i) {
      double num = 1.0;
      for (int m = 0; m < k - 1; ++m) num *= e_[i] - u[m];
      // Clamped at the closed boundary where a factor vanishes.
      x[i] = std::sqrt(std::max(0.0, num / denom_[i]));
    }
    if (jac) {
      jac->resize(k, k - 1);
      for (int i = 0; i < k; ++i)
        for (int m = 0; m < k - 1; ++m) (*jac)(i, m) = -x[i] / (2.0 * (e_[i] - u[m]));
    }
  }
  std::string label() const override { return "elliptic(" + join(e_) + ")"; }

private:
  std::vector<double> e_;
  std::vector<double> denom_;
};

class ComposeNode final : public Chart::Node {
public:
  ComposeNode(Chart y, std::vector<Chart> xs) : y_(std::move(y)), xs_(std::move(xs)) {
    domain_ = y_.domain();
    ambient_ = 0;
    coords_ = y_.dim();
    for (const auto& c : xs_) {
      domain_.insert(domain_.end(), c.domain().begin(), c.domain().end());
      ambient_ += c.ambient();
      coords_ += c.dim();
    }
  }
  int coords() const override { return coords_; }
  int ambient() const override { return ambient_; }
  bool contains(const double* u) const override {
    if (!y_.node()->contains(u)) return false;
    const double* p = u + y_.dim();
    for (const auto& c : xs_) {
      if (!c.node()->contains(p)) return false;
      p += c.dim();
    }
    return true;
  }
  void eval(const double* u, Vector& x, Matrix* jac) const override {
    Vector yx;
    Matrix yj;
    y_.node()->eval(u, yx, jac ? &yj : nullptr);
    x.resize(ambient_);
    if (jac) jac->setZero(ambient_, coords_);
    const double* p = u + y_.dim();
    Eigen::Index row = 0;
    Eigen::Index col = y_.dim();
    for (std::size_t i = 0; i < xs_.size(); ++i) {
      const Chart& c = xs_[i];
      Vector cx;
      Matrix cj;
      c.node()->eval(p, cx, jac ? &cj : nullptr);
      const auto ii = static_cast<Eigen::Index>(i);
      x.segment(row, c.ambient()) = yx[ii] * cx;
      if (jac) {
        jac->block(row, 0, c.ambient(), y_.dim()) = cx * yj.row(ii);
        jac->block(row, col, c.ambient(), c.dim()) = yx[ii] * cj;
      }
      row += c.ambient();
      col += c.dim();
      p += c.dim();
    }
  }
  std::string label() const override {
    std::string s = y_.label() + "o[";
    for (std::size_t i = 0; i < xs_.size(); ++i) s += (i ? "," : "") + xs_[i].label();
    return s + "]";
  }

private:
  Chart y_;
  std::vector<Chart> xs_;
  int ambient_ = 0;
  int coords_ = 0;
};

class PermuteNode final : public Chart::Node {
public:
  PermuteNode(Chart inner, Permutation sigma) : inner_(std::move(inner)), sigma_(std::move(sigma)) {
    domain_ = inner_.domain();
  }
  int coords() const override { return inner_.dim(); }
  int ambient() const override { return inner_.ambient(); }
  bool contains(const double* u) const override { return inner_.node()->contains(u); }
  void eval(const double* u, Vector& x, Matrix* jac) const override {
    Vector ix;
    Matrix ij;
    inner_.node()->eval(u, ix, jac ? &ij : nullptr);
    x.resize(ix.size());
    if (jac) jac->resize(ij.rows(), ij.cols());
    for (int i = 0; i < sigma_.size(); ++i) {
      x[sigma_(i)] = ix[i];
      if (jac) jac->row(sigma_(i)) = ij.row(i);
    }
  }
  std::string label() const override { return "permute(" + inner_.label() + ")"; }

private:
  Chart inner_;
  Permutation sigma_;
};

class ReparamNode final : public Chart::Node {
public:
  ReparamNode(Chart inner, Matrix a, Vector b, std::vector<Interval> domain)
      : inner_(std::move(inner)), a_(std::move(a)), b_(std::move(b)) {
    domain_ = std::move(domain);
  }
  int coords() const override { return static_cast<int>(a_.cols()); }
  int ambient() const override { return inner_.ambient(); }
  bool contains(const double* w) const override {
    if (!Chart::Node::contains(w)) return false;
    const Vector u = inner_coords(w);
    return inner_.node()->contains(u.data());
  }
  void eval(const double* w, Vector& x, Matrix* jac) const override {
    const Vector u = inner_coords(w);
    Matrix ij;
    inner_.node()->eval(u.data(), x, jac ? &ij : nullptr);
    if (jac) *jac = ij * a_;
  }
  std::string label() const override { return "reparam(" + inner_.label() + ")"; }

private:
  Vector inner_coords(const double* w) const {
    return a_ * Eigen::Map<const Vector>(w, a_.cols()) + b_;
  }
  Chart inner_;
  Matrix a_;
  Vector b_;
};

}  // namespace

// ---------------------------------------------------------------------------

Chart::Chart(std::shared_ptr<const Node> node) : node_(std::move(node)) {
  if (!node_) throw std::invalid_argument("Chart: null node");
}

Chart Chart::unit() { return Chart(std::make_shared<UnitNode>()); }

bool Chart::contains(std::span<const double> u) const {
  if (static_cast<int>(u.size()) != dim()) throw DimensionError("Chart: wrong number of coordinates");
  return node_->contains(u.data());
}

Vector Chart::map(std::span<const double> u) const {
  if (static_cast<int>(u.size()) != dim()) throw DimensionError("Chart: wrong number of coordinates");
  Vector x;
  node_->eval(u.data(), x, nullptr);
  return x;
}

Chart::Jet Chart::jet(std::span<const double> u) const {
  if (static_cast<int>(u.size()) != dim()) throw DimensionError("Chart: wrong number of coordinates");
  Jet j;
  node_->eval(u.data(), j.x, &j.jacobian);
  return j;
}

std::vector<double> Chart::at_fractions(std::span<const double> fractions) const {
  if (static_cast<int>(fractions.size()) != dim()) throw DimensionError("Chart: wrong number of fractions");
  std::vector<double> u(fractions.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = domain()[i].lo + fractions[i] * domain()[i].length();
  return u;
}

// ---------------------------------------------------------------------------

EllipticParams::EllipticParams(std::vector<double> values, double gap_min) {
  if (values.size() < 2) throw std::invalid_argument("EllipticParams: arity must be >= 2");
  arity_ = static_cast<int>(values.size());
  if (arity_ == 2) return;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (!(values[i] > values[i - 1]) || !std::isfinite(values[i]))
      throw std::invalid_argument("EllipticParams: values must be finite and strictly increasing");
  const double lo = values.front();
  const double span = values.back() - lo;
  for (auto& v : values) v = (v - lo) / span;
  values.front() = 0.0;
  values.back() = 1.0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] - values[i - 1] < gap_min)
      throw std::invalid_argument("EllipticParams: normalized gap below gap_min");
  values_ = std::move(values);
}

EllipticParams EllipticParams::binary() { return EllipticParams({0.0, 1.0}); }

EllipticParams EllipticParams::equally_spaced(int k) {
  std::vector<double> v(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) v[static_cast<std::size_t>(i)] = static_cast<double>(i) / (k - 1);
  return EllipticParams(std::move(v));
}

EllipticParams EllipticParams::random(int k, std::uint64_t seed) {
  if (k <= 2) return EllipticParams(std::vector<double>(static_cast<std::size_t>(std::max(k, 2)), 0.0));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  while (true) {
    std::vector<double> v{0.0, 1.0};
    for (int i = 0; i < k - 2; ++i) v.push_back(unif(rng));
    std::sort(v.begin(), v.end());
    bool ok = true;
    for (std::size_t i = 1; i < v.size(); ++i) ok = ok && v[i] - v[i - 1] >= 0.05;
    if (ok) return EllipticParams(std::move(v));
  }
}

EllipticParams EllipticParams::reflected() const {
  if (arity_ == 2) return *this;
  std::vector<double> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 - values_[values_.size() - 1 - i];
  return EllipticParams(std::move(v));
}

Chart arc_chart() { return Chart(std::make_shared<ArcNode>()); }

Chart elliptic_chart(std::span<const double> e) {
  if (e.size() < 2) throw std::invalid_argument("elliptic_chart: need at least two parameters");
  for (std::size_t i = 1; i < e.size(); ++i)
    if (!(e[i] > e[i - 1])) throw std::invalid_argument("elliptic_chart: parameters must be strictly increasing");
  if (e.size() == 2) return arc_chart();
  return Chart(std::make_shared<EllipticNode>(std::vector<double>(e.begin(), e.end())));
}

Chart elliptic_chart(const EllipticParams& params) {
  if (params.arity() == 2) return arc_chart();
  return elliptic_chart(params.values());
}

std::vector<Rational> elliptic_squares_exact(const std::vector<Rational>& e, const std::vector<Rational>& u) {
  if (e.size() < 2 || u.size() + 1 != e.size()) throw DimensionError("elliptic_squares_exact: need k values and k-1 coordinates");
  std::vector<Rational> out(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    Rational num = 1;
    Rational den = 1;
    for (const auto& um : u) num *= e[i] - um;
    for (std::size_t j = 0; j < e.size(); ++j)
      if (j != i) den *= e[i] - e[j];
    if (den == 0) throw std::invalid_argument("elliptic_squares_exact: coincident parameters");
    out[i] = num / den;
  }
  return out;
}

Chart sphere_compose(const Chart& y, std::span<const Chart> xs) {
  if (static_cast<int>(xs.size()) != y.ambient())
    throw std::invalid_argument("sphere_compose: " + std::to_string(xs.size()) + " inner charts for an outer chart on S^" +
                                std::to_string(y.ambient() - 1));
  return Chart(std::make_shared<ComposeNode>(y, std::vector<Chart>(xs.begin(), xs.end())));
}

Chart permute_axes(const Chart& chart, const Permutation& sigma) {
  if (sigma.size() != chart.ambient()) throw DimensionError("permute_axes: permutation size mismatch");
  return Chart(std::make_shared<PermuteNode>(chart, sigma));
}

Chart linear_reparam(const Chart& chart, Matrix a, Vector b, std::vector<Interval> domain) {
  if (a.rows() != chart.dim() || b.size() != chart.dim() || static_cast<Eigen::Index>(domain.size()) != a.cols())
    throw DimensionError("linear_reparam: shape mismatch");
  return Chart(std::make_shared<ReparamNode>(chart, std::move(a), std::move(b), std::move(domain)));
}

// ---------------------------------------------------------------------------

DressedTree::DressedTree(RootedPlanarTree tree, std::map<NodePath, EllipticParams> params, std::vector<int> leaf_axes)
    : tree_(std::move(tree)), leaf_axes_(Permutation::identity(tree_.leaf_count())) {
  if (tree_.is_leaf()) throw std::invalid_argument("DressedTree: a single leaf has no chart");
  const auto internal = tree_.internal_paths();
  for (const auto& [path, p] : params) {
    const RootedPlanarTree* node = nullptr;
    try {
      node = &tree_.at(path);
    } catch (const std::out_of_range&) {
      throw std::invalid_argument("DressedTree: parameters for missing node '" + format_path(path) + "'");
    }
    if (node->is_leaf()) throw std::invalid_argument("DressedTree: parameters for leaf '" + format_path(path) + "'");
    if (node->arity() != p.arity())
      throw std::invalid_argument("DressedTree: node '" + format_path(path) + "' has arity " +
                                  std::to_string(node->arity()) + " but " + std::to_string(p.arity()) + " parameters");
  }
  for (const auto& path : internal) {
    if (params.count(path)) continue;
    if (tree_.at(path).arity() != 2)
      throw std::invalid_argument("DressedTree: missing parameters for node '" + format_path(path) + "'");
    params.emplace(path, EllipticParams::binary());
  }
  params_ = std::move(params);
  if (!leaf_axes.empty()) {
    if (static_cast<int>(leaf_axes.size()) != tree_.leaf_count())
      throw std::invalid_argument("DressedTree: leaf_axes must list one axis per leaf");
    leaf_axes_ = Permutation(std::move(leaf_axes));
  }
}

DressedTree DressedTree::with_default_params(const RootedPlanarTree& tree) {
  std::map<NodePath, EllipticParams> params;
  for (const auto& path : tree.internal_paths()) params.emplace(path, EllipticParams::equally_spaced(tree.at(path).arity()));
  return DressedTree(tree, std::move(params));
}

DressedTree DressedTree::with_random_params(const RootedPlanarTree& tree, std::uint64_t seed) {
  std::map<NodePath, EllipticParams> params;
  std::uint64_t i = 0;
  for (const auto& path : tree.internal_paths())
    params.emplace(path, EllipticParams::random(tree.at(path).arity(), mix_seed(seed, i++)));
  return DressedTree(tree, std::move(params));
}

const EllipticParams& DressedTree::params_at(const NodePath& path) const {
  auto it = params_.find(path);
  if (it == params_.end()) throw std::out_of_range("DressedTree: no parameters at '" + format_path(path) + "'");
  return it->second;
}

DressedTree DressedTree::with_leaf_axes(std::vector<int> axes) const { return DressedTree(tree_, params_, std::move(axes)); }

namespace {

Chart build_chart(const DressedTree& d, const RootedPlanarTree& t, NodePath& path) {
  if (t.is_leaf()) return Chart::unit();
  std::vector<Chart> kids;
  for (int i = 0; i < t.arity(); ++i) {
    path.push_back(i);
    kids.push_back(build_chart(d, t.children()[static_cast<std::size_t>(i)], path));
    path.pop_back();
  }
  return sphere_compose(elliptic_chart(d.params_at(path)), kids);
}

}  // namespace

Chart chart_from_tree(const DressedTree& tree) {
  NodePath path;
  Chart c = build_chart(tree, tree.tree(), path);
  if (tree.leaf_axes() == Permutation::identity(tree.leaf_axes().size())) return c;
  return permute_axes(c, tree.leaf_axes());
}

Permutation planar_reversal(const RootedPlanarTree& tree, const NodePath& path) {
  const RootedPlanarTree& node = tree.at(path);
  int start = 0;
  const RootedPlanarTree* cur = &tree;
  for (int i : path) {
    for (int j = 0; j < i; ++j) start += cur->children()[static_cast<std::size_t>(j)].leaf_count();
    cur = &cur->children()[static_cast<std::size_t>(i)];
  }
  std::vector<int> images(static_cast<std::size_t>(tree.leaf_count()));
  for (int p = 0; p < tree.leaf_count(); ++p) images[static_cast<std::size_t>(p)] = p;
  if (node.is_leaf()) return Permutation(std::move(images));
  std::vector<int> sizes;
  for (const auto& c : node.children()) sizes.push_back(c.leaf_count());
  int old_offset = start;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    int new_offset = start;
    for (std::size_t j = i + 1; j < sizes.size(); ++j) new_offset += sizes[j];
    for (int r = 0; r < sizes[i]; ++r) images[static_cast<std::size_t>(old_offset + r)] = new_offset + r;
    old_offset += sizes[i];
  }
  return Permutation(std::move(images));
}

DressedTree dyslectic_mirror(const DressedTree& d, const NodePath& path) {
  const RootedPlanarTree& node = d.tree().at(path);
  if (node.is_leaf()) return d;
  const int k = node.arity();
  std::map<NodePath, EllipticParams> params;
  for (const auto& [p, e] : d.params()) {
    const bool below = p.size() > path.size() && std::equal(path.begin(), path.end(), p.begin());
    if (p == path) {
      params.emplace(p, e.reflected());
    } else if (below) {
      NodePath q = p;
      q[path.size()] = k - 1 - q[path.size()];
      params.emplace(std::move(q), e);
    } else {
      params.emplace(p, e);
    }
  }
  const Permutation rho = planar_reversal(d.tree(), path);
  std::vector<int> axes(static_cast<std::size_t>(d.tree().leaf_count()));
  for (int p = 0; p < d.tree().leaf_count(); ++p) axes[static_cast<std::size_t>(rho(p))] = d.leaf_axes()(p);
  return DressedTree(reverse_at(d.tree(), path), std::move(params), std::move(axes));
}

// ---------------------------------------------------------------------------

std::vector<double> sample_interior(const Chart& chart, std::uint64_t seed, double margin) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(margin, 1.0 - margin);
  std::vector<double> frac(static_cast<std::size_t>(chart.dim()));
  for (int attempt = 0; attempt < 64; ++attempt) {
    for (auto& f : frac) f = unif(rng);
    auto u = chart.at_fractions(frac);
    if (chart.contains(u)) return u;
  }
  throw NumericalError("sample_interior: no interior point in 64 draws");
}

OrthogonalityReport verify_orthogonal(const Chart& chart, int n_points, std::uint64_t seed, const Tolerances& tol) {
  OrthogonalityReport report;
  report.seed = seed;
  report.threshold = tol.orthogonal;
  report.points_sampled = std::max(n_points, 1);
  report.min_rank_ratio = 1.0;
  const int n = chart.dim();
  std::uint64_t stream = 0;
  for (int s = 0; s < report.points_sampled; ++s) {
    std::vector<double> u;
    int failures = 0;
    while (true) {
      u = sample_interior(chart, mix_seed(seed, stream++));
      bool ok = true;
      for (int i = 0; i < n && ok; ++i) {
        const double h = 1e-6 * chart.domain()[static_cast<std::size_t>(i)].length();
        auto up = u, dn = u;
        up[static_cast<std::size_t>(i)] += h;
        dn[static_cast<std::size_t>(i)] -= h;
        ok = chart.contains(up) && chart.contains(dn);
      }
      if (ok) break;
      if (++failures >= 64) throw NumericalError("verify_orthogonal: samples keep hitting the domain boundary");
    }
    Matrix j(chart.ambient(), n);
    for (int i = 0; i < n; ++i) {
      const double h = 1e-6 * chart.domain()[static_cast<std::size_t>(i)].length();
      auto up = u, dn = u;
      up[static_cast<std::size_t>(i)] += h;
      dn[static_cast<std::size_t>(i)] -= h;
      j.col(i) = (chart.map(up) - chart.map(dn)) / (2.0 * h);
    }
    const Matrix g = j.transpose() * j;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        report.max_off_diagonal = std::max(report.max_off_diagonal, std::abs(g(a, b)) / std::sqrt(g(a, a) * g(b, b)));
    const Vector sv = Eigen::JacobiSVD<Matrix>(j).singularValues();
    report.min_rank_ratio = std::min(report.min_rank_ratio, sv[sv.size() - 1] / sv[0]);
  }
  report.pass = report.max_off_diagonal < tol.orthogonal && report.min_rank_ratio > 1e-8;
  return report;
}

StackelSystem stackel_of_chart(const Chart& chart, int n_points, std::uint64_t seed, const Tolerances& tol, Exec exec) {
  const int n = chart.dim();
  if (n < 1 || chart.ambient() != n + 1) throw DimensionError("stackel_of_chart: chart must have n coordinates on S^n");
  const auto ortho = verify_orthogonal(chart, 8, mix_seed(seed, 1), tol);
  if (!ortho.pass) {
    std::ostringstream os;
    os << "stackel_of_chart: chart is not orthogonal (off-diagonal " << ortho.max_off_diagonal << ")";
    throw PreconditionError(os.str());
  }
  std::vector<DiagonalConstraint> sites(static_cast<std::size_t>(n_points));
  for_each_index(
      sites.size(),
      [&](std::size_t i) {
        const auto u = sample_interior(chart, mix_seed(seed, 1000 + i));
        auto jet = chart.jet(u);
        for (Eigen::Index c = 0; c < jet.jacobian.cols(); ++c) jet.jacobian.col(c).normalize();
        sites[i] = DiagonalConstraint{jet.x, jet.jacobian};
      },
      exec);
  NullspaceResult ns = diagonal_forms(n, sites, tol.rank, exec);
  if (ns.nullity != n) {
    std::ostringstream os;
    os << "stackel_of_chart: nullspace has dimension " << ns.nullity << ", expected " << n;
    throw RankError(os.str(), ns.singular_values);
  }
  if (ns.gap_ratio < tol.gap_ratio) {
    std::ostringstream os;
    os << "stackel_of_chart: ambiguous singular-value gap " << ns.gap_ratio;
    throw RankError(os.str(), ns.singular_values);
  }
  std::vector<BivectorForm> basis;
  for (Eigen::Index c = 0; c < ns.basis.cols(); ++c) basis.push_back(BivectorForm::from_coordinates(n, ns.basis.col(c)));
  StackelSystem system(n, std::move(basis), tol);
  system.singular_values = ns.singular_values;
  system.gap_ratio = ns.gap_ratio;
  system.raw_nullity = ns.nullity + static_cast<int>(plucker_kernel(n).cols());
  const auto check = verify_stackel(system, 8, mix_seed(seed, 2), tol, exec);
  if (!check.pass) {
    std::ostringstream os;
    os << "stackel_of_chart: extracted system fails verification (max residual " << check.max_residual() << ")";
    throw NumericalError(os.str());
  }
  return system;
}

StackelSystem stackel_of_chart(const DressedTree& tree, int n_points, std::uint64_t seed, const Tolerances& tol,
                               Exec exec) {
  return stackel_of_chart(chart_from_tree(tree), n_points, seed, tol, exec);
}

double max_pullback_off_diagonal(const Chart& chart, const StackelSystem& system, int n_points, std::uint64_t seed) {
  double worst = 0.0;
  for (int s = 0; s < n_points; ++s) {
    const auto u = sample_interior(chart, mix_seed(seed, static_cast<std::uint64_t>(s)));
    auto jet = chart.jet(u);
    for (Eigen::Index c = 0; c < jet.jacobian.cols(); ++c) jet.jacobian.col(c).normalize();
    const Matrix w = wedge_columns(jet.x, jet.jacobian);
    for (const auto& f : system.basis()) {
      const Matrix k = w.transpose() * f.matrix() * w;
      for (Eigen::Index a = 0; a < k.rows(); ++a)
        for (Eigen::Index b = a + 1; b < k.cols(); ++b) worst = std::max(worst, std::abs(k(a, b)));
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------

namespace {

Vector elliptic_diag(int n, std::span<const double> e) {
  Vector d(pair_count(n + 1));
  for (int p = 0; p < d.size(); ++p) {
    const auto [i, j] = pair_of(p, n + 1);
    d[p] = 0.5 * (e[static_cast<std::size_t>(i)] + e[static_cast<std::size_t>(j)]);
  }
  return d;
}

}  // namespace

NormalFormDiag elliptic_form(std::span<const double> e) {
  if (e.size() < 2) throw std::invalid_argument("elliptic_form: need at least two parameters");
  for (std::size_t i = 1; i < e.size(); ++i)
    if (!(e[i] > e[i - 1]) || !std::isfinite(e[i]))
      throw std::invalid_argument("elliptic_form: parameters must be finite and strictly increasing");
  const int n = static_cast<int>(e.size()) - 1;
  NormalFormDiag result(n, elliptic_diag(n, e));
  if (n < 2) return result;

  // Validate on the normalized parameters, an affine change that leaves the
  // eigenframes and the Nijenhuis conditions unchanged.
  const EllipticParams normalized(std::vector<double>(e.begin(), e.end()), 0.0);
  const auto& en = normalized.values();
  const BivectorForm form = BivectorForm::diagonal(n, elliptic_diag(n, en));
  const Chart chart = elliptic_chart(en);
  const double e_sum = std::accumulate(en.begin(), en.end(), 0.0);
  constexpr std::uint64_t kSeed = 0x5EED5EEDULL;
  for (std::uint64_t s = 0; s < 12; ++s) {
    const PointFrame p = sample_frame(n, kSeed, s);
    const auto nij = nijenhuis_residual(form, p);
    const double worst = *std::max_element(nij.begin(), nij.end());
    if (!(worst < 1e-9)) {
      std::ostringstream os;
      os << "elliptic_form: Nijenhuis residual " << worst << " for e = (" << join(e) << ")";
      throw NumericalError(os.str());
    }
    if (!eigen_simplicity(form, p, 1e-8))
      throw NumericalError("elliptic_form: repeated eigenvalue for e = (" + join(e) + ")");

    const auto u = sample_interior(chart, mix_seed(kSeed, 100 + s));
    const PointFrame at_u = orthonormal_frame(SpherePoint(chart.map(u), Tolerances{1e-10}), mix_seed(kSeed, 200 + s));
    const double u_sum = std::accumulate(u.begin(), u.end(), 0.0);
    std::vector<double> expected;
    for (double um : u) expected.push_back(0.5 * (e_sum - u_sum + um));
    std::sort(expected.begin(), expected.end());
    const Vector ev = killing_eigenvalues(form, at_u);
    for (int m = 0; m < n; ++m)
      if (std::abs(ev[m] - expected[static_cast<std::size_t>(m)]) > 1e-9)
        throw NumericalError("elliptic_form: eigenvalues do not match elliptic coordinates for e = (" + join(e) + ")");
  }
  return result;
}

// ---------------------------------------------------------------------------

std::string PolylineSet::to_csv() const {
  std::string out = "curve_id,t_index,x0,x1,x2\n";
  char buf[160];
  for (std::size_t c = 0; c < curves.size(); ++c)
    for (std::size_t t = 0; t < curves[c].points.size(); ++t) {
      const auto& p = curves[c].points[t];
      std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%.17g,%.17g\n", c, t, p[0], p[1], p[2]);
      out += buf;
    }
  return out;
}

PolylineSet emit_gridlines(const Chart& chart, int resolution, int lines_per_family, bool full_sphere) {
  if (chart.dim() != 2 || chart.ambient() != 3) throw DimensionError("emit_gridlines: chart must live on S^2");
  if (resolution < 2 || lines_per_family < 1) throw std::invalid_argument("emit_gridlines: resolution >= 2 and lines >= 1");
  PolylineSet set;
  const int signs = full_sphere ? 8 : 1;
  for (int family = 0; family < 2; ++family) {
    const int fixed = 1 - family;
    const Interval vary = chart.domain()[static_cast<std::size_t>(family)];
    const Interval hold = chart.domain()[static_cast<std::size_t>(fixed)];
    for (int line = 0; line < lines_per_family; ++line) {
      std::vector<double> u(2);
      u[static_cast<std::size_t>(fixed)] = hold.lo + hold.length() * (line + 1) / (lines_per_family + 1);
      std::vector<Eigen::Vector3d> base;
      for (int t = 0; t < resolution; ++t) {
        u[static_cast<std::size_t>(family)] = vary.lo + vary.length() * t / (resolution - 1);
        const Vector x = chart.map(u);
        base.emplace_back(x[0], x[1], x[2]);
      }
      for (int s = 0; s < signs; ++s) {
        const Eigen::Vector3d sign((s & 1) ? -1.0 : 1.0, (s & 2) ? -1.0 : 1.0, (s & 4) ? -1.0 : 1.0);
        Polyline pl;
        pl.family = family;
        for (const auto& b : base) pl.points.push_back(b.cwiseProduct(sign));
        set.curves.push_back(std::move(pl));
      }
    }
  }
  return set;
}

}  // namespace spheresep
