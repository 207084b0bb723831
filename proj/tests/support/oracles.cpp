#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <queue>
#include <random>
#include <stdexcept>

namespace oracle {

Vector wedge(const Vector& x, const Vector& u) {
  const auto m = x.size();
  Vector w(m * (m - 1) / 2);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i + 1; j < m; ++j) w[k++] = x[i] * u[j] - x[j] * u[i];
  return w;
}

Matrix killing_at(const Matrix& b, const Vector& x, const Matrix& frame) {
  const auto n = frame.cols();
  Matrix k(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index c = 0; c < n; ++c) k(a, c) = wedge(x, frame.col(a)).dot(b * wedge(x, frame.col(c)));
  return k;
}

spheresep::Tensor3 fd_nabla_killing(const Matrix& b, const Vector& x, const Matrix& frame, double h) {
  const int n = static_cast<int>(frame.cols());
  spheresep::Tensor3 out(n);
  for (int c = 0; c < n; ++c) {
    auto at = [&](double t) {
      const Vector xt = std::cos(t) * x + std::sin(t) * frame.col(c);
      Matrix ft = frame;
      ft.col(c) = -std::sin(t) * x + std::cos(t) * frame.col(c);
      return killing_at(b, xt, ft);
    };
    const Matrix d = (at(h) - at(-h)) / (2.0 * h);
    for (int a = 0; a < n; ++a)
      for (int bb = 0; bb < n; ++bb) out(c, a, bb) = d(a, bb);
  }
  return out;
}

std::uint64_t kirkman_cayley(int leaves, int m) {
  // Exact in rationals, then converted.
  auto binom = [](int n, int k) {
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return r;
  };
  if (m < 0 || m > leaves - 2) return 0;
  const mpz_class num = binom(leaves - 2, m) * binom(leaves + m, m);
  if (num % (m + 1) != 0) throw std::logic_error("kirkman_cayley: not an integer");
  const mpz_class q = num / (m + 1);
  return q.get_ui();
}

namespace {

struct T {
  std::vector<T> kids;
};

std::string text(const T& t) {
  if (t.kids.empty()) return "*";
  std::string s = "(";
  for (std::size_t i = 0; i < t.kids.size(); ++i) s += (i ? "," : "") + text(t.kids[i]);
  return s + ")";
}

T parse(const std::string& s, std::size_t& pos) {
  if (s[pos] == '*') {
    ++pos;
    return {};
  }
  ++pos;  // '('
  T t;
  while (true) {
    t.kids.push_back(parse(s, pos));
    if (s[pos++] == ')') break;
  }
  return t;
}

T parse(const std::string& s) {
  std::size_t pos = 0;
  return parse(s, pos);
}

std::vector<T> binary(int leaves) {
  if (leaves == 1) return {T{}};
  std::vector<T> out;
  for (int left = 1; left < leaves; ++left)
    for (const auto& a : binary(left))
      for (const auto& b : binary(leaves - left)) out.push_back(T{{a, b}});
  return out;
}

// Every tree obtained by contracting one internal non-root edge.
void contractions(const T& t, std::vector<T>& out) {
  for (std::size_t i = 0; i < t.kids.size(); ++i) {
    const T& c = t.kids[i];
    if (c.kids.empty()) continue;
    T merged;
    for (std::size_t j = 0; j < t.kids.size(); ++j) {
      if (j == i)
        merged.kids.insert(merged.kids.end(), c.kids.begin(), c.kids.end());
      else
        merged.kids.push_back(t.kids[j]);
    }
    out.push_back(merged);
    std::vector<T> inner;
    contractions(c, inner);
    for (auto& ci : inner) {
      T copy = t;
      copy.kids[i] = ci;
      out.push_back(copy);
    }
  }
}

void reversals(const T& t, std::vector<T>& out) {
  if (t.kids.empty()) return;
  T r = t;
  std::reverse(r.kids.begin(), r.kids.end());
  out.push_back(r);
  for (std::size_t i = 0; i < t.kids.size(); ++i) {
    std::vector<T> inner;
    reversals(t.kids[i], inner);
    for (auto& ci : inner) {
      T copy = t;
      copy.kids[i] = ci;
      out.push_back(copy);
    }
  }
}

}  // namespace

std::set<std::string> brute_force_trees(int leaves) {
  std::set<std::string> seen;
  std::queue<T> todo;
  for (const auto& t : binary(leaves))
    if (seen.insert(text(t)).second) todo.push(t);
  while (!todo.empty()) {
    const T t = todo.front();
    todo.pop();
    std::vector<T> next;
    contractions(t, next);
    for (const auto& s : next)
      if (seen.insert(text(s)).second) todo.push(s);
  }
  return seen;
}

std::vector<std::set<std::string>> reversal_components(int leaves) {
  const auto all = brute_force_trees(leaves);
  std::set<std::string> visited;
  std::vector<std::set<std::string>> comps;
  for (const auto& start : all) {
    if (visited.count(start)) continue;
    std::set<std::string> comp{start};
    std::queue<std::string> todo;
    todo.push(start);
    visited.insert(start);
    while (!todo.empty()) {
      const std::string s = todo.front();
      todo.pop();
      std::vector<T> next;
      reversals(parse(s), next);
      for (const auto& r : next) {
        const std::string rs = text(r);
        if (visited.insert(rs).second) {
          comp.insert(rs);
          todo.push(rs);
        }
      }
    }
    comps.push_back(std::move(comp));
  }
  return comps;
}

Vector spherical(const std::vector<double>& t) {
  const int dim = static_cast<int>(t.size());
  Vector x(dim + 1);
  double prod = 1.0;
  for (int k = 0; k < dim; ++k) {
    x[dim - k] = prod * std::sin(t[static_cast<std::size_t>(k)]);
    prod *= std::cos(t[static_cast<std::size_t>(k)]);
  }
  x[0] = prod;
  return x;
}

std::vector<double> elliptic_inverse(const std::vector<double>& e, const Vector& x) {
  const std::size_t k = e.size();
  auto poly = [&](double l) {
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      double p = x[static_cast<Eigen::Index>(i)] * x[static_cast<Eigen::Index>(i)];
      for (std::size_t j = 0; j < k; ++j)
        if (j != i) p *= e[j] - l;
      s += p;
    }
    return s;
  };
  std::vector<double> roots;
  for (std::size_t m = 1; m < k; ++m) {
    double lo = e[m - 1];
    double hi = e[m];
    double flo = poly(lo);
    for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(hi)); ++it) {
      const double mid = 0.5 * (lo + hi);
      const double fm = poly(mid);
      if ((fm < 0) == (flo < 0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    roots.push_back(0.5 * (lo + hi));
  }
  return roots;
}

long long killing_dimension(int n) {
  const long long pairs = static_cast<long long>(n + 1) * n / 2;
  const long long sym = pairs * (pairs + 1) / 2;
  long long four = 0;
  if (n + 1 >= 4) four = static_cast<long long>(n + 1) * n * (n - 1) * (n - 2) / 24;
  return sym - four;
}

spheresep::RationalMatrix cayley_frame(int ambient, std::uint64_t seed) {
  using Q = mpq_class;
  const std::size_t m = static_cast<std::size_t>(ambient);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> small(-3, 3);
  std::vector<std::vector<Q>> s(m, std::vector<Q>(m, 0));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      s[i][j] = Q(small(rng), 2);
      s[i][j].canonicalize();
      s[j][i] = -s[i][j];
    }
  // Solve (I + S) Y = (I - S) by Gauss-Jordan; I + S is invertible for skew S.
  std::vector<std::vector<Q>> a(m, std::vector<Q>(2 * m, 0));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      a[i][j] = (i == j ? Q(1) : Q(0)) + s[i][j];
      a[i][m + j] = (i == j ? Q(1) : Q(0)) - s[i][j];
    }
  for (std::size_t c = 0; c < m; ++c) {
    std::size_t p = c;
    while (a[p][c] == 0) ++p;
    std::swap(a[p], a[c]);
    const Q piv = a[c][c];
    for (auto& v : a[c]) v /= piv;
    for (std::size_t r = 0; r < m; ++r) {
      if (r == c || a[r][c] == 0) continue;
      const Q f = a[r][c];
      for (std::size_t j = 0; j < 2 * m; ++j) a[r][j] -= f * a[c][j];
    }
  }
  // (I+S)^{-1}(I-S) = (I-S)(I+S)^{-1} since the factors commute.
  spheresep::RationalMatrix out(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) out(i, j) = a[i][m + j];
  return out;
}

}  // namespace oracle
