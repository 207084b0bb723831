#include "support/oracles.hpp"

#include "spheresep/chart.hpp"
#include "spheresep/errors.hpp"
#include "spheresep/integrability.hpp"
#include "spheresep/sampling.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

using namespace spheresep;

namespace {

double worst(const std::array<double, 3>& a) { return std::max({a[0], a[1], a[2]}); }

BivectorForm elliptic(std::vector<double> e) { return elliptic_form(e).form(); }

}  // namespace

TEST_SUITE("integrability") {

TEST_CASE("Nijenhuis conditions are void on S^2") {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto f = BivectorForm::random(2, s);
    const auto p = random_point_frame(2, 1000 + s);
    CHECK(worst(nijenhuis_residual(f, p)) < 1e-12);
  }
}

TEST_CASE("elliptic forms pass and generic forms fail the Nijenhuis conditions") {
  const auto e3 = elliptic({0, 1, 3, 7});
  const auto e4 = elliptic({-2, 0.5, 1, 4, 9});
  for (std::uint64_t s = 0; s < 30; ++s) {
    CHECK(worst(nijenhuis_residual(e3, sample_frame(3, 11, s))) < 1e-10);
    CHECK(worst(nijenhuis_residual(e4, sample_frame(4, 12, s))) < 1e-10);
  }
  double generic = 0.0;
  for (std::uint64_t s = 0; s < 30; ++s)
    generic = std::max(generic, worst(nijenhuis_residual(BivectorForm::random(3, 5), sample_frame(3, 13, s))));
  CHECK(generic > 1e-3);
}

TEST_CASE("Nijenhuis residuals are invariant under isometries") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto f = BivectorForm::random(3, s);
    const auto p = random_point_frame(3, 400 + s);
    const Matrix r = oracle::cayley_frame(4, 900 + s).to_double();
    const auto a = nijenhuis_residual(f, p);
    const auto b = nijenhuis_residual(act_isometry(f, r), p.transformed(r));
    for (int i = 0; i < 3; ++i) CHECK(std::abs(a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)]) < 1e-9);
  }
}

TEST_CASE("residuals do not depend on the tangent frame") {
  const auto f = BivectorForm::random(4, 3);
  const auto p = random_point_frame(4, 8);
  const auto q = orthonormal_frame(SpherePoint(p.x()), 99);
  CHECK(std::abs(killing_residual(f, p) - killing_residual(f, q)) < 1e-12);
  const auto a = nijenhuis_residual(f, p);
  const auto b = nijenhuis_residual(f, q);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)]) < 1e-9);
}

TEST_CASE("eigen-simplicity") {
  const auto p = random_point_frame(3, 1);
  CHECK_FALSE(eigen_simplicity(BivectorForm::identity(3), p, 1e-8));
  CHECK(eigen_simplicity(elliptic({0, 1, 3, 7}), p, 1e-8));
  const Vector ev = killing_eigenvalues(BivectorForm::identity(3), p);
  CHECK((ev - Vector::Ones(3)).norm() < 1e-12);
}

TEST_CASE("the Plucker kernel evaluates to zero everywhere") {
  for (int n = 1; n <= 5; ++n) {
    const Matrix ker = plucker_kernel(n);
    const long long expected = n + 1 >= 4 ? static_cast<long long>(n + 1) * n * (n - 1) * (n - 2) / 24 : 0;
    CHECK(ker.cols() == expected);
    for (Eigen::Index c = 0; c < ker.cols(); ++c) {
      const auto f = BivectorForm::from_coordinates(n, ker.col(c));
      for (std::uint64_t s = 0; s < 5; ++s) CHECK(eval_killing(f, sample_frame(n, 3, s)).norm() < 1e-12);
    }
    const Matrix q = killing_quotient_basis(n);
    CHECK(q.cols() == killing_space_dimension(n));
    CHECK((q.transpose() * q - Matrix::Identity(q.cols(), q.cols())).norm() < 1e-12);
    if (ker.cols() > 0) CHECK((q.transpose() * ker).norm() < 1e-12);
  }
}

TEST_CASE("the quotient basis maps injectively to Killing tensors") {
  for (int n = 2; n <= 4; ++n) {
    const Matrix q = killing_quotient_basis(n);
    const int per = n * (n + 1) / 2;
    const int points = 12;
    Matrix m(points * per, q.cols());
    for (Eigen::Index c = 0; c < q.cols(); ++c) {
      const auto f = BivectorForm::from_coordinates(n, q.col(c));
      for (int s = 0; s < points; ++s) {
        const Matrix k = eval_killing(f, sample_frame(n, 17, static_cast<std::uint64_t>(s)));
        int r = s * per;
        for (int a = 0; a < n; ++a)
          for (int b = a; b < n; ++b) m(r++, c) = k(a, b);
      }
    }
    const Vector sv = Eigen::JacobiSVD<Matrix>(m).singularValues();
    CHECK(sv[sv.size() - 1] / sv[0] > 1e-6);
  }
}

TEST_CASE("Staeckel extraction from elliptic forms") {
  for (const auto& e : std::vector<std::vector<double>>{{0, 1, 4}, {0, 1, 3, 7}, {0, 0.5, 2, 3, 5}}) {
    const int n = static_cast<int>(e.size()) - 1;
    const auto form = elliptic(e);
    const auto sys = stackel_from_killing(form, default_sample_count(n), 21);
    CHECK(static_cast<int>(sys.basis().size()) == n);
    CHECK(sys.gap_ratio >= 1e6);
    CHECK(sys.contains_metric());
    CHECK(sys.metric_distance() < 1e-10);
    CHECK(sys.raw_nullity == n + static_cast<int>(plucker_kernel(n).cols()));
    const auto rep = verify_stackel(sys, 20, 12345);
    CHECK(rep.pass);
    CHECK(rep.max_residual() < 1e-9);
    // The form itself lies in the extracted span.
    const Matrix c = sys.coordinate_matrix();
    const Matrix qb = killing_quotient_basis(n);
    const Vector v = qb * (qb.transpose() * form.coordinates());
    const Vector resid = v - c * c.colPivHouseholderQr().solve(v);
    CHECK(resid.norm() < 1e-9 * v.norm());
  }
}

TEST_CASE("extraction preconditions and rank failures") {
  CHECK_THROWS_AS(stackel_from_killing(BivectorForm::identity(3), 30, 1), PreconditionError);
  CHECK_THROWS_AS(stackel_from_killing(BivectorForm::random(3, 2), 30, 1), PreconditionError);
  CHECK_THROWS_AS(stackel_from_killing(elliptic({0, 1, 3, 7}), 1, 1), RankError);
  try {
    stackel_from_killing(elliptic({0, 1, 3, 7}), 1, 1);
  } catch (const RankError& e) {
    CHECK_FALSE(e.singular_values.empty());
  }
}

TEST_CASE("verify_stackel rejects incomplete or non-commuting candidates") {
  const auto e = elliptic({0, 1, 3, 7});
  const auto short_basis = StackelSystem::unchecked(3, {BivectorForm::identity(3), e});
  const auto rep = verify_stackel(short_basis, 10, 3);
  CHECK_FALSE(rep.dimension_ok);
  CHECK_FALSE(rep.pass);

  const auto mixed = StackelSystem::unchecked(
      3, {BivectorForm::identity(3), e, act_isometry(e, oracle::cayley_frame(4, 5).to_double())});
  const auto rep2 = verify_stackel(mixed, 10, 3);
  CHECK(rep2.commutation_max > 1e-3);
  CHECK_FALSE(rep2.pass);

  CHECK_THROWS_AS(StackelSystem(3, {BivectorForm::identity(3), e, e}), PreconditionError);
  CHECK_THROWS_AS(StackelSystem(3, {e, BivectorForm::random(3, 1), BivectorForm::random(3, 9)}), PreconditionError);
}

TEST_CASE("verify_form reports") {
  const auto id = verify_form(BivectorForm::identity(3), 10, 1);
  CHECK(id.pass);
  CHECK_FALSE(id.eigen_simple);
  CHECK(id.max_residual() < 1e-12);
  CHECK(verify_form(elliptic({0, 1, 3, 7}), 10, 1).pass);
  const auto rnd = verify_form(BivectorForm::random(3, 4), 10, 1);
  CHECK_FALSE(rnd.pass);
  CHECK(rnd.nijenhuis_max[0] > 1e-3);
  CHECK(rnd.killing_max < 1e-12);
}

TEST_CASE("principal angles") {
  Matrix a = Matrix::Zero(3, 1);
  a(0, 0) = 1.0;
  Matrix b = Matrix::Zero(3, 1);
  b(1, 0) = 1.0;
  CHECK(std::abs(principal_angles(a, b)[0] - std::numbers::pi / 2) < 1e-15);
  Matrix c(3, 1);
  c << 1.0, 1.0, 0.0;
  CHECK(std::abs(principal_angles(a, c)[0] - std::numbers::pi / 4) < 1e-15);
  const Matrix q = killing_quotient_basis(3).leftCols(4);
  for (double t : principal_angles(q, q * Matrix::Random(4, 4))) CHECK(t < 1e-10);
}

TEST_CASE("normal forms and the permutation action") {
  const auto d = elliptic_form(std::vector<double>{0, 1, 4});
  CHECK(d.entry(0, 1) == doctest::Approx(0.5));
  CHECK(d.entry(0, 2) == doctest::Approx(2.0));
  CHECK(d.entry(1, 2) == doctest::Approx(2.5));
  const Permutation sigma({2, 0, 1});
  const auto moved = act_permutation(d, sigma);
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) CHECK(moved.entry(sigma(i), sigma(j)) == d.entry(i, j));
  CHECK((act_permutation(d.form(), sigma).matrix() - moved.form().matrix()).norm() < 1e-15);

  const auto sys = stackel_from_killing(elliptic({0, 1, 3, 7}), default_sample_count(3), 4);
  const auto permuted = act_permutation(sys, Permutation({3, 1, 0, 2}));
  CHECK(verify_stackel(permuted, 20, 77).pass);
}

TEST_CASE("serial and parallel kernels agree bitwise") {
  const auto f = elliptic({0, 1, 3, 7});
  const auto a = verify_form(f, 40, 9, {}, Exec::serial);
  const auto b = verify_form(f, 40, 9, {}, Exec::parallel);
  CHECK(a.killing_max == b.killing_max);
  CHECK(a.nijenhuis_max == b.nijenhuis_max);
  const auto s1 = stackel_from_killing(f, 60, 5, {}, Exec::serial);
  const auto s2 = stackel_from_killing(f, 60, 5, {}, Exec::parallel);
  CHECK(s1.coordinate_matrix() == s2.coordinate_matrix());
  CHECK(s1.singular_values == s2.singular_values);
  const auto fa = sample_frames(3, 20, 4, Exec::serial);
  const auto fb = sample_frames(3, 20, 4, Exec::parallel);
  for (std::size_t i = 0; i < fa.size(); ++i) CHECK(fa[i].frame() == fb[i].frame());
}

TEST_CASE("max_reduce propagates NaN") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (auto exec : {Exec::serial, Exec::parallel}) {
    CHECK(std::isnan(max_reduce(10, [&](std::size_t i) { return i == 3 ? nan : 1.0; }, exec)));
    CHECK(max_reduce(10, [](std::size_t i) { return static_cast<double>(i); }, exec) == 9.0);
    CHECK(max_reduce(0, [](std::size_t) { return 1.0; }, exec) == 0.0);
  }
}

TEST_CASE("worker exceptions reach the caller") {
  CHECK_THROWS_AS(for_each_index(
                      100, [](std::size_t i) { if (i == 57) throw NumericalError("boom"); }, Exec::parallel),
                  NumericalError);
}

}  // TEST_SUITE
