#pragma once

// Exact rational arithmetic on top of GMP: scalars, small dense matrices,
// exact rank and rational orthogonal matrices via the Cayley transform.

#include <gmpxx.h>

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace spheresep {

using Rational = mpq_class;

/// Parses "p/q" or "p" (optional sign). Throws std::invalid_argument.
Rational parse_rational(std::string_view text);

/// Always "p/q", with q > 0 and the fraction reduced.
std::string format_rational(const Rational& q);

class RationalMatrix {
public:
  RationalMatrix() = default;
  RationalMatrix(std::size_t rows, std::size_t cols);

  static RationalMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Rational& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Rational& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  RationalMatrix transpose() const;
  RationalMatrix operator*(const RationalMatrix& rhs) const;
  RationalMatrix operator+(const RationalMatrix& rhs) const;
  RationalMatrix operator-(const RationalMatrix& rhs) const;
  bool operator==(const RationalMatrix& rhs) const;

  /// Gauss-Jordan inverse; throws std::domain_error when singular.
  RationalMatrix inverse() const;

  /// Exact rank by Gaussian elimination over Q.
  std::size_t rank() const;

  Eigen::MatrixXd to_double() const;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

/// R = (I - S)(I + S)^{-1} for skew-symmetric S; R is exactly orthogonal.
RationalMatrix cayley_orthogonal(const RationalMatrix& skew);

}  // namespace spheresep
