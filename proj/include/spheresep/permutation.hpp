#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace spheresep {

/// A permutation of {0, ..., m-1}; sigma[i] is the image of i.
class Permutation {
public:
  explicit Permutation(std::vector<int> images);
  static Permutation identity(int size);
  /// Transposition of a and b.
  static Permutation swap(int size, int a, int b);

  int size() const { return static_cast<int>(images_.size()); }
  int operator()(int i) const { return images_.at(static_cast<std::size_t>(i)); }
  const std::vector<int>& images() const { return images_; }

  /// (this * other)(i) = this(other(i)).
  Permutation operator*(const Permutation& other) const;
  Permutation inverse() const;
  bool operator==(const Permutation&) const = default;

  /// Matrix with P e_i = e_{sigma(i)}.
  Eigen::MatrixXd matrix() const;

private:
  std::vector<int> images_;
};

/// Permutes k consecutive blocks of the given sizes: block i of the result
/// is block pi(i) of the input, i.e. result(c) for a coordinate c in new
/// block i at offset r is (offset of old block pi(i)) + r.
Permutation block_permutation(const Permutation& pi, std::span<const int> sizes);

/// pi_1 x ... x pi_k acting blockwise on consecutive blocks.
Permutation block_product(std::span<const Permutation> parts);

}  // namespace spheresep
