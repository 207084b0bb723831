#include "spheresep/permutation.hpp"

#include <numeric>
#include <stdexcept>
#include <utility>

namespace spheresep {

Permutation::Permutation(std::vector<int> images) : images_(std::move(images)) {
  std::vector<bool> seen(images_.size(), false);
  for (int v : images_) {
    if (v < 0 || v >= static_cast<int>(images_.size()) || seen[static_cast<std::size_t>(v)])
      throw std::invalid_argument("Permutation: images are not a permutation of 0..m-1");
    seen[static_cast<std::size_t>(v)] = true;
  }
}

Permutation Permutation::identity(int size) {
  std::vector<int> v(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i) v[static_cast<std::size_t>(i)] = i;
  return Permutation(std::move(v));
}

Permutation Permutation::swap(int size, int a, int b) {
  auto p = identity(size).images_;
  std::swap(p.at(static_cast<std::size_t>(a)), p.at(static_cast<std::size_t>(b)));
  return Permutation(std::move(p));
}

Permutation Permutation::operator*(const Permutation& other) const {
  if (other.size() != size()) throw std::invalid_argument("Permutation: size mismatch");
  std::vector<int> v(images_.size());
  for (int i = 0; i < size(); ++i) v[static_cast<std::size_t>(i)] = (*this)(other(i));
  return Permutation(std::move(v));
}

Permutation Permutation::inverse() const {
  std::vector<int> v(images_.size());
  for (int i = 0; i < size(); ++i) v[static_cast<std::size_t>((*this)(i))] = i;
  return Permutation(std::move(v));
}

Eigen::MatrixXd Permutation::matrix() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(size(), size());
  for (int i = 0; i < size(); ++i) m((*this)(i), i) = 1.0;
  return m;
}

Permutation block_permutation(const Permutation& pi, std::span<const int> sizes) {
  if (static_cast<int>(sizes.size()) != pi.size()) throw std::invalid_argument("block_permutation: size mismatch");
  std::vector<int> old_offset(sizes.size(), 0);
  for (std::size_t i = 1; i < sizes.size(); ++i) old_offset[i] = old_offset[i - 1] + sizes[i - 1];
  std::vector<int> images;
  for (int i = 0; i < pi.size(); ++i) {
    const auto src = static_cast<std::size_t>(pi(i));
    for (int r = 0; r < sizes[src]; ++r) images.push_back(old_offset[src] + r);
  }
  return Permutation(std::move(images));
}

Permutation block_product(std::span<const Permutation> parts) {
  std::vector<int> images;
  int offset = 0;
  for (const auto& p : parts) {
    for (int r = 0; r < p.size(); ++r) images.push_back(offset + p(r));
    offset += p.size();
  }
  return Permutation(std::move(images));
}

}  // namespace spheresep
