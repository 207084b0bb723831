#include "spheresep/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <optional>

namespace spheresep {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

PointFrame sample_frame(int n, std::uint64_t seed, std::uint64_t index) {
  return random_point_frame(n, mix_seed(seed, index));
}

void for_each_index(std::size_t count, const std::function<void(std::size_t)>& body, Exec exec) {
  if (exec == Exec::serial) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::exception_ptr error;
  std::mutex guard;
  const auto total = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < total; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(guard);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

std::vector<PointFrame> sample_frames(int n, std::size_t count, std::uint64_t seed, Exec exec) {
  std::vector<std::optional<PointFrame>> slots(count);
  for_each_index(count, [&](std::size_t i) { slots[i].emplace(sample_frame(n, seed, i)); }, exec);
  std::vector<PointFrame> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

double max_reduce(std::size_t count, const std::function<double(std::size_t)>& f, Exec exec) {
  if (exec == Exec::serial) {
    double m = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      const double v = f(i);
      if (std::isnan(v)) return v;
      m = std::max(m, v);
    }
    return m;
  }
  std::vector<double> values(count, 0.0);
  for_each_index(count, [&](std::size_t i) { values[i] = f(i); }, Exec::parallel);
  double m = 0.0;
  for (double v : values) {
    if (std::isnan(v)) return v;
    m = std::max(m, v);
  }
  return m;
}

Matrix stack_blocks(std::size_t items, Eigen::Index rows_per_item, Eigen::Index cols,
                    const std::function<void(std::size_t, Eigen::Ref<Matrix>)>& fill, Exec exec) {
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(items) * rows_per_item, cols);
  for_each_index(
      items,
      [&](std::size_t i) {
        Matrix block = Matrix::Zero(rows_per_item, cols);
        fill(i, block);
        out.middleRows(static_cast<Eigen::Index>(i) * rows_per_item, rows_per_item) = block;
      },
      exec);
  return out;
}

}  // namespace spheresep
