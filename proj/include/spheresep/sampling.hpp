#pragma once

// Point-sampling kernels. Every kernel has an OpenMP path and a serial
// reference path selected by Exec; both produce bit-identical results
// because each sample draws from its own seed stream and reductions are
// max-reductions (or disjoint writes).

#include "spheresep/bivector.hpp"

#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <vector>

namespace spheresep {

enum class Exec { serial, parallel };

/// SplitMix64 finalizer; derives independent per-sample seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

/// Frame number `index` of the stream identified by `seed`.
PointFrame sample_frame(int n, std::uint64_t seed, std::uint64_t index);

std::vector<PointFrame> sample_frames(int n, std::size_t count, std::uint64_t seed,
                                      Exec exec = Exec::parallel);

/// Runs body(i) for i in [0, count). The first exception thrown by any
/// iteration is rethrown after the loop.
void for_each_index(std::size_t count, const std::function<void(std::size_t)>& body, Exec exec);

/// max_i f(i) over [0, count); 0 for count == 0, NaN if any f(i) is NaN.
double max_reduce(std::size_t count, const std::function<double(std::size_t)>& f, Exec exec);

/// Stacks `items` blocks of `rows_per_item` rows each. fill(i, block) writes
/// block i, a rows_per_item x cols view.
Matrix stack_blocks(std::size_t items, Eigen::Index rows_per_item, Eigen::Index cols,
                    const std::function<void(std::size_t, Eigen::Ref<Matrix>)>& fill, Exec exec);

}  // namespace spheresep
