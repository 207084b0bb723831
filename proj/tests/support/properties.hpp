#pragma once

// Property sweeps shared by the unit tests and the acceptance run.

#include "spheresep/chart.hpp"
#include "spheresep/tree.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace props {

/// The single leaf for L = 1, otherwise enumerate_all_trees(L).
std::vector<spheresep::RootedPlanarTree> trees_with(int leaves);

/// Every sequence of `count` trees whose leaf counts sum to at most `budget`.
std::vector<std::vector<spheresep::RootedPlanarTree>> tree_tuples(int count, int budget);

struct LawTally {
  long checked = 0;
  long failed = 0;
  std::string first_failure;
  bool ok() const { return checked > 0 && failed == 0; }
};

struct OperadTallies {
  LawTally identity;
  LawTally associativity;
  LawTally equivariance;
};

/// The operad axioms for compose/act on leaf-labelled trees, exhaustively
/// over all shapes whose composite has at most max_leaves leaves.
OperadTallies graft_axioms(int max_leaves);

struct ComposeDeviations {
  double identity = 0.0;
  double associativity = 0.0;
  double equivariance = 0.0;
};

/// Pointwise deviations of the same laws for sphere_compose on random small
/// charts (spheres S^0 .. S^3) at random interior points.
ComposeDeviations sphere_compose_laws(int instances, std::uint64_t seed);

/// Random chart on S^{k-1}: unit, arc or elliptic with random moduli.
spheresep::Chart random_block(int k, std::uint64_t seed);

}  // namespace props
