#pragma once

// Rooted planar trees: the labels of faces of the Stasheff polytopes and the
// recipes for separable charts. Text grammar (bit-exact):
//
//   Tree := "*" | "(" Tree ("," Tree)+ ")"
//
// No whitespace is accepted. Trees are totally ordered by their text.

#include "spheresep/permutation.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace spheresep {

/// Child-index path from the root; the empty path is the root.
using NodePath = std::vector<int>;

/// "" for the root, otherwise indices joined by '.', e.g. "0.2".
std::string format_path(const NodePath& path);
NodePath parse_path(std::string_view text);

class RootedPlanarTree {
public:
  static RootedPlanarTree leaf();
  /// Throws std::invalid_argument for fewer than two children.
  static RootedPlanarTree node(std::vector<RootedPlanarTree> children);

  static RootedPlanarTree corolla(int leaves);
  /// ((..((*,*),*)..),*)
  static RootedPlanarTree left_comb(int leaves);
  /// (*,(*,(..(*,*)..)))
  static RootedPlanarTree right_comb(int leaves);

  bool is_leaf() const { return children_.empty(); }
  const std::vector<RootedPlanarTree>& children() const { return children_; }
  int arity() const { return static_cast<int>(children_.size()); }

  int leaf_count() const;
  int internal_count() const;
  /// Sum over internal nodes of (arity - 2).
  int moduli_count() const;

  /// Subtree at `path`; throws std::out_of_range for invalid paths.
  const RootedPlanarTree& at(const NodePath& path) const;

  /// Paths of all internal nodes in preorder.
  std::vector<NodePath> internal_paths() const;

  std::string to_string() const;

  bool operator==(const RootedPlanarTree&) const = default;

private:
  std::vector<RootedPlanarTree> children_;
};

/// Syntax error with the 0-based offset of the offending character.
class TreeParseError : public std::invalid_argument {
public:
  TreeParseError(const std::string& what, std::size_t position)
      : std::invalid_argument(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const { return position_; }

private:
  std::size_t position_;
};

RootedPlanarTree parse_tree(std::string_view text);
std::string serialize_tree(const RootedPlanarTree& tree);

/// Codimension data of the face of K_L a tree labels.
struct FaceDescriptor {
  RootedPlanarTree tree;
  int leaves = 0;
  int inner_nonroot = 0;
  int dimension = 0;  ///< (L - 2) - m

  static FaceDescriptor of(const RootedPlanarTree& tree);
};

/// All trees with `leaves` leaves and inner_nonroot + 1 internal nodes,
/// sorted by text. Requires leaves >= 2 and 0 <= inner_nonroot <= leaves - 2.
std::vector<RootedPlanarTree> enumerate_trees(int leaves, int inner_nonroot);

/// All trees with `leaves` leaves (every m), sorted by text.
std::vector<RootedPlanarTree> enumerate_all_trees(int leaves);

/// Reverses the child order of the node at `path`.
RootedPlanarTree reverse_at(const RootedPlanarTree& tree, const NodePath& path);

/// Reverses every node, i.e. the planar mirror image.
RootedPlanarTree mirror(const RootedPlanarTree& tree);

/// Recursively canonical children, then the smaller (by text) of the child
/// sequence and its reversal.
RootedPlanarTree dyslectic_canonical(const RootedPlanarTree& tree);

bool dyslectic_equivalent(const RootedPlanarTree& a, const RootedPlanarTree& b);

/// Distinct canonical forms among the trees with `leaves` leaves.
std::vector<RootedPlanarTree> dyslectic_classes(int leaves);

/// Replaces the leaves of `tree` left to right by `subtrees`.
/// Throws std::invalid_argument on arity mismatch.
RootedPlanarTree graft(const RootedPlanarTree& tree, std::span<const RootedPlanarTree> subtrees);

/// m -> number of trees with L leaves and m inner non-root nodes, computed
/// by memoized counting in checked 64-bit arithmetic (std::overflow_error).
std::map<int, std::uint64_t> count_faces(int leaves);

std::uint64_t catalan(int n);

/// (n+1)!/2, the number of Stasheff tiles K_{n+1} of the normal-form space.
std::uint64_t tile_count(int n);

// ---------------------------------------------------------------------------
// Leaf-labelled trees: the symmetric operad generated by planar grafting.

/// A planar tree whose leaf at planar position p carries input label labels[p].
struct LabelledTree {
  RootedPlanarTree tree;
  std::vector<int> labels;

  static LabelledTree plain(RootedPlanarTree tree);
  bool operator==(const LabelledTree&) const = default;
};

/// x * pi: labels'[p] = pi^{-1}(labels[p]).
LabelledTree act(const LabelledTree& x, const Permutation& pi);

/// Leaf p of y receives the input labelled y.labels[p]; leaves of input i are
/// relabelled by the offset n_0 + ... + n_{i-1}.
LabelledTree compose(const LabelledTree& y, std::span<const LabelledTree> inputs);

}  // namespace spheresep
