#include "support/oracles.hpp"
#include "support/properties.hpp"

#include "spheresep/tree.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace spheresep;

namespace {

std::set<std::string> texts(const std::vector<RootedPlanarTree>& ts) {
  std::set<std::string> out;
  for (const auto& t : ts) out.insert(serialize_tree(t));
  return out;
}

std::size_t parse_error_position(const std::string& text) {
  try {
    parse_tree(text);
  } catch (const TreeParseError& e) {
    return e.position();
  }
  return std::string::npos;
}

}  // namespace

TEST_SUITE("tree") {

TEST_CASE("grammar round-trips") {
  for (const std::string s : {"*", "(*,*)", "((*,*),*)", "(*,(*,*,*),(*,*))", "(((*,*),*),*,*)"})
    CHECK(serialize_tree(parse_tree(s)) == s);
  CHECK(serialize_tree(RootedPlanarTree::left_comb(4)) == "(((*,*),*),*)");
  CHECK(serialize_tree(RootedPlanarTree::right_comb(4)) == "(*,(*,(*,*)))");
  CHECK(serialize_tree(RootedPlanarTree::corolla(3)) == "(*,*,*)");
}

TEST_CASE("parse errors carry the offending position") {
  CHECK(parse_error_position("((*,*)*)") == 6);
  CHECK(parse_error_position("") == 0);
  CHECK(parse_error_position("(*)") == 2);
  CHECK(parse_error_position("(*, *)") == 3);
  CHECK(parse_error_position("(*,*)x") == 5);
  CHECK(parse_error_position("(*,*") == 4);
  CHECK(parse_error_position("x") == 0);
}

TEST_CASE("structure queries") {
  const auto t = parse_tree("(*,(*,*,*),(*,*))");
  CHECK(t.leaf_count() == 6);
  CHECK(t.internal_count() == 3);
  CHECK(t.moduli_count() == 2);
  CHECK(serialize_tree(t.at({1})) == "(*,*,*)");
  CHECK(t.internal_paths() == std::vector<NodePath>{{}, {1}, {2}});
  CHECK_THROWS_AS(t.at({5}), std::out_of_range);
  CHECK(format_path({0, 2}) == "0.2");
  CHECK(parse_path("0.2") == NodePath{0, 2});
  CHECK(parse_path("").empty());
  CHECK_THROWS_AS(parse_path("0..1"), std::invalid_argument);
  CHECK_THROWS_AS(RootedPlanarTree::node({RootedPlanarTree::leaf()}), std::invalid_argument);
}

TEST_CASE("face counts match the closed formula and brute force") {
  for (int leaves = 2; leaves <= 9; ++leaves) {
    const auto counts = count_faces(leaves);
    std::uint64_t total = 0;
    for (int m = 0; m <= leaves - 2; ++m) {
      CAPTURE(leaves);
      CAPTURE(m);
      CHECK(counts.at(m) == oracle::kirkman_cayley(leaves, m));
      total += counts.at(m);
    }
    CHECK(counts.at(leaves - 2) == catalan(leaves - 1));
    CHECK(total == oracle::brute_force_trees(leaves).size());
  }
}

TEST_CASE("enumeration is exactly the brute-force set") {
  for (int leaves = 2; leaves <= 7; ++leaves) {
    const auto all = enumerate_all_trees(leaves);
    CHECK(texts(all) == oracle::brute_force_trees(leaves));
    CHECK(std::is_sorted(all.begin(), all.end(),
                         [](const auto& a, const auto& b) { return serialize_tree(a) < serialize_tree(b); }));
    for (int m = 0; m <= leaves - 2; ++m)
      for (const auto& t : enumerate_trees(leaves, m)) {
        const auto f = FaceDescriptor::of(t);
        CHECK(f.inner_nonroot == m);
        CHECK(f.dimension == leaves - 2 - m);
        CHECK(f.dimension == t.moduli_count());
      }
  }
  CHECK_THROWS_AS(enumerate_trees(4, 3), std::out_of_range);
}

TEST_CASE("small counts") {
  const auto k4 = count_faces(4);
  CHECK(k4.at(0) == 1);
  CHECK(k4.at(1) == 5);
  CHECK(k4.at(2) == 5);
  CHECK(count_faces(5).at(3) == 14);
  CHECK(tile_count(2) == 3);
  CHECK(tile_count(3) == 12);
  std::uint64_t f = 1;
  for (int n = 1; n <= 12; ++n) {
    f *= static_cast<std::uint64_t>(n + 1);
    CHECK(tile_count(n) == f / 2);
  }
  CHECK(catalan(10) == 16796);
  CHECK_THROWS_AS(count_faces(60), std::overflow_error);
}

TEST_CASE("dyslectic classes are the reversal components") {
  CHECK(dyslectic_classes(3).size() == 2);
  for (int leaves = 2; leaves <= 6; ++leaves) {
    const auto comps = oracle::reversal_components(leaves);
    CHECK(dyslectic_classes(leaves).size() == comps.size());
    for (const auto& comp : comps) {
      std::set<std::string> canon;
      for (const auto& s : comp) {
        const auto t = parse_tree(s);
        const auto c = dyslectic_canonical(t);
        CHECK(dyslectic_canonical(c) == c);
        CHECK(dyslectic_equivalent(t, c));
        canon.insert(serialize_tree(c));
      }
      CHECK(canon.size() == 1);
    }
  }
  CHECK(dyslectic_equivalent(parse_tree("((*,*),*)"), parse_tree("(*,(*,*))")));
  CHECK_FALSE(dyslectic_equivalent(parse_tree("((*,*),*)"), parse_tree("(*,*,*)")));
  CHECK(mirror(parse_tree("((*,*,*),*)")) == parse_tree("(*,(*,*,*))"));
  CHECK(reverse_at(parse_tree("((*,(*,*)),*)"), {0}) == parse_tree("(((*,*),*),*)"));
}

TEST_CASE("grafting") {
  const auto leaf = RootedPlanarTree::leaf();
  const auto c2 = RootedPlanarTree::corolla(2);
  const auto t = parse_tree("(*,(*,*,*))");
  CHECK(graft(leaf, std::vector<RootedPlanarTree>{t}) == t);
  CHECK(serialize_tree(graft(c2, std::vector<RootedPlanarTree>{c2, leaf})) == "((*,*),*)");
  CHECK_THROWS_AS(graft(c2, std::vector<RootedPlanarTree>{c2}), std::invalid_argument);

  // Every binary tree is an iterated graft of 2-corollas.
  std::vector<std::set<std::string>> reach(8);
  reach[1] = {"*"};
  for (int l = 2; l <= 7; ++l)
    for (int a = 1; a < l; ++a)
      for (const auto& x : reach[static_cast<std::size_t>(a)])
        for (const auto& y : reach[static_cast<std::size_t>(l - a)])
          reach[static_cast<std::size_t>(l)].insert(
              serialize_tree(graft(c2, std::vector<RootedPlanarTree>{parse_tree(x), parse_tree(y)})));
  for (int l = 2; l <= 7; ++l) CHECK(texts(enumerate_trees(l, l - 2)) == reach[static_cast<std::size_t>(l)]);
}

TEST_CASE("operad axioms for grafting, exhaustive up to 5 leaves") {
  const auto t = props::graft_axioms(5);
  CHECK_MESSAGE(t.identity.ok(), t.identity.first_failure);
  CHECK_MESSAGE(t.associativity.ok(), t.associativity.first_failure);
  CHECK_MESSAGE(t.equivariance.ok(), t.equivariance.first_failure);
}

TEST_CASE("labelled trees") {
  const auto x = LabelledTree::plain(parse_tree("((*,*),*)"));
  CHECK(x.labels == std::vector<int>{0, 1, 2});
  const Permutation pi({1, 2, 0});
  CHECK(act(x, pi).labels == std::vector<int>{2, 0, 1});
  CHECK(act(act(x, pi), pi.inverse()) == x);
  const std::vector<LabelledTree> ins{LabelledTree::plain(parse_tree("(*,*)")), LabelledTree::plain(RootedPlanarTree::leaf()),
                                      LabelledTree::plain(RootedPlanarTree::leaf())};
  const auto y = act(x, pi);
  const auto c = compose(y, ins);
  CHECK(serialize_tree(c.tree) == "((*,(*,*)),*)");
  CHECK(c.labels == std::vector<int>{3, 0, 1, 2});
}

}  // TEST_SUITE
