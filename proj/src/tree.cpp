#include "spheresep/tree.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <tuple>
#include <utility>

namespace spheresep {

std::string format_path(const NodePath& path) {
  std::string s;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i > 0) s += '.';
    s += std::to_string(path[i]);
  }
  return s;
}

NodePath parse_path(std::string_view text) {
  NodePath path;
  if (text.empty()) return path;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = text.find('.', start);
    const std::string_view part = text.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start);
    int value = -1;
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
    if (ec != std::errc() || ptr != part.data() + part.size() || part.empty() || value < 0)
      throw std::invalid_argument("malformed node path '" + std::string(text) + "'");
    path.push_back(value);
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return path;
}

// ---------------------------------------------------------------------------

RootedPlanarTree RootedPlanarTree::leaf() { return RootedPlanarTree{}; }

RootedPlanarTree RootedPlanarTree::node(std::vector<RootedPlanarTree> children) {
  if (children.size() < 2) throw std::invalid_argument("internal node needs at least two children");
  RootedPlanarTree t;
  t.children_ = std::move(children);
  return t;
}

RootedPlanarTree RootedPlanarTree::corolla(int leaves) {
  if (leaves < 2) throw std::invalid_argument("corolla needs at least two leaves");
  return node(std::vector<RootedPlanarTree>(static_cast<std::size_t>(leaves), leaf()));
}

RootedPlanarTree RootedPlanarTree::left_comb(int leaves) {
  if (leaves < 2) throw std::invalid_argument("comb needs at least two leaves");
  RootedPlanarTree t = node({leaf(), leaf()});
  for (int l = 3; l <= leaves; ++l) t = node({std::move(t), leaf()});
  return t;
}

RootedPlanarTree RootedPlanarTree::right_comb(int leaves) {
  if (leaves < 2) throw std::invalid_argument("comb needs at least two leaves");
  RootedPlanarTree t = node({leaf(), leaf()});
  for (int l = 3; l <= leaves; ++l) t = node({leaf(), std::move(t)});
  return t;
}

int RootedPlanarTree::leaf_count() const {
  if (is_leaf()) return 1;
  int total = 0;
  for (const auto& c : children_) total += c.leaf_count();
  return total;
}

int RootedPlanarTree::internal_count() const {
  if (is_leaf()) return 0;
  int total = 1;
  for (const auto& c : children_) total += c.internal_count();
  return total;
}

int RootedPlanarTree::moduli_count() const {
  if (is_leaf()) return 0;
  int total = arity() - 2;
  for (const auto& c : children_) total += c.moduli_count();
  return total;
}

const RootedPlanarTree& RootedPlanarTree::at(const NodePath& path) const {
  const RootedPlanarTree* t = this;
  for (int i : path) {
    if (i < 0 || i >= t->arity()) throw std::out_of_range("node path '" + format_path(path) + "' leaves the tree");
    t = &t->children_[static_cast<std::size_t>(i)];
  }
  return *t;
}

std::vector<NodePath> RootedPlanarTree::internal_paths() const {
  std::vector<NodePath> out;
  NodePath cur;
  auto walk = [&](auto&& self, const RootedPlanarTree& t) -> void {
    if (t.is_leaf()) return;
    out.push_back(cur);
    for (int i = 0; i < t.arity(); ++i) {
      cur.push_back(i);
      self(self, t.children_[static_cast<std::size_t>(i)]);
      cur.pop_back();
    }
  };
  walk(walk, *this);
  return out;
}

std::string RootedPlanarTree::to_string() const {
  if (is_leaf()) return "*";
  std::string s = "(";
  for (std::size_t i = 0; i < children_.size(); ++i) {
    if (i > 0) s += ',';
    s += children_[i].to_string();
  }
  s += ')';
  return s;
}

// ---------------------------------------------------------------------------

namespace {

class TreeParser {
public:
  explicit TreeParser(std::string_view text) : text_(text) {}

  RootedPlanarTree parse() {
    RootedPlanarTree t = tree();
    if (pos_ != text_.size()) throw TreeParseError("trailing characters", pos_);
    return t;
  }

private:
  RootedPlanarTree tree() {
    if (pos_ >= text_.size()) throw TreeParseError("unexpected end of input, expected '*' or '('", pos_);
    const char c = text_[pos_];
    if (c == '*') {
      ++pos_;
      return RootedPlanarTree::leaf();
    }
    if (c != '(') throw TreeParseError(std::string("unexpected character '") + c + "', expected '*' or '('", pos_);
    const std::size_t open = pos_++;
    std::vector<RootedPlanarTree> children;
    children.push_back(tree());
    while (pos_ < text_.size() && text_[pos_] == ',') {
      ++pos_;
      children.push_back(tree());
    }
    if (pos_ >= text_.size()) throw TreeParseError("unbalanced parenthesis opened at " + std::to_string(open), pos_);
    if (text_[pos_] != ')')
      throw TreeParseError(std::string("unexpected character '") + text_[pos_] + "', expected ',' or ')'", pos_);
    if (children.size() < 2) throw TreeParseError("internal node with fewer than two children, expected ','", pos_);
    ++pos_;
    return RootedPlanarTree::node(std::move(children));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

RootedPlanarTree parse_tree(std::string_view text) { return TreeParser(text).parse(); }

std::string serialize_tree(const RootedPlanarTree& tree) { return tree.to_string(); }

FaceDescriptor FaceDescriptor::of(const RootedPlanarTree& tree) {
  FaceDescriptor f;
  f.tree = tree;
  f.leaves = tree.leaf_count();
  f.inner_nonroot = std::max(0, tree.internal_count() - 1);
  f.dimension = (f.leaves - 2) - f.inner_nonroot;
  return f;
}

// ---------------------------------------------------------------------------
// Enumeration: trees with L leaves and I internal nodes are a leaf (L=1, I=0)
// or a root over a sequence of k >= 2 trees with leaf/internal totals (L, I-1).

namespace {

using TreeList = std::vector<RootedPlanarTree>;

class TreeGenerator {
public:
  const TreeList& trees(int leaves, int internal) {
    const auto key = std::make_pair(leaves, internal);
    if (auto it = trees_.find(key); it != trees_.end()) return it->second;
    TreeList out;
    if (leaves == 1 && internal == 0) {
      out.push_back(RootedPlanarTree::leaf());
    } else if (leaves >= 2 && internal >= 1 && internal <= leaves - 1) {
      for (int k = 2; k <= leaves; ++k)
        for (auto& seq : forests(k, leaves, internal - 1)) out.push_back(RootedPlanarTree::node(std::move(seq)));
    }
    return trees_.emplace(key, std::move(out)).first->second;
  }

private:
  // Sequences of k trees with the given totals.
  std::vector<TreeList> forests(int k, int leaves, int internal) {
    std::vector<TreeList> out;
    if (k == 0) {
      if (leaves == 0 && internal == 0) out.emplace_back();
      return out;
    }
    if (leaves < k) return out;
    for (int l = 1; l <= leaves - (k - 1); ++l)
      for (int i = 0; i <= internal; ++i) {
        const TreeList& heads = trees(l, i);
        if (heads.empty()) continue;
        const auto tails = forests(k - 1, leaves - l, internal - i);
        for (const auto& h : heads)
          for (const auto& tail : tails) {
            TreeList seq;
            seq.reserve(tail.size() + 1);
            seq.push_back(h);
            seq.insert(seq.end(), tail.begin(), tail.end());
            out.push_back(std::move(seq));
          }
      }
    return out;
  }

  std::map<std::pair<int, int>, TreeList> trees_;
};

void sort_by_text(TreeList& trees) {
  std::vector<std::pair<std::string, std::size_t>> keys;
  keys.reserve(trees.size());
  for (std::size_t i = 0; i < trees.size(); ++i) keys.emplace_back(trees[i].to_string(), i);
  std::sort(keys.begin(), keys.end());
  TreeList sorted;
  sorted.reserve(trees.size());
  for (const auto& [text, i] : keys) sorted.push_back(std::move(trees[i]));
  trees = std::move(sorted);
}

}  // namespace

std::vector<RootedPlanarTree> enumerate_trees(int leaves, int inner_nonroot) {
  if (leaves < 2) throw std::invalid_argument("enumerate_trees: need at least two leaves");
  if (inner_nonroot < 0 || inner_nonroot > leaves - 2)
    throw std::out_of_range("enumerate_trees: m must lie in [0, L-2]");
  TreeGenerator gen;
  TreeList out = gen.trees(leaves, inner_nonroot + 1);
  sort_by_text(out);
  return out;
}

std::vector<RootedPlanarTree> enumerate_all_trees(int leaves) {
  if (leaves < 2) throw std::invalid_argument("enumerate_all_trees: need at least two leaves");
  TreeGenerator gen;
  TreeList out;
  for (int internal = 1; internal <= leaves - 1; ++internal) {
    const auto& part = gen.trees(leaves, internal);
    out.insert(out.end(), part.begin(), part.end());
  }
  sort_by_text(out);
  return out;
}

// ---------------------------------------------------------------------------

RootedPlanarTree reverse_at(const RootedPlanarTree& tree, const NodePath& path) {
  if (path.empty()) {
    if (tree.is_leaf()) return tree;
    auto kids = tree.children();
    std::reverse(kids.begin(), kids.end());
    return RootedPlanarTree::node(std::move(kids));
  }
  const int head = path.front();
  if (tree.is_leaf() || head < 0 || head >= tree.arity())
    throw std::out_of_range("reverse_at: path '" + format_path(path) + "' leaves the tree");
  auto kids = tree.children();
  kids[static_cast<std::size_t>(head)] = reverse_at(kids[static_cast<std::size_t>(head)], NodePath(path.begin() + 1, path.end()));
  return RootedPlanarTree::node(std::move(kids));
}

RootedPlanarTree mirror(const RootedPlanarTree& tree) {
  if (tree.is_leaf()) return tree;
  std::vector<RootedPlanarTree> kids;
  for (auto it = tree.children().rbegin(); it != tree.children().rend(); ++it) kids.push_back(mirror(*it));
  return RootedPlanarTree::node(std::move(kids));
}

RootedPlanarTree dyslectic_canonical(const RootedPlanarTree& tree) {
  if (tree.is_leaf()) return tree;
  std::vector<RootedPlanarTree> kids;
  for (const auto& c : tree.children()) kids.push_back(dyslectic_canonical(c));
  auto forward = RootedPlanarTree::node(kids);
  std::reverse(kids.begin(), kids.end());
  auto backward = RootedPlanarTree::node(std::move(kids));
  return backward.to_string() < forward.to_string() ? backward : forward;
}

bool dyslectic_equivalent(const RootedPlanarTree& a, const RootedPlanarTree& b) {
  return dyslectic_canonical(a) == dyslectic_canonical(b);
}

std::vector<RootedPlanarTree> dyslectic_classes(int leaves) {
  std::set<std::string> seen;
  std::vector<RootedPlanarTree> out;
  for (const auto& t : enumerate_all_trees(leaves)) {
    auto c = dyslectic_canonical(t);
    if (seen.insert(c.to_string()).second) out.push_back(std::move(c));
  }
  sort_by_text(out);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

RootedPlanarTree graft_from(const RootedPlanarTree& tree, std::span<const RootedPlanarTree> subtrees, std::size_t& next) {
  if (tree.is_leaf()) return subtrees[next++];
  std::vector<RootedPlanarTree> kids;
  kids.reserve(tree.children().size());
  for (const auto& c : tree.children()) kids.push_back(graft_from(c, subtrees, next));
  return RootedPlanarTree::node(std::move(kids));
}

}  // namespace

RootedPlanarTree graft(const RootedPlanarTree& tree, std::span<const RootedPlanarTree> subtrees) {
  if (static_cast<int>(subtrees.size()) != tree.leaf_count())
    throw std::invalid_argument("graft: " + std::to_string(subtrees.size()) + " subtrees for a tree with " +
                                std::to_string(tree.leaf_count()) + " leaves");
  std::size_t next = 0;
  return graft_from(tree, subtrees, next);
}

// ---------------------------------------------------------------------------

namespace {

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = 0;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("face count exceeds 64 bits");
  return r;
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("count exceeds 64 bits");
  return r;
}

class TreeCounter {
public:
  std::uint64_t trees(int leaves, int internal) {
    if (leaves == 1) return internal == 0 ? 1 : 0;
    if (internal < 1 || internal > leaves - 1) return 0;
    const auto key = std::make_pair(leaves, internal);
    if (auto it = trees_.find(key); it != trees_.end()) return it->second;
    std::uint64_t total = 0;
    for (int k = 2; k <= leaves; ++k) total = checked_add(total, forests(k, leaves, internal - 1));
    trees_[key] = total;
    return total;
  }

private:
  std::uint64_t forests(int k, int leaves, int internal) {
    if (k == 0) return (leaves == 0 && internal == 0) ? 1 : 0;
    if (leaves < k) return 0;
    const auto key = std::make_tuple(k, leaves, internal);
    if (auto it = forests_.find(key); it != forests_.end()) return it->second;
    std::uint64_t total = 0;
    for (int l = 1; l <= leaves - (k - 1); ++l)
      for (int i = 0; i <= internal; ++i) {
        const std::uint64_t head = trees(l, i);
        if (head == 0) continue;
        total = checked_add(total, checked_mul(head, forests(k - 1, leaves - l, internal - i)));
      }
    forests_[key] = total;
    return total;
  }

  std::map<std::pair<int, int>, std::uint64_t> trees_;
  std::map<std::tuple<int, int, int>, std::uint64_t> forests_;
};

}  // namespace

std::map<int, std::uint64_t> count_faces(int leaves) {
  if (leaves < 2) throw std::invalid_argument("count_faces: need at least two leaves");
  TreeCounter counter;
  std::map<int, std::uint64_t> out;
  for (int m = 0; m <= leaves - 2; ++m) out[m] = counter.trees(leaves, m + 1);
  return out;
}

std::uint64_t catalan(int n) {
  if (n < 0) throw std::invalid_argument("catalan: negative index");
  // C_{k+1} = C_k * 2(2k+1) / (k+2), exact at every step.
  std::uint64_t c = 1;
  for (int k = 0; k < n; ++k) {
    const auto num = checked_mul(c, static_cast<std::uint64_t>(2 * (2 * k + 1)));
    c = num / static_cast<std::uint64_t>(k + 2);
  }
  return c;
}

std::uint64_t tile_count(int n) {
  if (n < 1) throw std::invalid_argument("tile_count: n must be >= 1");
  std::uint64_t f = 1;
  for (int k = 3; k <= n + 1; ++k) f = checked_mul(f, static_cast<std::uint64_t>(k));
  return f;  // (n+1)!/2 = 3 * 4 * ... * (n+1)
}

// ---------------------------------------------------------------------------

LabelledTree LabelledTree::plain(RootedPlanarTree tree) {
  const int l = tree.leaf_count();
  LabelledTree out{std::move(tree), {}};
  for (int i = 0; i < l; ++i) out.labels.push_back(i);
  return out;
}

LabelledTree act(const LabelledTree& x, const Permutation& pi) {
  if (pi.size() != static_cast<int>(x.labels.size())) throw std::invalid_argument("act: permutation size mismatch");
  const Permutation inv = pi.inverse();
  LabelledTree out = x;
  for (auto& l : out.labels) l = inv(l);
  return out;
}

LabelledTree compose(const LabelledTree& y, std::span<const LabelledTree> inputs) {
  if (static_cast<int>(inputs.size()) != y.tree.leaf_count())
    throw std::invalid_argument("compose: arity mismatch");
  std::vector<int> offset(inputs.size(), 0);
  for (std::size_t i = 1; i < inputs.size(); ++i) offset[i] = offset[i - 1] + inputs[i - 1].tree.leaf_count();
  std::vector<RootedPlanarTree> grafted;
  LabelledTree out;
  for (int label : y.labels) {
    const auto& in = inputs[static_cast<std::size_t>(label)];
    grafted.push_back(in.tree);
    for (int l : in.labels) out.labels.push_back(offset[static_cast<std::size_t>(label)] + l);
  }
  out.tree = graft(y.tree, grafted);
  return out;
}

}  // namespace spheresep
