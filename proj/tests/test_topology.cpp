#include "helpers.hpp"

#include "ttno/digest.hpp"
#include "ttno/error.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

using namespace ttno;
using namespace ttno::test;

namespace {

template <class F> ErrorCode error_of(F &&f) {
  try {
    f();
  } catch (const Error &e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::ParseError;
}

std::vector<TopologyNode> qubits(std::initializer_list<int> ids) {
  std::vector<TopologyNode> out;
  for (int id : ids)
    out.push_back({id, 2});
  return out;
}

TreeTopology eight_node_tree() {
  return physical_tree({1, 2, 3, 4, 5, 6, 7, 8},
                       {{1, 2}, {1, 5}, {2, 3}, {2, 4}, {5, 6}, {5, 7}, {7, 8}}, 1);
}

std::vector<std::pair<int, int>> as_pairs(const std::vector<Bond> &bonds) {
  std::vector<std::pair<int, int>> out;
  for (const auto &b : bonds)
    out.emplace_back(b.parent, b.child);
  return out;
}

bool deep_equal(const LabeledTree &a, const LabeledTree &b) {
  if (a.label != b.label || a.children.size() != b.children.size())
    return false;
  for (std::size_t k = 0; k < a.children.size(); ++k)
    if (!deep_equal(a.children[k], b.children[k]))
      return false;
  return true;
}

LabeledTree random_labeled_tree(std::mt19937_64 &rng, int max_nodes) {
  const char *labels[] = {"X", "Y", "Z"};
  int n = std::uniform_int_distribution<int>(1, max_nodes)(rng);
  std::vector<LabeledTree> nodes(n);
  std::vector<int> parent(n, -1);
  for (int i = 0; i < n; ++i)
    nodes[i].label = labels[std::uniform_int_distribution<int>(0, 2)(rng)];
  for (int i = 1; i < n; ++i)
    parent[i] = std::uniform_int_distribution<int>(0, i - 1)(rng);
  // attach deepest first so children are complete when moved
  for (int i = n - 1; i > 0; --i)
    nodes[parent[i]].children.insert(nodes[parent[i]].children.begin(), nodes[i]);
  return nodes[0];
}

/// All ordered trees with exactly n nodes, unlabeled.
std::vector<LabeledTree> shapes(int n) {
  if (n == 1)
    return {LabeledTree{"", {}}};
  std::vector<LabeledTree> out;
  // forests of n-1 nodes as ordered lists of trees
  std::function<void(int, std::vector<LabeledTree> &)> forests =
      [&](int left, std::vector<LabeledTree> &acc) {
        if (left == 0) {
          out.push_back(LabeledTree{"", acc});
          return;
        }
        for (int first = 1; first <= left; ++first)
          for (const auto &t : shapes(first)) {
            acc.push_back(t);
            forests(left - first, acc);
            acc.pop_back();
          }
      };
  std::vector<LabeledTree> acc;
  forests(n - 1, acc);
  return out;
}

void all_labelings(LabeledTree &t, std::vector<LabeledTree *> &slots, std::size_t k,
                   std::vector<LabeledTree> &out, const LabeledTree &root) {
  if (k == slots.size()) {
    out.push_back(root);
    return;
  }
  for (const char *l : {"X", "Y", "Z"}) {
    slots[k]->label = l;
    all_labelings(t, slots, k + 1, out, root);
  }
}

void collect(LabeledTree &t, std::vector<LabeledTree *> &slots) {
  slots.push_back(&t);
  for (auto &c : t.children)
    collect(c, slots);
}

} // namespace

TEST(Validate, AcceptsFiveNodeTree) {
  EXPECT_NO_THROW(validate(qubits({1, 2, 3, 4, 5}), {{1, 2}, {1, 3}, {3, 4}, {3, 5}}));
}

TEST(Validate, Errors) {
  EXPECT_EQ(error_of([] { validate(qubits({1, 2, 3}), {{1, 2}, {2, 3}, {3, 1}}); }),
            ErrorCode::CycleDetected);
  EXPECT_EQ(error_of([] { validate(qubits({1, 2, 3, 4}), {{1, 2}, {3, 4}}); }),
            ErrorCode::Disconnected);
  EXPECT_EQ(error_of([] { validate(qubits({1, 1}), {{1, 1}}); }), ErrorCode::DuplicateId);
}

TEST(BondLevels, EightNodeTree) {
  auto levels = bfs_bond_levels(eight_node_tree());
  ASSERT_EQ(levels.size(), 3u);
  using P = std::vector<std::pair<int, int>>;
  EXPECT_EQ(as_pairs(levels[0]), (P{{1, 2}, {1, 5}}));
  EXPECT_EQ(as_pairs(levels[1]), (P{{2, 3}, {2, 4}, {5, 6}, {5, 7}}));
  EXPECT_EQ(as_pairs(levels[2]), (P{{7, 8}}));
}

TEST(BondLevels, ChainAndSingleNode) {
  auto chain = physical_tree({1, 2, 3}, {{1, 2}, {2, 3}}, 1);
  auto levels = bfs_bond_levels(chain);
  ASSERT_EQ(levels.size(), 2u);
  EXPECT_EQ(as_pairs(levels[0]), (std::vector<std::pair<int, int>>{{1, 2}}));
  EXPECT_EQ(as_pairs(levels[1]), (std::vector<std::pair<int, int>>{{2, 3}}));
  EXPECT_TRUE(bfs_bond_levels(physical_tree({4}, {})).empty());
}

TEST(BondLevels, CoverEdgesOnceForEveryRoot) {
  std::vector<TreeTopology> trees{eight_node_tree(), five_node_tree()};
  for (int seed = 0; seed < 20; ++seed)
    trees.push_back(random_tree(3 + seed % 7, seed));
  for (const auto &base : trees)
    for (const auto &n : base.nodes()) {
      auto t = base.rerooted(n.id);
      std::multiset<std::pair<int, int>> seen;
      int depth = 1;
      for (const auto &level : bfs_bond_levels(t)) {
        for (const auto &b : level) {
          EXPECT_EQ(t.depth(b.child), depth);
          EXPECT_EQ(t.parent(b.child), b.parent);
          seen.insert(std::minmax(b.parent, b.child));
        }
        ++depth;
      }
      std::multiset<std::pair<int, int>> edges;
      for (auto [a, b] : t.edges())
        edges.insert(std::minmax(a, b));
      EXPECT_EQ(seen, edges);
    }
}

TEST(Split, Examples) {
  auto t = eight_node_tree();
  auto [root_side, leaf_side] = split_at_bond(t, {1, 2});
  EXPECT_EQ(root_side, (std::vector<int>{1, 5, 6, 7, 8}));
  EXPECT_EQ(leaf_side, (std::vector<int>{2, 3, 4}));
  EXPECT_EQ(split_at_bond(t, {5, 6}).second, (std::vector<int>{6}));
  auto chain = physical_tree({1, 2}, {{1, 2}}, 1);
  EXPECT_EQ(split_at_bond(chain, {1, 2}),
            (std::pair<std::vector<int>, std::vector<int>>{{1}, {2}}));
  EXPECT_EQ(error_of([&] { split_at_bond(t, {3, 4}); }), ErrorCode::UnknownBond);
}

TEST(Split, PartitionAndConnectedLeafSide) {
  for (int seed = 0; seed < 30; ++seed) {
    auto t = random_tree(2 + seed % 9, 100 + seed);
    for (const auto &b : t.bonds()) {
      auto [r, l] = split_at_bond(t, b);
      std::vector<int> all;
      std::set_union(r.begin(), r.end(), l.begin(), l.end(), std::back_inserter(all));
      EXPECT_EQ(all.size(), t.size());
      EXPECT_EQ(r.size() + l.size(), t.size());
      // every leaf-side node other than the child has its parent on the leaf side
      for (int id : l)
        if (id != b.child)
          EXPECT_TRUE(std::binary_search(l.begin(), l.end(), t.parent(id)));
    }
  }
}

TEST(Generators, SnakeOfTwoIsChain) {
  auto t = snake_topology(2);
  EXPECT_EQ(t.size(), 4u);
  EXPECT_EQ(t.edges().size(), 3u);
  for (const auto &n : t.nodes())
    EXPECT_LE(t.children(n.id).size() + (t.parent(n.id) >= 0), 2u);
}

TEST(Generators, BinaryVirtualLeavesArePhysical) {
  auto t = binary_virtual_topology(2);
  EXPECT_EQ(t.physical_nodes().size(), 4u);
  for (const auto &n : t.nodes()) {
    if (n.dim > 1)
      EXPECT_TRUE(t.children(n.id).empty());
    else
      EXPECT_FALSE(t.children(n.id).empty());
  }
}

TEST(Generators, PhysicalCountIsGridSize) {
  for (const char *kind : {"snake", "fork", "fork_virtual", "staircase", "binary_virtual"})
    for (int L = 2; L <= 6; ++L) {
      auto t = generate_topology(kind, L);
      auto phys = t.physical_nodes();
      EXPECT_EQ(phys.size(), static_cast<std::size_t>(L * L)) << kind << " L=" << L;
      std::sort(phys.begin(), phys.end());
      for (int i = 0; i < L * L; ++i)
        EXPECT_EQ(phys[i], i) << kind;
    }
}

TEST(Generators, ForkVirtualDegreeCap) {
  for (int L = 2; L <= 6; ++L) {
    auto t = fork_virtual_topology(L);
    for (const auto &n : t.nodes())
      if (n.dim == 1) {
        std::size_t deg = t.children(n.id).size() + (t.parent(n.id) >= 0);
        EXPECT_LE(deg, 3u);
      }
  }
}

TEST(Generators, HeomTreeCounts) {
  auto t = heom_ttn_topology(4, 2);
  std::size_t virt = 0;
  for (const auto &n : t.nodes())
    virt += n.dim == 1;
  EXPECT_EQ(t.physical_nodes().size(), 8u + 2u + 10u);
  EXPECT_EQ(virt, 3u);
  auto sites = heom_sites(4, 2);
  const auto &kids = t.children(t.root());
  bool cavity_at_root = t.root() == sites.hat[0] || t.root() == sites.check[0] ||
                        std::count(kids.begin(), kids.end(), sites.hat[0]) ||
                        std::count(kids.begin(), kids.end(), sites.check[0]);
  EXPECT_TRUE(cavity_at_root);
}

TEST(Generators, HeomChainIsPathOfPhysicalSites) {
  auto t = heom_mps_topology(3, 2);
  EXPECT_EQ(t.physical_nodes().size(), 2u * 4u + 4u * 2u);
}

TEST(Generators, BadParams) {
  EXPECT_EQ(error_of([] { generate_topology("snake", 0); }), ErrorCode::BadParams);
  EXPECT_EQ(error_of([] { generate_topology("heom_ttn", 0, 2); }), ErrorCode::BadParams);
  EXPECT_EQ(error_of([] { generate_topology("heom_mps", 2, -1); }), ErrorCode::BadParams);
  EXPECT_EQ(error_of([] { generate_topology("spiral", 3); }), ErrorCode::BadParams);
}

TEST(Generators, RandomTreeDeterministic) {
  auto a = random_tree(7, 42), b = random_tree(7, 42);
  EXPECT_EQ(a.edges(), b.edges());
  EXPECT_EQ(a.size(), 7u);
  EXPECT_EQ(a.root(), 0);
}

TEST(TopologyIo, RoundTrip) {
  auto t = fork_virtual_topology(3);
  auto back = parse_topology(serialize_topology(t));
  EXPECT_EQ(back.root(), t.root());
  EXPECT_EQ(back.bonds().size(), t.bonds().size());
  for (std::size_t k = 0; k < t.bonds().size(); ++k)
    EXPECT_EQ(back.bonds()[k], t.bonds()[k]);
  EXPECT_EQ(error_of([] { parse_topology("[1,2"); }), ErrorCode::ParseError);
}

TEST(Digest, LeafLabels) {
  auto t = physical_tree({1, 2, 3}, {{1, 2}, {1, 3}}, 1);
  auto a = subtree_digest(t, {1, 2}, {{2, "X"}, {3, "X"}});
  auto b = subtree_digest(t, {1, 3}, {{2, "X"}, {3, "X"}});
  auto c = subtree_digest(t, {1, 3}, {{3, "Y"}});
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
}

TEST(Digest, AgreesWithDeepCompareOnRandomTrees) {
  std::mt19937_64 rng(5);
  std::vector<LabeledTree> trees;
  for (int k = 0; k < 1000; ++k)
    trees.push_back(random_labeled_tree(rng, 8));
  std::vector<SubtreeDigest> digests;
  for (const auto &t : trees)
    digests.push_back(tree_digest(t));
  std::size_t equal_pairs = 0;
  for (std::size_t i = 0; i < trees.size(); ++i)
    for (std::size_t j = i; j < trees.size(); ++j) {
      bool deep = deep_equal(trees[i], trees[j]);
      equal_pairs += deep && i != j;
      ASSERT_EQ(deep, digests[i] == digests[j]) << i << " " << j;
    }
  EXPECT_GT(equal_pairs, 0u);
}

TEST(Digest, ExhaustiveSmallTrees) {
  std::vector<LabeledTree> all;
  for (int n = 1; n <= 4; ++n)
    for (auto shape : shapes(n)) {
      std::vector<LabeledTree *> slots;
      collect(shape, slots);
      all_labelings(shape, slots, 0, all, shape);
    }
  // ordered trees: 1, 1, 2, 5 shapes
  EXPECT_EQ(all.size(), 3u + 9u + 2u * 27u + 5u * 81u);
  std::set<SubtreeDigest> distinct;
  for (const auto &t : all) {
    EXPECT_EQ(tree_digest(t), tree_digest(t));
    distinct.insert(tree_digest(t));
  }
  EXPECT_EQ(distinct.size(), all.size());
}

TEST(Digest, FragmentSlotsAreOrdered) {
  auto x = tree_digest({"X", {}}), y = tree_digest({"Y", {}});
  EXPECT_EQ(v_subtree_digest("Z", {x, y}), v_subtree_digest("Z", {x, y}));
  EXPECT_NE(v_subtree_digest("Z", {x, y}), v_subtree_digest("Z", {y, x}));
  EXPECT_NE(v_subtree_digest("Z", {x}), v_subtree_digest("X", {x}));
}

TEST(Digest, FragmentsAgreeWithDeepCompare) {
  std::mt19937_64 rng(9);
  struct Fragment {
    std::string label;
    std::vector<LabeledTree> attached;
  };
  std::vector<Fragment> frags;
  for (int k = 0; k < 1000; ++k) {
    Fragment f;
    f.label = std::uniform_int_distribution<int>(0, 1)(rng) ? "X" : "Y";
    int n = std::uniform_int_distribution<int>(0, 2)(rng);
    for (int i = 0; i < n; ++i)
      f.attached.push_back(random_labeled_tree(rng, 3));
    frags.push_back(f);
  }
  auto digest = [](const Fragment &f) {
    std::vector<SubtreeDigest> d;
    for (const auto &t : f.attached)
      d.push_back(tree_digest(t));
    return v_subtree_digest(f.label, d);
  };
  for (std::size_t i = 0; i < frags.size(); ++i)
    for (std::size_t j = i + 1; j < frags.size(); j += 7) {
      const auto &a = frags[i], &b = frags[j];
      bool deep = a.label == b.label && a.attached.size() == b.attached.size();
      for (std::size_t k = 0; deep && k < a.attached.size(); ++k)
        deep = deep_equal(a.attached[k], b.attached[k]);
      ASSERT_EQ(deep, digest(a) == digest(b));
    }
}
