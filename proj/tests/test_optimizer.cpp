#include "helpers.hpp"
#include "invariant_env.hpp"

#include "ttno/error.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace ttno;
using namespace ttno::test;

namespace {

/// Two-site operator whose bond matrix is five_by_five_gamma: row i is the
/// label Ai on site 0, column j the label Bj on site 1.
SymbolicOperator five_by_five_operator() {
  auto g = five_by_five_gamma();
  std::vector<std::pair<Coefficient, std::map<int, std::string>>> terms;
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (const auto &[j, c] : g.row(i))
      terms.push_back({c, {{0, "A" + std::to_string(i + 1)},
                           {1, "B" + std::to_string(j + 1)}}});
  return make_operator({0, 1}, terms);
}

std::vector<std::string> non_unit_factors(const StateDiagram &d) {
  std::vector<std::string> out;
  for (const auto &n : d.topology().nodes())
    for (int e : d.hyperedges_at(n.id))
      if (d.hyperedge(e).factor != one())
        out.push_back(d.hyperedge(e).factor.str());
  std::sort(out.begin(), out.end());
  return out;
}

} // namespace

TEST(Method, Names) {
  EXPECT_EQ(parse_method("sge"), Method::Sge);
  EXPECT_STREQ(method_name(Method::Bipartite), "bipartite");
  EXPECT_THROW(parse_method("svd"), Error);
}

TEST(BuildGamma, TwoSiteOperator) {
  auto d = stack_terms(two_site_product_operator(), chain_topology(2));
  DigestCache cache;
  auto v = leaf_side_keys(d, 0, cache);
  auto u = root_side_keys(d, 0, cache);
  auto bg = build_gamma(d, 0, u, v);
  ASSERT_EQ(bg.gamma.rows(), 2u);
  ASSERT_EQ(bg.gamma.cols(), 2u);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      EXPECT_EQ(bg.gamma.at(i, j), sym("g"));
}

TEST(BuildGamma, SingleTerm) {
  auto op = make_operator({0, 1, 2}, {{sym("a"), {{0, "X"}, {2, "Z"}}}});
  auto d = stack_terms(op, chain_topology(3));
  DigestCache cache;
  for (int b = 0; b < 2; ++b) {
    auto bg = build_gamma(d, b, root_side_keys(d, b, cache), leaf_side_keys(d, b, cache));
    EXPECT_EQ(bg.gamma.rows(), 1u);
    EXPECT_EQ(bg.gamma.cols(), 1u);
  }
}

TEST(OptimizeBond, TwoSiteOutcome) {
  auto d = stack_terms(two_site_product_operator(), chain_topology(2));
  DigestCache cache;
  auto out = optimize_bond(d, 0, Method::Sge, 10, cache);
  EXPECT_EQ(out.cover_raw, 2u);
  EXPECT_EQ(out.cover_reduced, 1u);
  EXPECT_TRUE(out.used_reduced);
  EXPECT_EQ(out.dim, 1u);
  EXPECT_EQ(d.bond_dim(0), 1u);
  // the single vertex joins both labels on each side
  EXPECT_EQ(d.hyperedges_at(0).size(), 2u);
  EXPECT_EQ(d.hyperedges_at(1).size(), 2u);
  EXPECT_EQ(canonical_terms(enumerate_terms(d)),
            canonical_terms(two_site_product_operator().terms));
}

TEST(OptimizeBond, FiveByFiveWiring) {
  auto op = five_by_five_operator();
  auto t = chain_topology(2);
  auto bip = optimize_diagram(stack_terms(op, t), Method::Bipartite);
  EXPECT_EQ(bip.bond_dim(0), 5u);
  std::vector<BondOutcome> log;
  auto d = optimize_diagram(stack_terms(op, t), Method::Sge, 10, &log);
  ASSERT_EQ(log.size(), 1u);
  EXPECT_EQ(log[0].reduced_rows, 4u);
  EXPECT_EQ(log[0].reduced_cols, 4u);
  EXPECT_EQ(d.bond_dim(0), 3u);
  std::vector<std::string> want{
      sym("c11", 3).str(), sym("c13", -1).str(), sym("c12", 3).str(),
      sym("c22", 3).str(), sym("c32", 3).str(), Coefficient(2, 3).str(),
      sym("c43", 2).str(), sym("c44", 2).str(), Coefficient(-1, 2).str()};
  std::sort(want.begin(), want.end());
  EXPECT_EQ(non_unit_factors(d), want);
  EXPECT_EQ(canonical_terms(enumerate_terms(d)), canonical_terms(op.terms));
}

TEST(OptimizeDiagram, FiveTermTree) {
  auto op = five_term_operator();
  auto t = five_node_tree();
  auto d = optimize_diagram(stack_terms(op, t), Method::Sge);
  EXPECT_EQ(d.bond_dim(t.bond_index({1, 2})), 2u);
  EXPECT_EQ(d.bond_dim(t.bond_index({1, 3})), 2u);
  EXPECT_EQ(d.bond_dim(t.bond_index({3, 4})), 2u);
  EXPECT_EQ(d.bond_dim(t.bond_index({3, 5})), 1u);
}

TEST(OptimizeDiagram, SingleTermAllOnes) {
  auto op = make_operator({0, 1, 2, 3}, {{sym("a"), {{1, "X"}, {3, "Y"}}}});
  for (Method m : {Method::Basic, Method::Bipartite, Method::Sge}) {
    auto d = optimize_diagram(stack_terms(op, random_tree(4, 1)), m);
    for (auto dim : d.bond_dims())
      EXPECT_EQ(dim, 1u);
  }
}

TEST(OptimizeDiagram, BasicLeavesStackUnchanged) {
  auto op = random_hamiltonian(5, 7, {CoeffMode::Uniform, 0}, 2);
  auto stacked = stack_terms(op, random_tree(5, 2));
  auto d = optimize_diagram(stacked, Method::Basic);
  EXPECT_EQ(d.bond_dims(), stacked.bond_dims());
}

TEST(OptimizeDiagram, DistinctCoefficientsReachSvdRanks) {
  for (int s = 0; s < 100; ++s) {
    int K = 1 + s % 10;
    auto op = random_hamiltonian(6, K, {CoeffMode::Distinct, 0}, derive_seed(300, s));
    auto t = random_tree(6, derive_seed(301, s));
    auto d = optimize_diagram(stack_terms(op, t), Method::Sge);
    auto svd = svd_bond_ranks(op, t, random_instantiation(op, derive_seed(302, s)));
    ASSERT_EQ(d.bond_dims(), svd.dims()) << "sample " << s;
  }
}

TEST(OptimizeDiagram, OutcomesRespectFallback) {
  const CoefficientMode modes[] = {{CoeffMode::Uniform, 0}, {CoeffMode::Partial, 2}};
  for (int s = 0; s < 100; ++s) {
    auto op = random_hamiltonian(6, 4 + s % 10, modes[s % 2], derive_seed(400, s));
    auto t = random_tree(6, derive_seed(401, s));
    std::vector<BondOutcome> log;
    optimize_diagram(stack_terms(op, t), Method::Sge, 10, &log);
    for (const auto &o : log) {
      EXPECT_EQ(o.dim, std::min(o.cover_raw, o.cover_reduced));
      EXPECT_LE(o.dim, o.cover_raw);
      EXPECT_EQ(o.used_reduced, o.cover_reduced <= o.cover_raw);
    }
  }
}

TEST(OptimizeDiagram, RankLowerBound) {
  const CoefficientMode modes[] = {
      {CoeffMode::Uniform, 0}, {CoeffMode::Partial, 2}, {CoeffMode::Distinct, 0}};
  for (int s = 0; s < 60; ++s) {
    int L = 3 + s % 4;
    auto op = random_hamiltonian(L, 3 + s % 12, modes[s % 3], derive_seed(500, s));
    auto t = random_tree(L, derive_seed(501, s));
    auto dims = optimize_diagram(stack_terms(op, t), Method::Sge).bond_dims();
    for (int k = 0; k < 10; ++k) {
      auto ranks = svd_bond_ranks(op, t, random_instantiation(op, derive_seed(502, s, k))).dims();
      for (std::size_t b = 0; b < dims.size(); ++b)
        EXPECT_GE(dims[b], ranks[b]);
    }
  }
}

TEST(OptimizeDiagram, Idempotent) {
  for (int s = 0; s < 30; ++s) {
    auto op = random_hamiltonian(6, 10, {CoeffMode::Uniform, 0}, derive_seed(600, s));
    auto t = random_tree(6, derive_seed(601, s));
    auto once = optimize_diagram(stack_terms(op, t), Method::Sge);
    auto twice = optimize_diagram(once, Method::Sge);
    EXPECT_EQ(once.bond_dims(), twice.bond_dims());
    EXPECT_EQ(canonical_terms(enumerate_terms(twice)), canonical_terms(op.terms));
  }
}

TEST(OptimizeDiagram, VirtualNodesKeepTerms) {
  auto op = lattice_hamiltonian(3);
  for (const char *kind : {"fork_virtual", "binary_virtual"}) {
    auto d = optimize_diagram(stack_terms(op, generate_topology(kind, 3)), Method::Sge);
    EXPECT_EQ(canonical_terms(enumerate_terms(d)), canonical_terms(op.terms)) << kind;
  }
}

TEST(Invariants, CountersAdvance) {
  auto before = invariant_counters();
  auto op = random_hamiltonian(5, 9, {CoeffMode::Uniform, 0}, 3);
  optimize_diagram(stack_terms(op, random_tree(5, 3)), Method::Sge);
  auto after = invariant_counters();
  EXPECT_GT(after.konig, before.konig);
  EXPECT_GT(after.factorization, before.factorization);
  EXPECT_GT(after.cover, before.cover);
  EXPECT_GT(after.fallback, before.fallback);
  EXPECT_GT(after.terms, before.terms);
}
