#pragma once

#include "ttno/benchmark.hpp"
#include "ttno/diagram.hpp"
#include "ttno/gamma.hpp"
#include "ttno/generators.hpp"
#include "ttno/optimizer.hpp"
#include "ttno/symbolic.hpp"
#include "ttno/topology.hpp"
#include "ttno/verification.hpp"

#include <initializer_list>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace ttno::test {

inline Coefficient sym(const std::string &name, long num = 1, long den = 1) {
  return Coefficient(num, den, Symbol::named(name));
}

inline Coefficient one() { return Coefficient(1, 1); }

/// Operator on the listed qubit sites.
inline SymbolicOperator make_operator(
    const std::vector<int> &sites,
    const std::vector<std::pair<Coefficient, std::map<int, std::string>>> &terms) {
  SymbolicOperator op;
  for (int s : sites)
    op.sites.push_back({s, 2});
  for (const auto &[c, f] : terms) {
    op.terms.push_back({c, f});
    for (auto b : c.symbol().factors())
      op.symbols.declare(b.name());
  }
  return op;
}

inline TreeTopology physical_tree(const std::vector<int> &ids,
                                  const std::vector<std::pair<int, int>> &edges,
                                  int root = -1) {
  std::vector<TopologyNode> nodes;
  for (int id : ids)
    nodes.push_back({id, 2});
  return TreeTopology(nodes, edges, root);
}

/// Tree with edges 1-2, 1-3, 3-4, 3-5 rooted at 1.
inline TreeTopology five_node_tree() {
  return physical_tree({1, 2, 3, 4, 5}, {{1, 2}, {1, 3}, {3, 4}, {3, 5}}, 1);
}

/// X1X2Y4 + X1X2Z3 + Y1Y3Y4 + Y4 + Z3 with unit coefficients.
inline SymbolicOperator five_term_operator() {
  return make_operator({1, 2, 3, 4, 5},
                       {{one(), {{1, "X"}, {2, "X"}, {4, "Y"}}},
                        {one(), {{1, "X"}, {2, "X"}, {3, "Z"}}},
                        {one(), {{1, "Y"}, {3, "Y"}, {4, "Y"}}},
                        {one(), {{4, "Y"}}},
                        {one(), {{3, "Z"}}}});
}

/// g (X Y + X X + Y Y + Y X) on two sites.
inline SymbolicOperator two_site_product_operator() {
  return make_operator({0, 1}, {{sym("g"), {{0, "X"}, {1, "Y"}}},
                                {sym("g"), {{0, "X"}, {1, "X"}}},
                                {sym("g"), {{0, "Y"}, {1, "Y"}}},
                                {sym("g"), {{0, "Y"}, {1, "X"}}}});
}

/// 5x5 matrix with two parallel rows and two parallel columns; sge reduces
/// it to 4x4 with cover 3.
inline GammaMatrix five_by_five_gamma() {
  auto z = Coefficient::zero();
  auto g = [](const char *n, long k) { return sym(n, k); };
  return GammaMatrix::from_dense({
      {g("c11", 3), g("c12", 3), g("c13", -1), z, g("c12", 2)},
      {z, g("c22", 3), z, z, g("c22", 2)},
      {z, g("c32", 3), z, z, g("c32", 2)},
      {z, z, g("c43", 2), g("c44", 2), z},
      {z, z, g("c43", -1), g("c44", -1), z},
  });
}

/// 4x4 cyclic pattern with one symbol per column.
inline GammaMatrix cyclic_gamma() {
  auto z = Coefficient::zero();
  auto a = sym("d1"), b = sym("d2"), c = sym("d3"), d = sym("d4");
  return GammaMatrix::from_dense(
      {{a, b, z, z}, {z, b, c, z}, {a, z, z, d}, {z, z, c, d}});
}

inline std::size_t cover_size(const GammaMatrix &g) {
  return konig_cover(g, hopcroft_karp(g)).size();
}

/// Canonical term multiset: sorted (factors, symbol, rational).
inline std::vector<std::tuple<std::map<int, std::string>, std::string, std::string>>
canonical_terms(const std::vector<ProductTerm> &terms) {
  std::map<std::pair<std::map<int, std::string>, std::string>, Rational> acc;
  for (const auto &t : terms)
    acc[{t.factors, t.coefficient.symbol().name()}] += t.coefficient.rational();
  std::vector<std::tuple<std::map<int, std::string>, std::string, std::string>> out;
  for (const auto &[k, v] : acc)
    if (v != 0)
      out.emplace_back(k.first, k.second, v.get_str());
  return out;
}

} // namespace ttno::test
