#pragma once

#include "ttno/diagram.hpp"
#include "ttno/digest.hpp"
#include "ttno/gamma.hpp"

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

namespace ttno {

enum class Method { Basic, Bipartite, Sge };

const char *method_name(Method m);
/// Accepts basic, bipartite and sge. Throws BadParams.
Method parse_method(const std::string &s);

/// Down digests that stay valid while the subtrees below the current BFS
/// level are untouched.
struct DigestCache {
  std::unordered_map<int, SubtreeDigest> vertex_down;
  std::unordered_map<int, SubtreeDigest> edge_down;
};

/// Fragment class of each hyperedge on one side of a bond, ignoring the
/// hyperedge's own factor. Keyed by hyperedge id.
using FragmentKeys = std::unordered_map<int, SubtreeDigest>;

/// Keys of the hyperedges at the bond's child node.
FragmentKeys leaf_side_keys(const StateDiagram &d, int bond, DigestCache &cache);
/// Keys of the hyperedges at the bond's parent node.
FragmentKeys root_side_keys(const StateDiagram &d, int bond, DigestCache &cache);

struct BondGamma {
  GammaMatrix gamma;
  /// Hyperedge at the parent node standing for each row.
  std::vector<int> row_rep;
  /// Hyperedge at the child node standing for each column.
  std::vector<int> col_rep;
};

/// Rows are root-side classes, columns leaf-side classes. Hyperedges whose
/// contribution would mix symbols inside a class get an extra row or column.
BondGamma build_gamma(const StateDiagram &d, int bond, const FragmentKeys &u_keys,
                      const FragmentKeys &v_keys);

/// Replaces every vertex of the bond by one vertex per cover element and
/// reconnects copies of the row and column representatives through the
/// weights of A, gamma_tilde and B.
void rewire_bond(StateDiagram &d, int bond, const BondGamma &bg,
                 const EliminationRecord &rec, const CoverSolution &cover);

struct BondOutcome {
  int bond = -1;
  std::size_t rows = 0, cols = 0;
  std::size_t reduced_rows = 0, reduced_cols = 0;
  std::size_t cover_raw = 0;     ///< cover of gamma
  std::size_t cover_reduced = 0; ///< cover of gamma_tilde (sge only)
  bool used_reduced = false;
  std::size_t dim = 0;
};

BondOutcome optimize_bond(StateDiagram &d, int bond, Method method, int max_iter,
                          DigestCache &cache);

/// Level-by-level sweep from the root. Basic returns the input unchanged.
StateDiagram optimize_diagram(const StateDiagram &d, Method method,
                              int max_iter = 10,
                              std::vector<BondOutcome> *log = nullptr);

/// Runtime assertions inside optimize_bond and optimize_diagram: König
/// sizes, cover validity, A*gamma_tilde*B == gamma, fallback monotonicity,
/// diagram structure and (with terms) term preservation. Violations throw
/// std::logic_error.
struct InvariantOptions {
  bool enabled = false;
  bool terms = false;
};
void set_invariant_checks(InvariantOptions opts);
InvariantOptions invariant_checks();

struct InvariantCounters {
  std::size_t konig = 0;
  std::size_t factorization = 0;
  std::size_t cover = 0;
  std::size_t fallback = 0;
  std::size_t terms = 0;
};
InvariantCounters invariant_counters();

} // namespace ttno
