#include "ttno/optimizer.hpp"

#include "ttno/error.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <stdexcept>

namespace ttno {

const char *method_name(Method m) {
  switch (m) {
  case Method::Basic: return "basic";
  case Method::Bipartite: return "bipartite";
  case Method::Sge: return "sge";
  }
  return "?";
}

Method parse_method(const std::string &s) {
  if (s == "basic")
    return Method::Basic;
  if (s == "bipartite")
    return Method::Bipartite;
  if (s == "sge")
    return Method::Sge;
  throw Error(ErrorCode::BadParams, "unknown method '" + s + "'");
}

namespace {

std::atomic<bool> g_checks{false};
std::atomic<bool> g_check_terms{false};
std::atomic<std::size_t> g_konig{0}, g_factorization{0}, g_cover{0},
    g_fallback{0}, g_terms{0};

void require(bool ok, const char *what) {
  if (!ok)
    throw std::logic_error(std::string("invariant violated: ") + what);
}

/// Digests of diagram fragments.
///
/// Down digest of a vertex: the multiset of (factor, down digest) over the
/// hyperedges below it. Down digest of a hyperedge: label plus the down
/// digests of its child-side vertices. Up digest of a vertex: the multiset of
/// (factor, up digest) over the hyperedges above it, where the up digest of
/// a hyperedge covers every neighbour slot except the one facing down.
///
/// Down digests of bonds at or below the current level go to the shared
/// cache; everything shallower can change within a level and is memoized
/// only for the lifetime of this object.
class FragmentHasher {
public:
  FragmentHasher(const StateDiagram &d, DigestCache &cache, int level_depth)
      : d_(d), t_(d.topology()), cache_(cache), level_depth_(level_depth) {}

  SubtreeDigest edge_down(int e) {
    const auto &h = d_.hyperedge(e);
    bool stable = t_.depth(h.node) >= level_depth_;
    auto &memo = stable ? cache_.edge_down : local_edge_down_;
    if (auto it = memo.find(e); it != memo.end())
      return it->second;
    const auto &inc = t_.incident_bonds(h.node);
    std::size_t first = t_.parent_bond(h.node) >= 0 ? 1 : 0;
    DigestBuilder b('D');
    b.add(h.label).add(static_cast<std::uint32_t>(inc.size() - first));
    for (std::size_t k = first; k < inc.size(); ++k)
      b.add(vertex_down(h.vertices[k]));
    auto out = b.finish();
    memo.emplace(e, out);
    return out;
  }

  SubtreeDigest vertex_down(int v) {
    int bond = d_.vertex(v).bond;
    bool stable = t_.depth(t_.bonds()[bond].child) >= level_depth_;
    auto &memo = stable ? cache_.vertex_down : local_vertex_down_;
    if (auto it = memo.find(v); it != memo.end())
      return it->second;
    // Fill every vertex of the bond in one scan of the child node.
    std::map<int, std::vector<SubtreeDigest>> parts;
    for (int e : d_.hyperedges_at(t_.bonds()[bond].child)) {
      const auto &h = d_.hyperedge(e);
      parts[h.vertices[0]].push_back(
          DigestBuilder('E').add(h.factor).add(edge_down(e)).finish());
    }
    for (auto &[w, list] : parts)
      memo[w] = multiset_digest('W', list);
    return memo.at(v);
  }

  /// Root-side digest of hyperedge e with the slot of bond `facing` left out.
  SubtreeDigest edge_up(int e, int facing) {
    auto key = std::make_pair(e, facing);
    if (auto it = local_edge_up_.find(key); it != local_edge_up_.end())
      return it->second;
    const auto &h = d_.hyperedge(e);
    const auto &inc = t_.incident_bonds(h.node);
    int pb = t_.parent_bond(h.node);
    std::vector<SubtreeDigest> attached;
    for (std::size_t k = 0; k < inc.size(); ++k) {
      if (inc[k] == facing)
        continue;
      attached.push_back(inc[k] == pb ? vertex_up(h.vertices[k])
                                      : vertex_down(h.vertices[k]));
    }
    auto out = v_subtree_digest(h.label, attached);
    local_edge_up_.emplace(key, out);
    return out;
  }

  SubtreeDigest vertex_up(int v) {
    if (auto it = local_vertex_up_.find(v); it != local_vertex_up_.end())
      return it->second;
    int bond = d_.vertex(v).bond;
    int parent = t_.bonds()[bond].parent;
    int slot = t_.slot(parent, bond);
    std::map<int, std::vector<SubtreeDigest>> parts;
    for (int e : d_.hyperedges_at(parent)) {
      const auto &h = d_.hyperedge(e);
      parts[h.vertices[slot]].push_back(
          DigestBuilder('E').add(h.factor).add(edge_up(e, bond)).finish());
    }
    for (auto &[w, list] : parts)
      local_vertex_up_[w] = multiset_digest('U', list);
    return local_vertex_up_.at(v);
  }

private:
  static SubtreeDigest multiset_digest(char tag, std::vector<SubtreeDigest> &list) {
    std::sort(list.begin(), list.end());
    DigestBuilder b(tag);
    b.add(static_cast<std::uint32_t>(list.size()));
    for (const auto &x : list)
      b.add(x);
    return b.finish();
  }

  struct PairHash {
    std::size_t operator()(const std::pair<int, int> &p) const {
      return std::hash<long long>()((static_cast<long long>(p.first) << 32) ^
                                    static_cast<unsigned>(p.second));
    }
  };

  const StateDiagram &d_;
  const TreeTopology &t_;
  DigestCache &cache_;
  int level_depth_;
  std::unordered_map<int, SubtreeDigest> local_edge_down_, local_vertex_down_,
      local_vertex_up_;
  std::unordered_map<std::pair<int, int>, SubtreeDigest, PairHash> local_edge_up_;
};

int bond_level_depth(const StateDiagram &d, int bond) {
  return d.topology().depth(d.topology().bonds()[bond].child);
}

/// Appends c to the per-symbol list, merging with an entry of the same
/// symbol and dropping it if the sum cancels.
void accumulate(std::vector<Coefficient> &list, const Coefficient &c) {
  if (c.is_zero())
    return;
  for (auto it = list.begin(); it != list.end(); ++it) {
    if (it->symbol() == c.symbol()) {
      *it = coeff_add(*it, c);
      if (it->is_zero())
        list.erase(it);
      return;
    }
  }
  list.push_back(c);
}

std::vector<ProductTerm> sorted_terms(std::vector<ProductTerm> terms) {
  std::sort(terms.begin(), terms.end(),
            [](const ProductTerm &a, const ProductTerm &b) {
              if (a.factors != b.factors)
                return a.factors < b.factors;
              if (a.coefficient.symbol() != b.coefficient.symbol())
                return a.coefficient.symbol().name() < b.coefficient.symbol().name();
              return a.coefficient.rational() < b.coefficient.rational();
            });
  return terms;
}

} // namespace

void set_invariant_checks(InvariantOptions opts) {
  g_checks = opts.enabled;
  g_check_terms = opts.terms;
}

InvariantOptions invariant_checks() { return {g_checks, g_check_terms}; }

InvariantCounters invariant_counters() {
  return {g_konig, g_factorization, g_cover, g_fallback, g_terms};
}

FragmentKeys leaf_side_keys(const StateDiagram &d, int bond, DigestCache &cache) {
  FragmentHasher hasher(d, cache, bond_level_depth(d, bond));
  FragmentKeys keys;
  for (int e : d.hyperedges_at(d.topology().bonds()[bond].child))
    keys.emplace(e, hasher.edge_down(e));
  return keys;
}

FragmentKeys root_side_keys(const StateDiagram &d, int bond, DigestCache &cache) {
  FragmentHasher hasher(d, cache, bond_level_depth(d, bond));
  FragmentKeys keys;
  for (int e : d.hyperedges_at(d.topology().bonds()[bond].parent))
    keys.emplace(e, hasher.edge_up(e, bond));
  return keys;
}

BondGamma build_gamma(const StateDiagram &d, int bond, const FragmentKeys &u_keys,
                      const FragmentKeys &v_keys) {
  const auto &t = d.topology();
  const Bond &b = t.bonds().at(bond);
  const int pslot = t.slot(b.parent, bond);

  BondGamma out;
  std::vector<SubtreeDigest> col_keys, row_keys;

  // Columns: per vertex, the summed factors of each leaf-side class.
  std::unordered_map<SubtreeDigest, std::vector<int>, SubtreeDigestHash> col_slots;
  std::unordered_map<int, std::map<int, Coefficient>> vertex_cols;
  for (int e : d.hyperedges_at(b.child)) {
    const auto &g = d.hyperedge(e);
    const auto &key = v_keys.at(e);
    auto &slots = col_slots[key];
    auto &vc = vertex_cols[g.vertices[0]];
    int col = -1;
    for (int j : slots) {
      auto it = vc.find(j);
      if (it == vc.end() || can_add(it->second, g.factor)) {
        col = j;
        break;
      }
    }
    if (col < 0) {
      col = static_cast<int>(col_keys.size());
      col_keys.push_back(slots.empty()
                             ? key
                             : DigestBuilder('S').add(key)
                                   .add(static_cast<std::uint32_t>(slots.size()))
                                   .finish());
      slots.push_back(col);
      out.col_rep.push_back(e);
    }
    auto sum = coeff_add(vc[col], g.factor);
    if (sum.is_zero())
      vc.erase(col);
    else
      vc[col] = sum;
  }

  // Rows: each root-side hyperedge contributes its factor times the column
  // vector of its vertex.
  std::unordered_map<SubtreeDigest, std::vector<int>, SubtreeDigestHash> row_slots;
  std::vector<std::map<int, Coefficient>> rows;
  for (int e : d.hyperedges_at(b.parent)) {
    const auto &h = d.hyperedge(e);
    const auto &key = u_keys.at(e);
    std::vector<std::pair<int, Coefficient>> contrib;
    if (auto it = vertex_cols.find(h.vertices[pslot]); it != vertex_cols.end())
      for (const auto &[j, c] : it->second)
        contrib.emplace_back(j, coeff_mul(h.factor, c));
    auto &slots = row_slots[key];
    int row = -1;
    for (int i : slots) {
      bool ok = std::all_of(contrib.begin(), contrib.end(), [&](const auto &jc) {
        auto it = rows[i].find(jc.first);
        return it == rows[i].end() || can_add(it->second, jc.second);
      });
      if (ok) {
        row = i;
        break;
      }
    }
    if (row < 0) {
      row = static_cast<int>(rows.size());
      row_keys.push_back(slots.empty()
                             ? key
                             : DigestBuilder('S').add(key)
                                   .add(static_cast<std::uint32_t>(slots.size()))
                                   .finish());
      slots.push_back(row);
      rows.emplace_back();
      out.row_rep.push_back(e);
    }
    for (const auto &[j, c] : contrib) {
      auto sum = coeff_add(rows[row][j], c);
      if (sum.is_zero())
        rows[row].erase(j);
      else
        rows[row][j] = sum;
    }
  }

  out.gamma = GammaMatrix(rows.size(), col_keys.size());
  out.gamma.row_keys = row_keys;
  out.gamma.col_keys = col_keys;
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (const auto &[j, c] : rows[i])
      out.gamma.set(i, j, c);
  return out;
}

void rewire_bond(StateDiagram &d, int bond, const BondGamma &bg,
                 const EliminationRecord &rec, const CoverSolution &cover) {
  const auto &t = d.topology();
  const Bond b = t.bonds().at(bond);
  const int pslot = t.slot(b.parent, bond);
  const auto &G = rec.gamma_tilde;

  std::vector<std::vector<std::pair<int, Rational>>> a_col(rec.A.cols());
  for (const auto &[ia, q] : rec.A.entries())
    a_col[ia.second].emplace_back(ia.first, q);
  std::vector<std::vector<std::pair<int, Rational>>> b_row(rec.B.rows());
  for (const auto &[bj, q] : rec.B.entries())
    b_row[bj.first].emplace_back(bj.second, q);
  std::vector<std::vector<std::pair<int, Coefficient>>> g_col(G.cols());
  for (std::size_t a = 0; a < G.rows(); ++a)
    for (const auto &[j, c] : G.row(a))
      g_col[j].emplace_back(static_cast<int>(a), c);
  std::vector<bool> in_cv(G.cols(), false);
  for (int c : cover.cols)
    in_cv[c] = true;

  const std::vector<int> old_parent = d.hyperedges_at(b.parent);
  const std::vector<int> old_child = d.hyperedges_at(b.child);
  const std::vector<int> old_vertices = d.vertices_at(bond);

  auto copy_parent = [&](int row, int nu, const Coefficient &w) {
    const auto &rep = d.hyperedge(bg.row_rep[row]);
    auto verts = rep.vertices;
    verts[pslot] = nu;
    d.add_hyperedge(b.parent, rep.label, w, std::move(verts));
  };
  auto copy_child = [&](int col, int nu, const Coefficient &w) {
    const auto &rep = d.hyperedge(bg.col_rep[col]);
    auto verts = rep.vertices;
    verts[0] = nu;
    d.add_hyperedge(b.child, rep.label, w, std::move(verts));
  };

  for (int a : cover.rows) {
    int nu = d.add_vertex(bond);
    for (const auto &[i, q] : a_col[a])
      copy_parent(i, nu, Coefficient(q));
    std::map<int, std::vector<Coefficient>> right;
    for (const auto &[bb, c] : G.row(a)) {
      if (in_cv[bb])
        continue;
      for (const auto &[j, q] : b_row[bb])
        accumulate(right[j], coeff_scale(c, q));
    }
    for (const auto &[j, ws] : right)
      for (const auto &w : ws)
        copy_child(j, nu, w);
  }
  for (int bb : cover.cols) {
    int nu = d.add_vertex(bond);
    std::map<int, std::vector<Coefficient>> left;
    for (const auto &[a, c] : g_col[bb])
      for (const auto &[i, q] : a_col[a])
        accumulate(left[i], coeff_scale(c, q));
    for (const auto &[i, ws] : left)
      for (const auto &w : ws)
        copy_parent(i, nu, w);
    for (const auto &[j, q] : b_row[bb])
      copy_child(j, nu, Coefficient(q));
  }

  for (int e : old_parent)
    d.remove_hyperedge(e);
  for (int e : old_child)
    d.remove_hyperedge(e);
  for (int v : old_vertices)
    d.remove_vertex(v);
  d.collect_garbage();
}

BondOutcome optimize_bond(StateDiagram &d, int bond, Method method, int max_iter,
                          DigestCache &cache) {
  BondOutcome out;
  out.bond = bond;
  if (method == Method::Basic) {
    out.dim = d.bond_dim(bond);
    return out;
  }
  const bool checks = g_checks;
  auto v_keys = leaf_side_keys(d, bond, cache);
  auto u_keys = root_side_keys(d, bond, cache);
  BondGamma bg = build_gamma(d, bond, u_keys, v_keys);
  out.rows = bg.gamma.rows();
  out.cols = bg.gamma.cols();

  auto raw_match = hopcroft_karp(bg.gamma);
  CoverSolution raw_cover = konig_cover(bg.gamma, raw_match);
  out.cover_raw = raw_cover.size();
  if (checks) {
    require(raw_cover.size() == raw_match.size(), "konig size");
    require(cover_valid(bg.gamma, raw_cover), "cover validity");
    ++g_konig;
    ++g_cover;
  }

  EliminationRecord rec;
  CoverSolution cover;
  if (method == Method::Sge) {
    EliminationRecord reduced = sge(bg.gamma, max_iter);
    auto match = hopcroft_karp(reduced.gamma_tilde);
    CoverSolution rc = konig_cover(reduced.gamma_tilde, match);
    out.reduced_rows = reduced.gamma_tilde.rows();
    out.reduced_cols = reduced.gamma_tilde.cols();
    out.cover_reduced = rc.size();
    if (checks) {
      require(factorization_holds(bg.gamma, reduced), "A*gamma_tilde*B == gamma");
      require(rc.size() == match.size(), "konig size");
      require(cover_valid(reduced.gamma_tilde, rc), "cover validity");
      ++g_factorization;
      ++g_konig;
      ++g_cover;
    }
    if (rc.size() > raw_cover.size()) {
      rec = identity_record(bg.gamma);
      cover = raw_cover;
    } else {
      rec = std::move(reduced);
      cover = std::move(rc);
      out.used_reduced = true;
    }
  } else {
    rec = identity_record(bg.gamma);
    cover = raw_cover;
  }

  rewire_bond(d, bond, bg, rec, cover);
  out.dim = d.bond_dim(bond);
  if (checks) {
    require(out.dim <= raw_cover.size(), "fallback monotonicity");
    ++g_fallback;
    d.check();
  }
  return out;
}

StateDiagram optimize_diagram(const StateDiagram &d, Method method, int max_iter,
                              std::vector<BondOutcome> *log) {
  StateDiagram out = d;
  if (method == Method::Basic)
    return out;
  const auto &t = out.topology();
  DigestCache cache;
  for (const auto &level : bfs_bond_levels(t)) {
    std::vector<int> bonds;
    for (const auto &b : level)
      bonds.push_back(t.bond_index(b));
    // Leaf-side digests first; the subtrees below this level are fixed for
    // the whole level, so these stay cached for the second pass.
    for (int b : bonds)
      leaf_side_keys(out, b, cache);
    for (int b : bonds) {
      auto r = optimize_bond(out, b, method, max_iter, cache);
      if (log)
        log->push_back(r);
    }
  }
  if (g_checks && g_check_terms) {
    require(sorted_terms(enumerate_terms(out)) == sorted_terms(enumerate_terms(d)),
            "term preservation");
    ++g_terms;
  }
  return out;
}

} // namespace ttno
