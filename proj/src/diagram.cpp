#include "ttno/diagram.hpp"

#include "ttno/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <deque>
#include <stdexcept>
#include <unordered_map>

namespace ttno {

using nlohmann::json;

StateDiagram::StateDiagram(TreeTopology topology)
    : topo_(std::move(topology)), node_edges_(topo_.size()),
      node_dirty_(topo_.size(), false), bond_vertices_(topo_.bonds().size()),
      bond_dirty_(topo_.bonds().size(), false) {}

int StateDiagram::add_vertex(int bond) {
  int id = static_cast<int>(vertices_.size());
  vertices_.push_back({id, bond});
  vertex_alive_.push_back(true);
  bond_vertices_[bond].push_back(id);
  return id;
}

int StateDiagram::add_hyperedge(int node, std::string label, Coefficient factor,
                                std::vector<int> vertices) {
  const auto &inc = topo_.incident_bonds(node);
  if (vertices.size() != inc.size())
    throw std::logic_error("hyperedge vertex count does not match node degree");
  for (std::size_t k = 0; k < inc.size(); ++k)
    if (!vertex_alive_.at(vertices[k]) || vertices_[vertices[k]].bond != inc[k])
      throw std::logic_error("hyperedge references a vertex on the wrong bond");
  int id = static_cast<int>(edges_.size());
  edges_.push_back({id, node, std::move(label), std::move(factor),
                    std::move(vertices)});
  edge_alive_.push_back(true);
  node_edges_[topo_.position(node)].push_back(id);
  return id;
}

void StateDiagram::remove_hyperedge(int id) {
  if (!edge_alive_[id])
    return;
  edge_alive_[id] = false;
  node_dirty_[topo_.position(edges_[id].node)] = true;
}

void StateDiagram::remove_vertex(int id) {
  if (!vertex_alive_[id])
    return;
  vertex_alive_[id] = false;
  bond_dirty_[vertices_[id].bond] = true;
}

void StateDiagram::compact_node(int pos) const {
  if (!node_dirty_[pos])
    return;
  auto &v = node_edges_[pos];
  v.erase(std::remove_if(v.begin(), v.end(),
                         [&](int e) { return !edge_alive_[e]; }),
          v.end());
  node_dirty_[pos] = false;
}

void StateDiagram::compact_bond(int bond) const {
  if (!bond_dirty_[bond])
    return;
  auto &v = bond_vertices_[bond];
  v.erase(std::remove_if(v.begin(), v.end(),
                         [&](int x) { return !vertex_alive_[x]; }),
          v.end());
  bond_dirty_[bond] = false;
}

const std::vector<int> &StateDiagram::hyperedges_at(int node) const {
  int pos = topo_.position(node);
  compact_node(pos);
  return node_edges_[pos];
}

const std::vector<int> &StateDiagram::vertices_at(int bond) const {
  compact_bond(bond);
  return bond_vertices_[bond];
}

std::vector<std::size_t> StateDiagram::bond_dims() const {
  std::vector<std::size_t> out;
  for (std::size_t b = 0; b < topo_.bonds().size(); ++b)
    out.push_back(bond_dim(static_cast<int>(b)));
  return out;
}

std::size_t StateDiagram::hyperedge_count() const {
  std::size_t n = 0;
  for (const auto &node : topo_.nodes())
    n += hyperedges_at(node.id).size();
  return n;
}

void StateDiagram::collect_garbage() {
  const std::size_t nv = vertices_.size();
  // side 0 counts references from the parent node, side 1 from the child.
  std::vector<std::array<int, 2>> count(nv, {0, 0});
  std::vector<std::vector<int>> refs(nv);
  for (const auto &node : topo_.nodes()) {
    for (int e : hyperedges_at(node.id)) {
      const auto &inc = topo_.incident_bonds(node.id);
      for (std::size_t k = 0; k < inc.size(); ++k) {
        int v = edges_[e].vertices[k];
        int side = topo_.bonds()[inc[k]].parent == node.id ? 0 : 1;
        ++count[v][side];
        refs[v].push_back(e);
      }
    }
  }
  std::deque<int> dead;
  for (std::size_t v = 0; v < nv; ++v)
    if (vertex_alive_[v] && (count[v][0] == 0 || count[v][1] == 0))
      dead.push_back(static_cast<int>(v));
  while (!dead.empty()) {
    int v = dead.front();
    dead.pop_front();
    if (!vertex_alive_[v])
      continue;
    remove_vertex(v);
    for (int e : refs[v]) {
      if (!edge_alive_[e])
        continue;
      remove_hyperedge(e);
      const auto &h = edges_[e];
      const auto &inc = topo_.incident_bonds(h.node);
      for (std::size_t k = 0; k < inc.size(); ++k) {
        int w = h.vertices[k];
        if (w == v || !vertex_alive_[w])
          continue;
        int side = topo_.bonds()[inc[k]].parent == h.node ? 0 : 1;
        if (--count[w][side] == 0)
          dead.push_back(w);
      }
    }
  }
}

void StateDiagram::check() const {
  std::vector<std::array<int, 2>> count(vertices_.size(), {0, 0});
  for (const auto &node : topo_.nodes()) {
    const auto &inc = topo_.incident_bonds(node.id);
    for (int e : hyperedges_at(node.id)) {
      const auto &h = edges_[e];
      if (h.vertices.size() != inc.size())
        throw std::logic_error("hyperedge degree mismatch");
      if (h.factor.is_zero())
        throw std::logic_error("hyperedge with zero factor");
      for (std::size_t k = 0; k < inc.size(); ++k) {
        int v = h.vertices[k];
        if (!vertex_alive_[v] || vertices_[v].bond != inc[k])
          throw std::logic_error("hyperedge references a dead or foreign vertex");
        ++count[v][topo_.bonds()[inc[k]].parent == node.id ? 0 : 1];
      }
    }
  }
  for (std::size_t b = 0; b < topo_.bonds().size(); ++b)
    for (int v : vertices_at(static_cast<int>(b)))
      if (count[v][0] == 0 || count[v][1] == 0)
        throw std::logic_error("dangling vertex on bond " + std::to_string(b));
}

StateDiagram stack_terms(const SymbolicOperator &op, const TreeTopology &t) {
  for (const auto &s : op.sites) {
    if (!t.has_node(s.id))
      throw Error(ErrorCode::SiteMismatch,
                  "site " + std::to_string(s.id) + " not in topology");
    if (t.dim(s.id) != s.dim || s.dim == 1)
      throw Error(ErrorCode::SiteMismatch,
                  "site " + std::to_string(s.id) + " dimension mismatch");
  }
  for (const auto &term : op.terms)
    for (const auto &[site, label] : term.factors)
      if (!op.has_site(site))
        throw Error(ErrorCode::SiteMismatch,
                    "term acts on undeclared site " + std::to_string(site));

  StateDiagram d(t);
  const auto nb = t.bonds().size();
  for (const auto &term : op.terms) {
    std::vector<int> v(nb);
    for (std::size_t b = 0; b < nb; ++b)
      v[b] = d.add_vertex(static_cast<int>(b));
    for (int node : t.bfs_order()) {
      std::vector<int> refs;
      for (int b : t.incident_bonds(node))
        refs.push_back(v[b]);
      auto it = term.factors.find(node);
      std::string label = it == term.factors.end() ? kIdentity : it->second;
      Coefficient f = node == t.root() ? term.coefficient : Coefficient(1, 1);
      d.add_hyperedge(node, label, f, refs);
    }
  }
  return d;
}

SymbolicTTNO diagram_to_ttno(const StateDiagram &d) {
  const auto &t = d.topology();
  SymbolicTTNO out;
  out.topology = t;
  std::unordered_map<int, int> ordinal;
  for (std::size_t b = 0; b < t.bonds().size(); ++b) {
    const auto &vs = d.vertices_at(static_cast<int>(b));
    out.bond_dims.push_back(static_cast<int>(vs.size()));
    for (std::size_t k = 0; k < vs.size(); ++k)
      ordinal[vs[k]] = static_cast<int>(k);
  }
  out.tensors.resize(t.size());
  for (const auto &node : t.nodes()) {
    auto &entries = out.tensors[t.position(node.id)];
    for (int e : d.hyperedges_at(node.id)) {
      const auto &h = d.hyperedge(e);
      TensorEntry entry;
      for (int v : h.vertices)
        entry.indices.push_back(ordinal.at(v));
      entry.label = h.label;
      entry.coefficient = h.factor;
      auto same = std::find_if(entries.begin(), entries.end(), [&](const TensorEntry &x) {
        return x.indices == entry.indices && x.label == entry.label &&
               can_add(x.coefficient, entry.coefficient);
      });
      if (same == entries.end()) {
        entries.push_back(std::move(entry));
      } else {
        same->coefficient = coeff_add(same->coefficient, entry.coefficient);
        if (same->coefficient.is_zero())
          entries.erase(same);
      }
    }
  }
  return out;
}

std::vector<ProductTerm> enumerate_terms(const StateDiagram &d) {
  const auto &t = d.topology();
  const auto &order = t.bfs_order();
  // child-side hyperedges grouped by their parent-bond vertex
  std::vector<std::unordered_map<int, std::vector<int>>> below(t.bonds().size());
  for (int node : order) {
    int pb = t.parent_bond(node);
    if (pb < 0)
      continue;
    for (int e : d.hyperedges_at(node))
      below[pb][d.hyperedge(e).vertices[0]].push_back(e);
  }

  std::vector<std::map<int, std::string>> strings;
  std::map<std::map<int, std::string>, std::size_t> string_index;
  // per string: symbol name -> (first-seen rank, total)
  std::vector<std::map<std::string, std::pair<std::size_t, Rational>>> totals;
  std::size_t seen = 0;

  std::vector<int> chosen(t.size(), -1);
  auto record = [&]() {
    std::map<int, std::string> factors;
    Rational c = 1;
    Symbol s;
    for (int node : order) {
      const auto &h = d.hyperedge(chosen[t.position(node)]);
      if (h.label != kIdentity)
        factors[node] = h.label;
      c *= h.factor.rational();
      s = s * h.factor.symbol();
    }
    auto [it, fresh] = string_index.try_emplace(factors, strings.size());
    if (fresh) {
      strings.push_back(factors);
      totals.emplace_back();
    }
    auto &slot = totals[it->second];
    auto [jt, fresh_sym] = slot.try_emplace(s.name(), seen, Rational(0));
    if (fresh_sym)
      ++seen;
    jt->second.second += c;
  };

  auto walk = [&](auto &&self, std::size_t k) -> void {
    if (k == order.size()) {
      record();
      return;
    }
    int node = order[k];
    const std::vector<int> *cands;
    if (node == t.root()) {
      cands = &d.hyperedges_at(node);
    } else {
      int p = t.parent(node);
      int pb = t.parent_bond(node);
      const auto &ph = d.hyperedge(chosen[t.position(p)]);
      int v = ph.vertices[t.slot(p, pb)];
      auto it = below[pb].find(v);
      if (it == below[pb].end())
        return;
      cands = &it->second;
    }
    for (int e : *cands) {
      chosen[t.position(node)] = e;
      self(self, k + 1);
    }
  };
  walk(walk, 0);

  struct Item {
    std::size_t rank;
    ProductTerm term;
  };
  std::vector<Item> items;
  for (std::size_t i = 0; i < strings.size(); ++i)
    for (const auto &[name, rv] : totals[i])
      if (rv.second != 0)
        items.push_back({rv.first, {Coefficient(rv.second, Symbol::parse(name)), strings[i]}});
  std::sort(items.begin(), items.end(),
            [](const Item &a, const Item &b) { return a.rank < b.rank; });
  std::vector<ProductTerm> out;
  for (auto &it : items)
    out.push_back(std::move(it.term));
  return out;
}

namespace {

json coeff_json(const Coefficient &c) {
  return {{"num", c.rational().get_num().get_str()},
          {"den", c.rational().get_den().get_str()},
          {"symbol", c.symbol().name()}};
}

Coefficient coeff_from_json(const json &j) {
  auto integer = [](const json &x) {
    return x.is_string() ? mpz_class(x.get<std::string>())
                         : mpz_class(std::to_string(x.get<long long>()));
  };
  mpz_class den = integer(j.at("den"));
  if (den == 0)
    throw Error(ErrorCode::ParseError, "zero denominator");
  return Coefficient(Rational(integer(j.at("num")), den),
                     Symbol::parse(j.at("symbol").get<std::string>()));
}

} // namespace

std::string export_diagram(const StateDiagram &d) {
  const auto &t = d.topology();
  json doc;
  doc["nodes"] = json::array();
  for (int node : t.bfs_order()) {
    json hs = json::array();
    for (int e : d.hyperedges_at(node)) {
      const auto &h = d.hyperedge(e);
      hs.push_back({{"id", h.id},
                    {"label", h.label},
                    {"factor", coeff_json(h.factor)},
                    {"vertices", h.vertices}});
    }
    doc["nodes"].push_back({{"id", node}, {"hyperedges", hs}});
  }
  doc["bonds"] = json::array();
  for (std::size_t b = 0; b < t.bonds().size(); ++b)
    doc["bonds"].push_back({{"parent", t.bonds()[b].parent},
                            {"child", t.bonds()[b].child},
                            {"vertices", d.vertices_at(static_cast<int>(b))}});
  return doc.dump(2) + "\n";
}

std::string serialize_ttno(const SymbolicTTNO &ttno) {
  const auto &t = ttno.topology;
  json doc;
  doc["topology"] = json::parse(serialize_topology(t));
  doc["bonds"] = json::array();
  for (std::size_t b = 0; b < t.bonds().size(); ++b)
    doc["bonds"].push_back({{"parent", t.bonds()[b].parent},
                            {"child", t.bonds()[b].child},
                            {"dim", ttno.bond_dims[b]}});
  doc["nodes"] = json::array();
  for (int node : t.bfs_order()) {
    json entries = json::array();
    for (const auto &e : ttno.tensor(node))
      entries.push_back({{"indices", e.indices},
                         {"label", e.label},
                         {"coeff", coeff_json(e.coefficient)}});
    doc["nodes"].push_back({{"id", node}, {"entries", entries}});
  }
  return doc.dump(2) + "\n";
}

SymbolicTTNO parse_ttno(const std::string &text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error &e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  try {
    SymbolicTTNO out;
    out.topology = parse_topology(doc.at("topology").dump());
    const auto &t = out.topology;
    out.bond_dims.assign(t.bonds().size(), 0);
    for (const auto &b : doc.at("bonds")) {
      int idx = t.bond_index({b.at("parent").get<int>(), b.at("child").get<int>()});
      out.bond_dims[idx] = b.at("dim").get<int>();
    }
    out.tensors.resize(t.size());
    for (const auto &n : doc.at("nodes")) {
      int node = n.at("id").get<int>();
      const auto &inc = t.incident_bonds(node);
      for (const auto &e : n.at("entries")) {
        TensorEntry entry;
        entry.indices = e.at("indices").get<std::vector<int>>();
        entry.label = e.at("label").get<std::string>();
        entry.coefficient = coeff_from_json(e.at("coeff"));
        if (entry.indices.size() != inc.size())
          throw Error(ErrorCode::ParseError, "entry index count mismatch");
        for (std::size_t k = 0; k < inc.size(); ++k)
          if (entry.indices[k] < 0 || entry.indices[k] >= out.bond_dims[inc[k]])
            throw Error(ErrorCode::ParseError, "entry index out of range");
        out.tensors[t.position(node)].push_back(std::move(entry));
      }
    }
    return out;
  } catch (const json::exception &e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

} // namespace ttno
