#pragma once

#include "ttno/symbolic.hpp"
#include "ttno/topology.hpp"

#include <string>
#include <vector>

namespace ttno {

struct Hyperedge {
  int id = -1;
  int node = 0;
  std::string label;
  Coefficient factor;
  /// One vertex per incident bond, aligned with incident_bonds(node).
  std::vector<int> vertices;
};

struct Vertex {
  int id = -1;
  int bond = -1;
};

/// Hypergraph of site-local operator labels (hyperedges) joined through
/// virtual bond indices (vertices).
class StateDiagram {
public:
  explicit StateDiagram(TreeTopology topology);

  const TreeTopology &topology() const { return topo_; }

  int add_vertex(int bond);
  int add_hyperedge(int node, std::string label, Coefficient factor,
                    std::vector<int> vertices);
  void remove_hyperedge(int id);
  void remove_vertex(int id);

  const Hyperedge &hyperedge(int id) const { return edges_[id]; }
  const Vertex &vertex(int id) const { return vertices_[id]; }
  bool alive_hyperedge(int id) const { return edge_alive_[id]; }
  bool alive_vertex(int id) const { return vertex_alive_[id]; }

  /// Live hyperedges at a node, in creation order.
  const std::vector<int> &hyperedges_at(int node) const;
  /// Live vertices of a bond, in creation order.
  const std::vector<int> &vertices_at(int bond) const;

  std::size_t bond_dim(int bond) const { return vertices_at(bond).size(); }
  /// Dimensions in topology bond order.
  std::vector<std::size_t> bond_dims() const;
  std::size_t hyperedge_count() const;

  /// Drops vertices missing a side and hyperedges that reference dropped
  /// vertices, until nothing changes. Such pieces lie on no complete term.
  void collect_garbage();
  /// Throws std::logic_error when a structural invariant is broken.
  void check() const;

private:
  void compact_node(int pos) const;
  void compact_bond(int bond) const;

  TreeTopology topo_;
  std::vector<Hyperedge> edges_;
  std::vector<bool> edge_alive_;
  std::vector<Vertex> vertices_;
  std::vector<bool> vertex_alive_;
  mutable std::vector<std::vector<int>> node_edges_;
  mutable std::vector<bool> node_dirty_;
  mutable std::vector<std::vector<int>> bond_vertices_;
  mutable std::vector<bool> bond_dirty_;
};

/// One single-term chain per term, factor at the root hyperedge.
/// Throws SiteMismatch.
StateDiagram stack_terms(const SymbolicOperator &op, const TreeTopology &t);

struct TensorEntry {
  std::vector<int> indices; ///< aligned with incident_bonds(node)
  std::string label;
  Coefficient coefficient;
};

struct SymbolicTTNO {
  TreeTopology topology;
  std::vector<int> bond_dims; ///< topology bond order
  /// Indexed by topology.position(node).
  std::vector<std::vector<TensorEntry>> tensors;

  const std::vector<TensorEntry> &tensor(int node) const {
    return tensors[topology.position(node)];
  }
};

SymbolicTTNO diagram_to_ttno(const StateDiagram &d);

/// All connected hyperedge selections, folded by product string and symbol.
/// One term per (string, symbol) with a nonzero total, in order of first
/// appearance.
std::vector<ProductTerm> enumerate_terms(const StateDiagram &d);

std::string export_diagram(const StateDiagram &d);
std::string serialize_ttno(const SymbolicTTNO &t);
SymbolicTTNO parse_ttno(const std::string &text);

} // namespace ttno
