#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ttno {

struct TopologyNode {
  int id = 0;
  int dim = 2; ///< 1 marks a virtual node
};

/// Oriented edge; parent is on the root side.
struct Bond {
  int parent = 0;
  int child = 0;
  friend bool operator==(const Bond &a, const Bond &b) {
    return a.parent == b.parent && a.child == b.child;
  }
};

/// Throws DuplicateId, CycleDetected or Disconnected.
void validate(const std::vector<TopologyNode> &nodes,
              const std::vector<std::pair<int, int>> &edges);

/// Validated, rooted tree. Immutable after construction.
class TreeTopology {
public:
  TreeTopology() = default;
  /// root < 0 selects the lowest node id.
  TreeTopology(std::vector<TopologyNode> nodes,
               std::vector<std::pair<int, int>> edges, int root = -1);

  const std::vector<TopologyNode> &nodes() const { return nodes_; }
  const std::vector<std::pair<int, int>> &edges() const { return edges_; }
  int root() const { return root_; }
  std::size_t size() const { return nodes_.size(); }

  bool has_node(int id) const;
  int dim(int id) const;
  bool is_virtual(int id) const { return dim(id) == 1; }
  /// -1 for the root.
  int parent(int id) const;
  /// Ascending id.
  const std::vector<int> &children(int id) const;
  int depth(int id) const;
  const std::vector<int> &bfs_order() const { return bfs_; }
  /// Nodes with dim > 1 in BFS order.
  std::vector<int> physical_nodes() const;

  /// Bonds in BFS level order; position is the bond index.
  const std::vector<Bond> &bonds() const { return bonds_; }
  int bond_index(const Bond &b) const;
  /// -1 for the root.
  int parent_bond(int id) const;
  /// Parent bond first (if any), then child bonds by ascending child id.
  const std::vector<int> &incident_bonds(int id) const;
  /// Position of a bond in incident_bonds(node), -1 if not incident.
  int slot(int node, int bond) const;

  TreeTopology rerooted(int new_root) const;

  /// Dense position of a node id in 0..size()-1 (ascending id order).
  int position(int id) const { return pos(id); }

private:
  int pos(int id) const;

  std::vector<TopologyNode> nodes_;
  std::vector<std::pair<int, int>> edges_;
  int root_ = 0;
  std::vector<int> ids_sorted_;
  std::vector<int> parent_;
  std::vector<std::vector<int>> children_;
  std::vector<int> depth_;
  std::vector<int> bfs_;
  std::vector<Bond> bonds_;
  std::vector<int> parent_bond_;
  std::vector<std::vector<int>> incident_;
};

std::vector<std::vector<Bond>> bfs_bond_levels(const TreeTopology &t);

/// (root-side ids, leaf-side ids), both ascending. Throws UnknownBond.
std::pair<std::vector<int>, std::vector<int>>
split_at_bond(const TreeTopology &t, const Bond &bond);

// Layout generators. Grid site (x, y) has id y*L + x; virtual nodes follow.
TreeTopology chain_topology(int length);
TreeTopology snake_topology(int L);
TreeTopology fork_topology(int L);
TreeTopology fork_virtual_topology(int L);
TreeTopology staircase_topology(int L);
TreeTopology binary_virtual_topology(int L);

/// Site ids of the HEOM layouts, shared by both layouts and the generator.
/// Index 0 is the cavity, 1..M the molecules.
struct HeomSites {
  std::vector<int> hat, check;
  std::vector<std::vector<int>> bath;
};
HeomSites heom_sites(int molecules, int modes);
TreeTopology heom_mps_topology(int molecules, int modes);
TreeTopology heom_ttn_topology(int molecules, int modes);

/// kind is one of chain, snake, fork, fork_virtual, staircase,
/// binary_virtual (param a = L) or heom_mps, heom_ttn (a = M, b = N).
TreeTopology generate_topology(const std::string &kind, int a, int b = 0);

/// Random recursive tree on ids 0..n-1, all physical with dim 2, root 0.
TreeTopology random_tree(int n, std::uint64_t seed);

TreeTopology parse_topology(const std::string &text);
std::string serialize_topology(const TreeTopology &t);

} // namespace ttno
