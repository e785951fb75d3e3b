#include "ttno/topology.hpp"

#include "ttno/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <deque>
#include <numeric>
#include <random>
#include <set>

namespace ttno {

namespace {

int find_root(std::vector<int> &uf, int x) {
  while (uf[x] != x) {
    uf[x] = uf[uf[x]];
    x = uf[x];
  }
  return x;
}

} // namespace

void validate(const std::vector<TopologyNode> &nodes,
              const std::vector<std::pair<int, int>> &edges) {
  std::vector<int> ids;
  for (const auto &n : nodes)
    ids.push_back(n.id);
  std::sort(ids.begin(), ids.end());
  for (std::size_t i = 1; i < ids.size(); ++i)
    if (ids[i] == ids[i - 1])
      throw Error(ErrorCode::DuplicateId, std::to_string(ids[i]));
  if (nodes.empty())
    throw Error(ErrorCode::Disconnected, "empty topology");
  auto pos = [&](int id) {
    auto it = std::lower_bound(ids.begin(), ids.end(), id);
    if (it == ids.end() || *it != id)
      throw Error(ErrorCode::UnknownSite,
                  "edge references node " + std::to_string(id));
    return static_cast<int>(it - ids.begin());
  };
  std::vector<int> uf(ids.size());
  std::iota(uf.begin(), uf.end(), 0);
  for (const auto &[a, b] : edges) {
    int ra = find_root(uf, pos(a)), rb = find_root(uf, pos(b));
    if (ra == rb)
      throw Error(ErrorCode::CycleDetected,
                  "edge " + std::to_string(a) + "-" + std::to_string(b));
    uf[ra] = rb;
  }
  if (edges.size() + 1 != nodes.size())
    throw Error(ErrorCode::Disconnected,
                std::to_string(nodes.size()) + " nodes, " +
                    std::to_string(edges.size()) + " edges");
}

TreeTopology::TreeTopology(std::vector<TopologyNode> nodes,
                           std::vector<std::pair<int, int>> edges, int root)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
  validate(nodes_, edges_);
  for (const auto &n : nodes_)
    if (n.dim < 1)
      throw Error(ErrorCode::BadParams,
                  "node " + std::to_string(n.id) + " has dim < 1");
  std::sort(nodes_.begin(), nodes_.end(),
            [](const TopologyNode &a, const TopologyNode &b) { return a.id < b.id; });
  for (const auto &n : nodes_)
    ids_sorted_.push_back(n.id);
  root_ = root < 0 ? ids_sorted_.front() : root;
  if (!has_node(root_))
    throw Error(ErrorCode::UnknownSite, "root " + std::to_string(root_));

  const std::size_t n = nodes_.size();
  std::vector<std::vector<int>> adj(n);
  for (const auto &[a, b] : edges_) {
    adj[pos(a)].push_back(b);
    adj[pos(b)].push_back(a);
  }
  for (auto &a : adj)
    std::sort(a.begin(), a.end());

  parent_.assign(n, -1);
  children_.assign(n, {});
  depth_.assign(n, 0);
  std::vector<bool> seen(n, false);
  std::deque<int> queue{root_};
  seen[pos(root_)] = true;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    bfs_.push_back(u);
    for (int v : adj[pos(u)]) {
      if (seen[pos(v)])
        continue;
      seen[pos(v)] = true;
      parent_[pos(v)] = u;
      depth_[pos(v)] = depth_[pos(u)] + 1;
      children_[pos(u)].push_back(v);
      queue.push_back(v);
    }
  }

  // BFS order already lists children by parent discovery order then id.
  parent_bond_.assign(n, -1);
  for (int u : bfs_)
    for (int c : children_[pos(u)]) {
      parent_bond_[pos(c)] = static_cast<int>(bonds_.size());
      bonds_.push_back({u, c});
    }
  incident_.assign(n, {});
  for (std::size_t i = 0; i < n; ++i) {
    if (parent_bond_[i] >= 0)
      incident_[i].push_back(parent_bond_[i]);
    for (int c : children_[i])
      incident_[i].push_back(parent_bond_[pos(c)]);
  }
}

int TreeTopology::pos(int id) const {
  auto it = std::lower_bound(ids_sorted_.begin(), ids_sorted_.end(), id);
  if (it == ids_sorted_.end() || *it != id)
    throw Error(ErrorCode::UnknownSite, "node " + std::to_string(id));
  return static_cast<int>(it - ids_sorted_.begin());
}

bool TreeTopology::has_node(int id) const {
  return std::binary_search(ids_sorted_.begin(), ids_sorted_.end(), id);
}

int TreeTopology::dim(int id) const { return nodes_[pos(id)].dim; }
int TreeTopology::parent(int id) const { return parent_[pos(id)]; }
const std::vector<int> &TreeTopology::children(int id) const {
  return children_[pos(id)];
}
int TreeTopology::depth(int id) const { return depth_[pos(id)]; }
int TreeTopology::parent_bond(int id) const { return parent_bond_[pos(id)]; }
const std::vector<int> &TreeTopology::incident_bonds(int id) const {
  return incident_[pos(id)];
}

int TreeTopology::slot(int node, int bond) const {
  const auto &inc = incident_bonds(node);
  for (std::size_t i = 0; i < inc.size(); ++i)
    if (inc[i] == bond)
      return static_cast<int>(i);
  return -1;
}

std::vector<int> TreeTopology::physical_nodes() const {
  std::vector<int> out;
  for (int u : bfs_)
    if (dim(u) > 1)
      out.push_back(u);
  return out;
}

int TreeTopology::bond_index(const Bond &b) const {
  if (!has_node(b.child) || !has_node(b.parent) || parent(b.child) != b.parent)
    throw Error(ErrorCode::UnknownBond, "(" + std::to_string(b.parent) + "," +
                                            std::to_string(b.child) + ")");
  return parent_bond(b.child);
}

TreeTopology TreeTopology::rerooted(int new_root) const {
  return TreeTopology(nodes_, edges_, new_root);
}

std::vector<std::vector<Bond>> bfs_bond_levels(const TreeTopology &t) {
  std::vector<std::vector<Bond>> levels;
  for (const auto &b : t.bonds()) {
    auto k = static_cast<std::size_t>(t.depth(b.child) - 1);
    if (levels.size() <= k)
      levels.resize(k + 1);
    levels[k].push_back(b);
  }
  return levels;
}

std::pair<std::vector<int>, std::vector<int>>
split_at_bond(const TreeTopology &t, const Bond &bond) {
  t.bond_index(bond);
  std::vector<int> leaf;
  std::vector<int> stack{bond.child};
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    leaf.push_back(u);
    for (int c : t.children(u))
      stack.push_back(c);
  }
  std::sort(leaf.begin(), leaf.end());
  std::vector<int> root_side;
  for (const auto &n : t.nodes())
    if (!std::binary_search(leaf.begin(), leaf.end(), n.id))
      root_side.push_back(n.id);
  return {root_side, leaf};
}

namespace {

void require(bool ok, const std::string &msg) {
  if (!ok)
    throw Error(ErrorCode::BadParams, msg);
}

std::vector<TopologyNode> grid_nodes(int L) {
  std::vector<TopologyNode> nodes;
  for (int i = 0; i < L * L; ++i)
    nodes.push_back({i, 2});
  return nodes;
}

int gid(int L, int x, int y) { return y * L + x; }

void add_row_chains(int L, std::vector<std::pair<int, int>> &edges) {
  for (int y = 0; y < L; ++y)
    for (int x = 0; x + 1 < L; ++x)
      edges.emplace_back(gid(L, x, y), gid(L, x + 1, y));
}

} // namespace

TreeTopology chain_topology(int length) {
  require(length >= 1, "chain length must be >= 1");
  std::vector<TopologyNode> nodes;
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < length; ++i) {
    nodes.push_back({i, 2});
    if (i > 0)
      edges.emplace_back(i - 1, i);
  }
  return TreeTopology(nodes, edges);
}

TreeTopology snake_topology(int L) {
  require(L >= 1, "L must be >= 1");
  std::vector<std::pair<int, int>> edges;
  add_row_chains(L, edges);
  for (int y = 0; y + 1 < L; ++y) {
    int x = (y % 2 == 0) ? L - 1 : 0;
    edges.emplace_back(gid(L, x, y), gid(L, x, y + 1));
  }
  return TreeTopology(grid_nodes(L), edges);
}

TreeTopology fork_topology(int L) {
  require(L >= 1, "L must be >= 1");
  std::vector<std::pair<int, int>> edges;
  add_row_chains(L, edges);
  for (int y = 0; y + 1 < L; ++y)
    edges.emplace_back(gid(L, 0, y), gid(L, 0, y + 1));
  return TreeTopology(grid_nodes(L), edges);
}

TreeTopology fork_virtual_topology(int L) {
  require(L >= 1, "L must be >= 1");
  auto nodes = grid_nodes(L);
  std::vector<std::pair<int, int>> edges;
  add_row_chains(L, edges);
  if (L >= 2) {
    // A chain of virtual nodes; the first and last take two row heads each,
    // the inner ones one, so no virtual node exceeds degree 3.
    int nv = std::max(1, L - 2);
    int base = L * L;
    for (int k = 0; k < nv; ++k) {
      nodes.push_back({base + k, 1});
      if (k > 0)
        edges.emplace_back(base + k - 1, base + k);
    }
    for (int y = 0; y < L; ++y) {
      int k = std::clamp(y - 1, 0, nv - 1);
      edges.emplace_back(gid(L, 0, y), base + k);
    }
  }
  return TreeTopology(nodes, edges);
}

TreeTopology staircase_topology(int L) {
  require(L >= 1, "L must be >= 1");
  std::vector<std::pair<int, int>> edges;
  add_row_chains(L, edges);
  for (int y = 0; y + 1 < L; ++y) {
    int x = L - 2 - y;
    edges.emplace_back(gid(L, x, y), gid(L, x, y + 1));
  }
  return TreeTopology(grid_nodes(L), edges);
}

TreeTopology binary_virtual_topology(int L) {
  require(L >= 1, "L must be >= 1");
  auto nodes = grid_nodes(L);
  std::vector<std::pair<int, int>> edges;
  int next = L * L;
  // Recursive bisection of the row-major site list.
  auto build = [&](auto &&self, int lo, int hi) -> int {
    if (hi - lo == 1)
      return lo;
    int v = next++;
    nodes.push_back({v, 1});
    int mid = lo + (hi - lo + 1) / 2;
    edges.emplace_back(v, self(self, lo, mid));
    edges.emplace_back(v, self(self, mid, hi));
    return v;
  };
  int root = build(build, 0, L * L);
  return TreeTopology(nodes, edges, root);
}

HeomSites heom_sites(int molecules, int modes) {
  require(molecules >= 1, "M must be >= 1");
  require(modes >= 0, "N must be >= 0");
  HeomSites s;
  for (int a = 0; a <= molecules; ++a) {
    int base = a * (modes + 2);
    s.hat.push_back(base);
    s.check.push_back(base + 1);
    std::vector<int> bath;
    for (int b = 0; b < modes; ++b)
      bath.push_back(base + 2 + b);
    s.bath.push_back(bath);
  }
  return s;
}

namespace {

std::vector<TopologyNode> heom_physical_nodes(const HeomSites &s) {
  std::vector<TopologyNode> nodes;
  for (std::size_t a = 0; a < s.hat.size(); ++a) {
    nodes.push_back({s.hat[a], 2});
    nodes.push_back({s.check[a], 2});
    for (int b : s.bath[a])
      nodes.push_back({b, 2});
  }
  return nodes;
}

} // namespace

TreeTopology heom_mps_topology(int molecules, int modes) {
  auto s = heom_sites(molecules, modes);
  std::vector<int> order;
  int left = (molecules + 1) / 2;
  auto append_rev_bath = [&](int a) {
    for (auto it = s.bath[a].rbegin(); it != s.bath[a].rend(); ++it)
      order.push_back(*it);
  };
  for (int i = 1; i <= left; ++i) {
    append_rev_bath(i);
    order.push_back(s.hat[i]);
    order.push_back(s.check[i]);
  }
  append_rev_bath(0);
  order.push_back(s.check[0]);
  order.push_back(s.hat[0]);
  for (int i = left + 1; i <= molecules; ++i) {
    order.push_back(s.hat[i]);
    order.push_back(s.check[i]);
    for (int b : s.bath[i])
      order.push_back(b);
  }
  std::vector<std::pair<int, int>> edges;
  for (std::size_t k = 1; k < order.size(); ++k)
    edges.emplace_back(order[k - 1], order[k]);
  return TreeTopology(heom_physical_nodes(s), edges, order.front());
}

TreeTopology heom_ttn_topology(int molecules, int modes) {
  auto s = heom_sites(molecules, modes);
  auto nodes = heom_physical_nodes(s);
  std::vector<std::pair<int, int>> edges;
  auto add_chain = [&](int a) {
    edges.emplace_back(s.hat[a], s.check[a]);
    int prev = s.check[a];
    for (int b : s.bath[a]) {
      edges.emplace_back(prev, b);
      prev = b;
    }
  };
  for (int a = 0; a <= molecules; ++a)
    add_chain(a);
  int next = (molecules + 1) * (modes + 2);
  auto build = [&](auto &&self, int lo, int hi) -> int {
    if (hi - lo == 1)
      return s.hat[lo];
    int v = next++;
    nodes.push_back({v, 1});
    int mid = lo + (hi - lo + 1) / 2;
    edges.emplace_back(v, self(self, lo, mid));
    edges.emplace_back(v, self(self, mid, hi));
    return v;
  };
  int root;
  if (molecules == 1) {
    root = next++;
    nodes.push_back({root, 1});
    edges.emplace_back(root, s.hat[1]);
  } else {
    root = build(build, 1, molecules + 1);
  }
  edges.emplace_back(root, s.hat[0]);
  return TreeTopology(nodes, edges, root);
}

TreeTopology generate_topology(const std::string &kind, int a, int b) {
  if (kind == "chain")
    return chain_topology(a);
  if (kind == "snake")
    return snake_topology(a);
  if (kind == "fork")
    return fork_topology(a);
  if (kind == "fork_virtual")
    return fork_virtual_topology(a);
  if (kind == "staircase")
    return staircase_topology(a);
  if (kind == "binary_virtual")
    return binary_virtual_topology(a);
  if (kind == "heom_mps")
    return heom_mps_topology(a, b);
  if (kind == "heom_ttn")
    return heom_ttn_topology(a, b);
  throw Error(ErrorCode::BadParams, "unknown topology kind '" + kind + "'");
}

TreeTopology random_tree(int n, std::uint64_t seed) {
  require(n >= 1, "tree size must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<TopologyNode> nodes;
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) {
    nodes.push_back({i, 2});
    if (i > 0)
      edges.emplace_back(std::uniform_int_distribution<int>(0, i - 1)(rng), i);
  }
  return TreeTopology(nodes, edges, 0);
}

TreeTopology parse_topology(const std::string &text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error &e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  try {
    std::vector<TopologyNode> nodes;
    for (const auto &n : doc.at("nodes"))
      nodes.push_back({n.at("id").get<int>(), n.value("dim", 2)});
    std::vector<std::pair<int, int>> edges;
    for (const auto &e : doc.at("edges")) {
      if (!e.is_array() || e.size() != 2)
        throw Error(ErrorCode::ParseError, "edge must be [a, b]");
      edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    int root = doc.contains("root") ? doc["root"].get<int>() : -1;
    return TreeTopology(nodes, edges, root);
  } catch (const json::exception &e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

std::string serialize_topology(const TreeTopology &t) {
  using nlohmann::json;
  json doc;
  doc["nodes"] = json::array();
  for (const auto &n : t.nodes())
    doc["nodes"].push_back({{"id", n.id}, {"dim", n.dim}});
  doc["edges"] = json::array();
  for (const auto &[a, b] : t.edges())
    doc["edges"].push_back({a, b});
  doc["root"] = t.root();
  return doc.dump(2) + "\n";
}

} // namespace ttno
