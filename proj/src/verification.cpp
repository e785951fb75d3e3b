#include "ttno/verification.hpp"

#include "ttno/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <random>

#include <Eigen/SVD>

namespace ttno {

using nlohmann::json;

namespace {

Eigen::MatrixXcd kron(const Eigen::MatrixXcd &a, const Eigen::MatrixXcd &b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Eigen::VectorXcd kron(const Eigen::VectorXcd &a, const Eigen::VectorXcd &b) {
  Eigen::VectorXcd out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

std::size_t total_dim(const std::vector<int> &dims) {
  std::size_t n = 1;
  for (int d : dims)
    n *= static_cast<std::size_t>(d);
  return n;
}

/// perm[n] = index in `from` order of the basis state with index n in `to`
/// order. Both orders list the same sites.
std::vector<std::size_t> site_permutation(const std::vector<int> &from,
                                          const std::vector<int> &to,
                                          const std::map<int, int> &dim) {
  std::map<int, std::size_t> from_stride;
  std::size_t s = 1;
  for (auto it = from.rbegin(); it != from.rend(); ++it) {
    from_stride[*it] = s;
    s *= dim.at(*it);
  }
  std::vector<std::size_t> perm(s);
  for (std::size_t n = 0; n < s; ++n) {
    std::size_t rest = n, idx = 0;
    for (auto it = to.rbegin(); it != to.rend(); ++it) {
      int d = dim.at(*it);
      idx += (rest % d) * from_stride[*it];
      rest /= d;
    }
    perm[n] = idx;
  }
  return perm;
}

/// Sites of the subtree below node in preorder (node first, children in
/// ascending id).
void preorder_physical(const TreeTopology &t, int node, std::vector<int> &out) {
  if (!t.is_virtual(node))
    out.push_back(node);
  for (int c : t.children(node))
    preorder_physical(t, c, out);
}

Complex entry_value(const TensorEntry &e, const SymbolTable &table) {
  return instantiate_coefficient(e.coefficient, table);
}

std::map<int, int> node_dims(const TreeTopology &t) {
  std::map<int, int> dims;
  for (const auto &n : t.nodes())
    dims[n.id] = n.dim;
  return dims;
}

/// Product of the physical dimensions below and at node.
std::size_t subtree_dim(const TreeTopology &t, const std::map<int, int> &dims,
                        int node) {
  std::size_t d = dims.at(node);
  for (int c : t.children(node))
    d *= subtree_dim(t, dims, c);
  return d;
}

} // namespace

std::vector<int> dense_site_order(const TreeTopology &t) {
  return t.physical_nodes();
}

Eigen::MatrixXcd dense_from_terms(const SymbolicOperator &op,
                                  const SymbolTable &table,
                                  const std::vector<int> &order) {
  std::vector<int> dims;
  for (int s : order)
    dims.push_back(op.has_site(s) ? op.site_dim(s) : 2);
  const std::size_t D = total_dim(dims);
  if (D > kMaxDenseDim)
    throw Error(ErrorCode::DimensionTooLarge,
                "dense dimension " + std::to_string(D) + " exceeds " +
                    std::to_string(kMaxDenseDim));
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(D, D);
  for (const auto &term : op.terms) {
    for (const auto &[site, label] : term.factors)
      if (std::find(order.begin(), order.end(), site) == order.end())
        throw Error(ErrorCode::SiteMismatch,
                    "site " + std::to_string(site) + " missing from site order");
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(1, 1);
    for (std::size_t k = 0; k < order.size(); ++k) {
      auto it = term.factors.find(order[k]);
      const std::string &label = it == term.factors.end() ? kIdentity : it->second;
      m = kron(m, resolve_label(op, label, dims[k]));
    }
    out += instantiate_coefficient(term.coefficient, table) * m;
  }
  return out;
}

Eigen::MatrixXcd dense_from_terms(const SymbolicOperator &op,
                                  const SymbolTable &table) {
  std::vector<int> order;
  for (const auto &s : op.sites)
    order.push_back(s.id);
  return dense_from_terms(op, table, order);
}

Eigen::MatrixXcd contract_ttno(const SymbolicTTNO &ttno,
                               const SymbolicOperator &labels,
                               const SymbolTable &table) {
  const auto &t = ttno.topology;
  const auto order = dense_site_order(t);
  const auto dims = node_dims(t);
  std::size_t D = 1;
  for (int s : order)
    D *= dims.at(s);
  if (D > kMaxDenseDim)
    throw Error(ErrorCode::DimensionTooLarge,
                "dense dimension " + std::to_string(D) + " exceeds " +
                    std::to_string(kMaxDenseDim));

  // Operator of each subtree for every index of its parent bond.
  auto sub = [&](auto &self, int node) -> std::vector<Eigen::MatrixXcd> {
    std::vector<std::vector<Eigen::MatrixXcd>> kids;
    const std::size_t dsub = subtree_dim(t, dims, node);
    for (int c : t.children(node))
      kids.push_back(self(self, c));
    int pb = t.parent_bond(node);
    std::size_t np = pb >= 0 ? ttno.bond_dims[pb] : 1;
    std::vector<Eigen::MatrixXcd> out(np, Eigen::MatrixXcd::Zero(dsub, dsub));
    std::size_t first = pb >= 0 ? 1 : 0;
    for (const auto &e : ttno.tensor(node)) {
      Eigen::MatrixXcd m = entry_value(e, table) *
                           resolve_label(labels, e.label, dims.at(node));
      for (std::size_t k = first; k < e.indices.size(); ++k)
        m = kron(m, kids[k - first][e.indices[k]]);
      out[pb >= 0 ? e.indices[0] : 0] += m;
    }
    return out;
  };
  Eigen::MatrixXcd m = sub(sub, t.root()).front();

  std::vector<int> pre;
  preorder_physical(t, t.root(), pre);
  auto perm = site_permutation(pre, order, dims);
  Eigen::MatrixXcd out(D, D);
  for (std::size_t r = 0; r < D; ++r)
    for (std::size_t c = 0; c < D; ++c)
      out(r, c) = m(perm[r], perm[c]);
  return out;
}

TTNS apply_to_state(const SymbolicTTNO &ttno, const SymbolicOperator &labels,
                    const std::map<int, Eigen::VectorXcd> &state,
                    const SymbolTable &table) {
  const auto &t = ttno.topology;
  TTNS out;
  out.topology = t;
  out.bond_dims = ttno.bond_dims;
  out.tensors.resize(t.size());
  for (const auto &n : t.nodes()) {
    Eigen::VectorXcd v;
    if (n.dim == 1) {
      v = Eigen::VectorXcd::Ones(1);
    } else {
      auto it = state.find(n.id);
      if (it == state.end() || it->second.size() != n.dim)
        throw Error(ErrorCode::SiteMismatch,
                    "no state vector for node " + std::to_string(n.id));
      v = it->second;
    }
    auto &tensor = out.tensors[t.position(n.id)];
    for (const auto &e : ttno.tensor(n.id)) {
      Eigen::VectorXcd w =
          entry_value(e, table) * (resolve_label(labels, e.label, n.dim) * v);
      auto [it, fresh] = tensor.try_emplace(e.indices, w);
      if (!fresh)
        it->second += w;
    }
  }
  return out;
}

Eigen::VectorXcd ttns_to_dense(const TTNS &s) {
  const auto &t = s.topology;
  const auto order = dense_site_order(t);
  const auto dims = node_dims(t);
  std::size_t D = 1;
  for (int x : order)
    D *= dims.at(x);
  if (D > (std::size_t(1) << 20))
    throw Error(ErrorCode::DimensionTooLarge, "state too large for dense form");

  auto sub = [&](auto &self, int node) -> std::vector<Eigen::VectorXcd> {
    std::vector<std::vector<Eigen::VectorXcd>> kids;
    const std::size_t dsub = subtree_dim(t, dims, node);
    for (int c : t.children(node))
      kids.push_back(self(self, c));
    int pb = t.parent_bond(node);
    std::size_t np = pb >= 0 ? s.bond_dims[pb] : 1;
    std::vector<Eigen::VectorXcd> out(np, Eigen::VectorXcd::Zero(dsub));
    std::size_t first = pb >= 0 ? 1 : 0;
    for (const auto &[idx, vec] : s.tensors[t.position(node)]) {
      Eigen::VectorXcd v = vec;
      for (std::size_t k = first; k < idx.size(); ++k)
        v = kron(v, kids[k - first][idx[k]]);
      out[pb >= 0 ? idx[0] : 0] += v;
    }
    return out;
  };
  Eigen::VectorXcd v = sub(sub, t.root()).front();

  std::vector<int> pre;
  preorder_physical(t, t.root(), pre);
  auto perm = site_permutation(pre, order, dims);
  Eigen::VectorXcd out(D);
  for (std::size_t n = 0; n < D; ++n)
    out(n) = v(perm[n]);
  return out;
}

Eigen::VectorXcd apply_terms_dense(const SymbolicOperator &op,
                                   const std::map<int, Eigen::VectorXcd> &state,
                                   const SymbolTable &table,
                                   const std::vector<int> &order) {
  std::size_t D = 1;
  for (int s : order)
    D *= state.at(s).size();
  if (D > (std::size_t(1) << 20))
    throw Error(ErrorCode::DimensionTooLarge, "state too large for dense form");
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(D);
  for (const auto &term : op.terms) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Ones(1);
    for (int s : order) {
      const auto &x = state.at(s);
      auto it = term.factors.find(s);
      if (it == term.factors.end())
        v = kron(v, x);
      else
        v = kron(v, Eigen::VectorXcd(
                        resolve_label(op, it->second, static_cast<int>(x.size())) * x));
    }
    out += instantiate_coefficient(term.coefficient, table) * v;
  }
  return out;
}

std::vector<std::size_t> BondReport::dims() const {
  std::vector<std::size_t> out;
  for (const auto &b : bonds)
    out.push_back(b.dim);
  return out;
}

std::string BondReport::to_json() const {
  json doc;
  doc["method"] = method;
  doc["bonds"] = json::array();
  for (const auto &b : bonds)
    doc["bonds"].push_back({{"parent", b.parent}, {"child", b.child}, {"dim", b.dim}});
  doc["d_mean"] = d_mean.get_str();
  doc["d_mean_value"] = d_mean.get_d();
  doc["d_max"] = d_max;
  return doc.dump();
}

BondReport make_report(const TreeTopology &t, const std::vector<std::size_t> &dims,
                       const std::string &method) {
  BondReport r;
  r.method = method;
  Rational sum = 0;
  for (std::size_t k = 0; k < t.bonds().size(); ++k) {
    r.bonds.push_back({t.bonds()[k].parent, t.bonds()[k].child, dims[k]});
    sum += static_cast<unsigned long>(dims[k]);
    r.d_max = std::max(r.d_max, dims[k]);
  }
  if (!dims.empty()) {
    r.d_mean = sum / Rational(static_cast<unsigned long>(dims.size()));
    r.d_mean.canonicalize();
  }
  return r;
}

BondReport metrics(const StateDiagram &d, const std::string &method) {
  return make_report(d.topology(), d.bond_dims(), method);
}

BondReport metrics(const SymbolicTTNO &t, const std::string &method) {
  std::vector<std::size_t> dims(t.bond_dims.begin(), t.bond_dims.end());
  return make_report(t.topology, dims, method);
}

BondReport svd_bond_ranks(const SymbolicOperator &op, const TreeTopology &t,
                          const SymbolTable &table, double tol) {
  const auto order = dense_site_order(t);
  Eigen::MatrixXcd m = dense_from_terms(op, table, order);
  const auto dims = node_dims(t);
  const std::size_t D = m.rows();

  std::vector<std::size_t> ranks;
  for (const auto &bond : t.bonds()) {
    auto [root_side, leaf_side] = split_at_bond(t, bond);
    std::vector<bool> leaf(order.size(), false);
    for (std::size_t k = 0; k < order.size(); ++k)
      leaf[k] = std::binary_search(leaf_side.begin(), leaf_side.end(), order[k]);
    // Split every basis index into its root-side and leaf-side parts.
    std::vector<std::size_t> rpart(D), lpart(D);
    std::size_t dr = 1, dl = 1;
    for (std::size_t k = 0; k < order.size(); ++k)
      (leaf[k] ? dl : dr) *= dims.at(order[k]);
    for (std::size_t n = 0; n < D; ++n) {
      std::size_t rest = n, r = 0, l = 0, sr = 1, sl = 1;
      for (std::size_t k = order.size(); k-- > 0;) {
        std::size_t d = dims.at(order[k]), digit = rest % d;
        rest /= d;
        if (leaf[k]) {
          l += digit * sl;
          sl *= d;
        } else {
          r += digit * sr;
          sr *= d;
        }
      }
      rpart[n] = r;
      lpart[n] = l;
    }
    Eigen::MatrixXcd mat = Eigen::MatrixXcd::Zero(dr * dr, dl * dl);
    for (std::size_t a = 0; a < D; ++a)
      for (std::size_t b = 0; b < D; ++b)
        mat(rpart[a] * dr + rpart[b], lpart[a] * dl + lpart[b]) = m(a, b);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(mat);
    const auto &s = svd.singularValues();
    std::size_t rank = 0;
    if (s.size() > 0 && s(0) > 0)
      for (Eigen::Index k = 0; k < s.size(); ++k)
        if (s(k) > tol * s(0))
          ++rank;
    ranks.push_back(rank);
  }
  return make_report(t, ranks, "svd");
}

SymbolTable random_instantiation(const SymbolicOperator &op, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mag(0.5, 1.5);
  std::bernoulli_distribution imag(0.5);
  SymbolTable table = op.symbols;
  std::vector<std::string> names;
  for (const auto &[name, v] : op.symbols.entries())
    names.push_back(name);
  for (auto s : used_symbols(op))
    if (!op.symbols.contains(s.name()))
      names.push_back(s.name());
  std::sort(names.begin(), names.end());
  for (const auto &name : names) {
    double x = mag(rng);
    table.assign(name, imag(rng) ? Complex(0, x) : Complex(x, 0));
  }
  return table;
}

} // namespace ttno
