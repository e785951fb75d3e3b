#pragma once

#include "ttno/diagram.hpp"
#include "ttno/symbolic.hpp"
#include "ttno/topology.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ttno {

/// Largest dense operator side handled by the dense oracles.
inline constexpr std::size_t kMaxDenseDim = 256;

/// Physical nodes of the topology in root-first BFS order.
std::vector<int> dense_site_order(const TreeTopology &t);

/// Sum of the terms as a dense matrix over the given site order; the first
/// site is the most significant tensor factor. Sites not in the order must
/// not carry factors. Throws DimensionTooLarge, UnassignedSymbol,
/// UnknownLabel.
Eigen::MatrixXcd dense_from_terms(const SymbolicOperator &op,
                                  const SymbolTable &table,
                                  const std::vector<int> &order);
/// Site order of op.sites.
Eigen::MatrixXcd dense_from_terms(const SymbolicOperator &op,
                                  const SymbolTable &table);

/// Full contraction over all virtual indices in dense_site_order. Labels are
/// resolved against `labels`.
Eigen::MatrixXcd contract_ttno(const SymbolicTTNO &ttno,
                               const SymbolicOperator &labels,
                               const SymbolTable &table);

/// Tree tensor network state: per node, a vector of physical amplitudes for
/// each combination of bond indices (aligned with incident_bonds).
struct TTNS {
  TreeTopology topology;
  std::vector<int> bond_dims;
  /// Indexed by topology.position(node).
  std::vector<std::map<std::vector<int>, Eigen::VectorXcd>> tensors;
};

/// Applies the TTNO to a product state given as one vector per physical
/// node (keyed by node id).
TTNS apply_to_state(const SymbolicTTNO &ttno, const SymbolicOperator &labels,
                    const std::map<int, Eigen::VectorXcd> &state,
                    const SymbolTable &table);

/// Dense amplitudes in dense_site_order. Throws DimensionTooLarge above
/// 2^20 amplitudes.
Eigen::VectorXcd ttns_to_dense(const TTNS &s);

/// Sum over terms of the coefficient times the product of O v per site,
/// as dense amplitudes in the given order.
Eigen::VectorXcd apply_terms_dense(const SymbolicOperator &op,
                                   const std::map<int, Eigen::VectorXcd> &state,
                                   const SymbolTable &table,
                                   const std::vector<int> &order);

struct BondDim {
  int parent = 0;
  int child = 0;
  std::size_t dim = 0;
};

struct BondReport {
  std::string method;
  std::vector<BondDim> bonds;
  Rational d_mean{0};
  std::size_t d_max = 0;

  std::vector<std::size_t> dims() const;
  std::string to_json() const;
};

/// Optimal ranks: singular values above tol * sigma_max of the operator
/// matricized across each bond.
BondReport svd_bond_ranks(const SymbolicOperator &op, const TreeTopology &t,
                          const SymbolTable &table, double tol = 1e-10);

BondReport metrics(const StateDiagram &d, const std::string &method);
BondReport metrics(const SymbolicTTNO &t, const std::string &method);
BondReport make_report(const TreeTopology &t, const std::vector<std::size_t> &dims,
                       const std::string &method);

/// Every declared symbol of op gets a value from [0.5, 1.5] or
/// i*[0.5, 1.5].
SymbolTable random_instantiation(const SymbolicOperator &op, std::uint64_t seed);

} // namespace ttno
