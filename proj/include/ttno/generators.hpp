#pragma once

#include "ttno/symbolic.hpp"

#include <cstdint>
#include <string>

namespace ttno {

enum class CoeffMode { Distinct, Uniform, Partial };

struct CoefficientMode {
  CoeffMode mode = CoeffMode::Distinct;
  int pool = 0; ///< symbol pool size for Partial
};

/// "distinct", "uniform" or "partial:N". Throws BadParams.
CoefficientMode parse_coeff_mode(const std::string &s);
std::string coeff_mode_name(const CoefficientMode &m);

/// K distinct Pauli strings on sites 0..L-1. Each term acts on a uniformly
/// random subset of 1..min(4, L) sites with uniformly random X/Y/Z.
/// Symbols: g0.. (distinct), g (uniform), g0..g{pool-1} (partial).
SymbolicOperator random_hamiltonian(int L, int K, const CoefficientMode &mode,
                                    std::uint64_t seed);

/// (1/d) J X_i X_j for every site pair at Manhattan distance d, then g Z_i
/// for every site. Site (x, y) has id y*L + x.
SymbolicOperator lattice_hamiltonian(int L, const std::string &J = "J",
                                     const std::string &g = "g");

struct HeomParams {
  int molecules = 1;
  int modes = 0;
  bool homogeneous = false;
};

/// Opaque-label terms of the HEOM super-Hamiltonian on the sites of
/// heom_sites(). System terms appear on hat sites and negated on check sites.
SymbolicOperator heom_hamiltonian(const HeomParams &p);

} // namespace ttno
