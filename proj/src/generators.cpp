#include "ttno/generators.hpp"

#include "ttno/error.hpp"
#include "ttno/topology.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <random>
#include <set>

namespace ttno {

CoefficientMode parse_coeff_mode(const std::string &s) {
  if (s == "distinct")
    return {CoeffMode::Distinct, 0};
  if (s == "uniform")
    return {CoeffMode::Uniform, 0};
  if (s.rfind("partial:", 0) == 0) {
    try {
      int n = std::stoi(s.substr(8));
      if (n >= 1)
        return {CoeffMode::Partial, n};
    } catch (const std::exception &) {
    }
  }
  throw Error(ErrorCode::BadParams, "unknown coefficient mode '" + s + "'");
}

std::string coeff_mode_name(const CoefficientMode &m) {
  switch (m.mode) {
  case CoeffMode::Distinct: return "distinct";
  case CoeffMode::Uniform: return "uniform";
  case CoeffMode::Partial: return "partial:" + std::to_string(m.pool);
  }
  return "?";
}

namespace {

void add_term(SymbolicOperator &op, const Coefficient &c,
              std::map<int, std::string> factors) {
  op.terms.push_back({c, std::move(factors)});
  if (!c.symbol().is_unit())
    op.symbols.declare(c.symbol().name());
}

} // namespace

SymbolicOperator random_hamiltonian(int L, int K, const CoefficientMode &mode,
                                    std::uint64_t seed) {
  if (L < 2 || K < 1)
    throw Error(ErrorCode::BadParams, "random operator needs L >= 2, K >= 1");
  if (mode.mode == CoeffMode::Partial && (mode.pool < 1 || mode.pool >= K))
    throw Error(ErrorCode::BadParams, "pool size must be in 1..K-1");
  // Number of distinct strings on at most min(4, L) sites.
  const int max_sites = std::min(4, L);
  double available = 0;
  for (int s = 1; s <= max_sites; ++s) {
    double comb = 1;
    for (int k = 0; k < s; ++k)
      comb = comb * (L - k) / (k + 1);
    available += comb * std::pow(3.0, s);
  }
  if (K > available)
    throw Error(ErrorCode::BadParams, "K exceeds the number of distinct strings");

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> size_dist(1, max_sites);
  std::uniform_int_distribution<int> pauli_dist(0, 2);
  const char *paulis[] = {"X", "Y", "Z"};
  std::uniform_int_distribution<int> pool_dist(0, std::max(mode.pool, 1) - 1);

  SymbolicOperator op;
  for (int i = 0; i < L; ++i)
    op.sites.push_back({i, 2});
  std::set<std::map<int, std::string>> seen;
  std::vector<int> ids(L);
  while (static_cast<int>(op.terms.size()) < K) {
    int s = size_dist(rng);
    std::iota(ids.begin(), ids.end(), 0);
    std::shuffle(ids.begin(), ids.end(), rng);
    std::map<int, std::string> factors;
    for (int k = 0; k < s; ++k)
      factors[ids[k]] = paulis[pauli_dist(rng)];
    if (!seen.insert(factors).second)
      continue;
    std::string name;
    switch (mode.mode) {
    case CoeffMode::Distinct: name = "g" + std::to_string(op.terms.size()); break;
    case CoeffMode::Uniform: name = "g"; break;
    case CoeffMode::Partial: name = "g" + std::to_string(pool_dist(rng)); break;
    }
    add_term(op, Coefficient(1, 1, Symbol::named(name)), std::move(factors));
  }
  return op;
}

SymbolicOperator lattice_hamiltonian(int L, const std::string &J,
                                     const std::string &g) {
  if (L < 2)
    throw Error(ErrorCode::BadParams, "lattice needs L >= 2");
  SymbolicOperator op;
  const int n = L * L;
  for (int i = 0; i < n; ++i)
    op.sites.push_back({i, 2});
  Symbol sj = Symbol::named(J), sg = Symbol::named(g);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      int d = std::abs(i % L - j % L) + std::abs(i / L - j / L);
      add_term(op, Coefficient(1, d, sj), {{i, "X"}, {j, "X"}});
    }
  for (int i = 0; i < n; ++i)
    add_term(op, Coefficient(1, 1, sg), {{i, "Z"}});
  return op;
}

SymbolicOperator heom_hamiltonian(const HeomParams &p) {
  if (p.molecules < 1 || p.modes < 0)
    throw Error(ErrorCode::BadParams, "HEOM needs M >= 1, N >= 0");
  const int M = p.molecules;
  const auto s = heom_sites(M, p.modes);
  SymbolicOperator op;
  for (int a = 0; a <= M; ++a) {
    op.sites.push_back({s.hat[a], 2});
    op.sites.push_back({s.check[a], 2});
    for (int b : s.bath[a])
      op.sites.push_back({b, 2});
  }
  auto sym = [&](const std::string &family, const std::string &index) {
    return Symbol::named(p.homogeneous ? family : family + "_" + index);
  };
  auto idx = [](int a, int b) {
    return std::to_string(a) + "_" + std::to_string(b);
  };

  // System Hamiltonian on hat sites (+) and check sites (-).
  for (int side = 0; side < 2; ++side) {
    const auto &site = side == 0 ? s.hat : s.check;
    const long sign = side == 0 ? 1 : -1;
    add_term(op, Coefficient(sign, 1), {{site[0], "H_cav"}});
    for (int i = 1; i <= M; ++i) {
      add_term(op, Coefficient(sign, 1, sym("eta", std::to_string(i))),
               {{site[0], "A"}, {site[i], "A"}});
      add_term(op, Coefficient(sign, 1), {{site[i], "H_mol"}});
    }
    for (int i = 1; i <= M; ++i)
      for (int j = i + 1; j <= M; ++j)
        add_term(op, Coefficient(sign, 1, sym("Delta", idx(i, j))),
                 {{site[i], "B"}, {site[j], "B"}});
  }

  // Bath terms; the factor -i of the damping term is part of its symbol.
  for (int a = 0; a <= M; ++a)
    for (int b = 0; b < p.modes; ++b) {
      int bath = s.bath[a][b];
      const auto k = idx(a, b + 1);
      add_term(op, Coefficient(-1, 1, sym("gam", k)), {{bath, "bdag_b"}});
      add_term(op, Coefficient(1, 1, sym("lam", k)),
               {{s.hat[a], "L"}, {bath, "b"}});
      add_term(op, Coefficient(-1, 1, sym("lamc", k)),
               {{s.check[a], "Ldag"}, {bath, "b"}});
      add_term(op, Coefficient(1, 1, sym("chi", k)),
               {{s.hat[a], "L"}, {bath, "bdag"}});
      add_term(op, Coefficient(-1, 1, sym("chic", k)),
               {{s.check[a], "Ldag"}, {bath, "bdag"}});
    }
  return op;
}

} // namespace ttno
