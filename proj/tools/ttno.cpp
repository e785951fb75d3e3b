// ttno: build and check symbolic tree tensor network operators.

#include "ttno/benchmark.hpp"
#include "ttno/diagram.hpp"
#include "ttno/error.hpp"
#include "ttno/generators.hpp"
#include "ttno/optimizer.hpp"
#include "ttno/topology.hpp"
#include "ttno/verification.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

using namespace ttno;
using nlohmann::json;

namespace {

std::string read_file(const std::string &path) {
  std::ifstream f(path, std::ios::binary);
  if (!f)
    throw Error(ErrorCode::FileNotFound, path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_output(const std::string &path, const std::string &text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty())
    std::filesystem::create_directories(parent);
  std::ofstream f(path, std::ios::binary);
  if (!f)
    throw Error(ErrorCode::FileNotFound, path);
  f << text;
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

/// "a:b" or "a..b" for an inclusive range, otherwise a comma list.
std::vector<int> parse_int_list(const std::string &s) {
  std::vector<int> out;
  for (const char *sep : {":", ".."}) {
    auto pos = s.find(sep);
    if (pos != std::string::npos) {
      int a = std::stoi(s.substr(0, pos));
      int b = std::stoi(s.substr(pos + std::strlen(sep)));
      if (b < a)
        throw Error(ErrorCode::BadParams, "empty range " + s);
      for (int k = a; k <= b; ++k)
        out.push_back(k);
      return out;
    }
  }
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty())
      out.push_back(std::stoi(item));
  if (out.empty())
    throw Error(ErrorCode::BadParams, "empty list '" + s + "'");
  return out;
}

std::vector<std::string> parse_str_list(const std::string &s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty())
      out.push_back(item);
  return out;
}

/// Symbol values given in the operator document, random values for the rest.
SymbolTable fill_symbols(const SymbolicOperator &op, std::uint64_t seed) {
  SymbolTable table = random_instantiation(op, seed);
  for (const auto &[name, v] : op.symbols.entries())
    if (v)
      table.assign(name, *v);
  return table;
}

std::map<int, Eigen::VectorXcd> random_product_state(const TreeTopology &t,
                                                     std::mt19937_64 &rng) {
  std::normal_distribution<double> n(0, 1);
  std::map<int, Eigen::VectorXcd> state;
  for (int id : t.physical_nodes()) {
    Eigen::VectorXcd v(t.dim(id));
    for (Eigen::Index k = 0; k < v.size(); ++k)
      v(k) = Complex(n(rng), n(rng));
    state[id] = v / v.norm();
  }
  return state;
}

/// Row-major little-endian (re, im) doubles per node tensor, shape
/// (bond dims..., d, d) in incident-bond order.
std::string dense_blob(const SymbolicTTNO &ttno, const SymbolicOperator &op,
                       const SymbolTable &table) {
  std::string out;
  const auto &t = ttno.topology;
  for (const auto &node : t.nodes()) {
    const auto &inc = t.incident_bonds(node.id);
    std::vector<std::size_t> shape;
    std::size_t n = 1;
    for (int b : inc) {
      shape.push_back(ttno.bond_dims[b]);
      n *= ttno.bond_dims[b];
    }
    std::size_t dd = static_cast<std::size_t>(node.dim) * node.dim;
    std::vector<Complex> data(n * dd, 0.0);
    for (const auto &e : ttno.tensor(node.id)) {
      std::size_t off = 0;
      for (std::size_t k = 0; k < inc.size(); ++k)
        off = off * shape[k] + e.indices[k];
      Eigen::MatrixXcd m = instantiate_coefficient(e.coefficient, table) *
                           resolve_label(op, e.label, node.dim);
      for (int r = 0; r < node.dim; ++r)
        for (int c = 0; c < node.dim; ++c)
          data[off * dd + r * node.dim + c] += m(r, c);
    }
    for (const auto &z : data) {
      double parts[2] = {z.real(), z.imag()};
      out.append(reinterpret_cast<const char *>(parts), sizeof parts);
    }
  }
  return out;
}

struct Check {
  std::string name;
  bool ok;
  std::string detail;
};

std::vector<Check> verify_constructions(const SymbolicOperator &op,
                                        const TreeTopology &t, int max_iter,
                                        std::uint64_t seed) {
  std::vector<Check> checks;
  std::vector<ProductTerm> reference;
  {
    auto d = stack_terms(op, t);
    reference = enumerate_terms(d);
  }
  auto sorted = [](std::vector<ProductTerm> v) {
    std::sort(v.begin(), v.end(), [](const ProductTerm &a, const ProductTerm &b) {
      if (a.factors != b.factors)
        return a.factors < b.factors;
      return a.coefficient.str() < b.coefficient.str();
    });
    return v;
  };
  std::size_t dense_dim = 1;
  for (int id : t.physical_nodes())
    dense_dim *= t.dim(id);
  const bool dense = dense_dim <= kMaxDenseDim;
  SymbolTable table = fill_symbols(op, seed);

  std::optional<BondReport> svd;
  if (dense)
    svd = svd_bond_ranks(op, t, table);

  Eigen::MatrixXcd target;
  if (dense)
    target = dense_from_terms(op, table, dense_site_order(t));
  std::mt19937_64 rng(seed);
  std::vector<std::map<int, Eigen::VectorXcd>> states;
  if (!dense)
    for (int k = 0; k < 5; ++k)
      states.push_back(random_product_state(t, rng));

  for (Method m : {Method::Basic, Method::Bipartite, Method::Sge}) {
    std::string tag = method_name(m);
    auto d = build_diagram(op, t, m, max_iter);
    bool terms_ok = sorted(enumerate_terms(d)) == sorted(reference);
    checks.push_back({tag + ".terms", terms_ok, ""});
    auto ttno = diagram_to_ttno(d);
    if (dense) {
      double err = (contract_ttno(ttno, op, table) - target).cwiseAbs().maxCoeff();
      checks.push_back({tag + ".dense", err < 1e-10, "max_abs_err=" + sci(err)});
      auto dims = d.bond_dims();
      bool bound = true;
      for (std::size_t k = 0; k < dims.size(); ++k)
        bound = bound && dims[k] >= svd->bonds[k].dim;
      checks.push_back({tag + ".rank_bound", bound, ""});
    } else {
      double worst = 0;
      for (const auto &s : states) {
        auto got = ttns_to_dense(apply_to_state(ttno, op, s, table));
        auto want = apply_terms_dense(op, s, table, dense_site_order(t));
        double rel = (got - want).norm() / std::max(want.norm(), 1e-300);
        worst = std::max(worst, rel);
      }
      checks.push_back({tag + ".apply", worst < 1e-9, "rel_err=" + sci(worst)});
    }
  }
  return checks;
}

int run(int argc, char **argv) {
  CLI::App app{"Symbolic TTNO/MPO construction with bond dimension compression"};
  app.require_subcommand(1);

  std::string op_path, topo_path, out_path, method_str = "sge", ttno_out,
                                            dense_export, ttno_in;
  std::uint64_t seed = kDefaultSeed;
  int max_iter = 10;

  // generate
  auto *gen = app.add_subcommand("generate", "Write an operator or topology document");
  std::string family, topo_kind, coeff_mode = "uniform";
  int sites = 6, k_terms = 10, grid_l = 3, molecules = 2, modes = 2;
  bool homogeneous = false;
  gen->add_option("--family", family, "random, lattice or heom");
  gen->add_option("--topology-kind", topo_kind,
                  "write a topology instead: chain, snake, fork, fork_virtual, "
                  "staircase, binary_virtual, heom_mps, heom_ttn, random");
  gen->add_option("--sites", sites, "sites for random operators and trees");
  gen->add_option("--k", k_terms, "number of random terms");
  gen->add_option("--coeff-mode", coeff_mode, "distinct, uniform or partial:N");
  gen->add_option("--grid-l", grid_l, "grid edge length");
  gen->add_option("--molecules", molecules, "HEOM molecule count");
  gen->add_option("--modes", modes, "HEOM modes per bath");
  gen->add_flag("--homogeneous", homogeneous, "shared HEOM coefficients");
  gen->add_option("--seed", seed, "random seed");
  gen->add_option("--out", out_path, "output path (stdout if omitted)");

  // construct
  auto *con = app.add_subcommand("construct", "Build a TTNO and report bond dimensions");
  con->add_option("--operator", op_path, "operator document")->required();
  con->add_option("--topology", topo_path, "topology document")->required();
  con->add_option("--method", method_str, "basic, bipartite or sge");
  con->add_option("--max-iter", max_iter, "elimination iterations");
  con->add_option("--out", out_path, "bond report path (stdout if omitted)");
  con->add_option("--ttno-out", ttno_out, "symbolic TTNO export path");
  con->add_option("--dense-export", dense_export,
                  "binary dense tensor blob (needs symbol values and matrices)");
  con->add_option("--seed", seed, "seed for unassigned symbol values");

  // verify
  auto *ver = app.add_subcommand("verify", "Check constructions against oracles");
  ver->add_option("--operator", op_path, "operator document")->required();
  ver->add_option("--topology", topo_path, "topology document")->required();
  ver->add_option("--ttno", ttno_in, "check this TTNO export instead of building");
  ver->add_option("--max-iter", max_iter, "elimination iterations");
  ver->add_option("--seed", seed, "seed for symbol values and test states");
  ver->add_option("--out", out_path, "check report path (stdout if omitted)");

  // benchmark
  auto *bench = app.add_subcommand("benchmark", "Sweep an experiment family");
  BenchmarkConfig cfg;
  std::string k_range = "1:15", sites_list = "5,6", grid_list = "2,3,4",
              topo_list, mol_list = "2:6";
  bool no_svd = false;
  std::string bench_out = "bench_out";
  bench->add_option("--family", cfg.family, "random, lattice or heom")->required();
  bench->add_option("--k-range", k_range, "term counts, e.g. 1:15");
  bench->add_option("--samples", cfg.samples, "samples per K");
  bench->add_option("--coeff-mode", coeff_mode, "distinct, uniform or partial:N");
  bench->add_option("--sites", sites_list, "site counts cycled over samples");
  bench->add_option("--grid-l", grid_list, "grid sizes, e.g. 2,3,4");
  bench->add_option("--topologies", topo_list, "comma list of layouts");
  bench->add_option("--molecules", mol_list, "molecule counts, e.g. 2:6");
  bench->add_option("--modes", cfg.modes, "modes per bath");
  bench->add_flag("--homogeneous", cfg.homogeneous, "shared HEOM coefficients");
  bench->add_flag("--no-svd-baseline", no_svd, "skip the SVD ranks");
  bench->add_option("--threads", cfg.threads, "worker threads (0 = all cores)");
  bench->add_option("--seed", seed, "base seed");
  bench->add_option("--max-iter", max_iter, "elimination iterations");
  bench->add_option("--out", bench_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      if (!topo_kind.empty()) {
        TreeTopology t;
        if (topo_kind == "random")
          t = random_tree(sites, seed);
        else if (topo_kind == "chain")
          t = chain_topology(sites);
        else if (topo_kind == "heom_mps" || topo_kind == "heom_ttn")
          t = generate_topology(topo_kind, molecules, modes);
        else
          t = generate_topology(topo_kind, grid_l);
        write_output(out_path, serialize_topology(t));
        return 0;
      }
      SymbolicOperator op;
      if (family == "random")
        op = random_hamiltonian(sites, k_terms, parse_coeff_mode(coeff_mode), seed);
      else if (family == "lattice")
        op = lattice_hamiltonian(grid_l);
      else if (family == "heom")
        op = heom_hamiltonian({molecules, modes, homogeneous});
      else
        throw Error(ErrorCode::BadParams, "--family or --topology-kind is required");
      write_output(out_path, serialize_operator(op));
      return 0;
    }

    if (*con) {
      auto op = parse_operator(read_file(op_path));
      auto t = parse_topology(read_file(topo_path));
      Method m = parse_method(method_str);
      auto d = build_diagram(op, t, m, max_iter);
      auto report = metrics(d, method_name(m));
      write_output(out_path, report.to_json() + "\n");
      auto ttno = diagram_to_ttno(d);
      if (!ttno_out.empty())
        write_output(ttno_out, serialize_ttno(ttno));
      if (!dense_export.empty())
        write_output(dense_export, dense_blob(ttno, op, fill_symbols(op, seed)));
      return 0;
    }

    if (*ver) {
      auto op = parse_operator(read_file(op_path));
      auto t = parse_topology(read_file(topo_path));
      std::vector<Check> checks;
      if (!ttno_in.empty()) {
        auto ttno = parse_ttno(read_file(ttno_in));
        SymbolTable table = fill_symbols(op, seed);
        std::mt19937_64 rng(seed);
        double worst = 0;
        for (int k = 0; k < 5; ++k) {
          auto s = random_product_state(ttno.topology, rng);
          auto got = ttns_to_dense(apply_to_state(ttno, op, s, table));
          auto want = apply_terms_dense(op, s, table, dense_site_order(ttno.topology));
          worst = std::max(worst, (got - want).norm() / std::max(want.norm(), 1e-300));
        }
        checks.push_back({"ttno.apply", worst < 1e-9, "rel_err=" + sci(worst)});
        std::size_t dense_dim = 1;
        for (int id : ttno.topology.physical_nodes())
          dense_dim *= ttno.topology.dim(id);
        if (dense_dim <= kMaxDenseDim) {
          auto want = dense_from_terms(op, table, dense_site_order(ttno.topology));
          double err = (contract_ttno(ttno, op, table) - want).cwiseAbs().maxCoeff();
          checks.push_back({"ttno.dense", err < 1e-10, "max_abs_err=" + sci(err)});
        }
      } else {
        checks = verify_constructions(op, t, max_iter, seed);
      }
      bool all = true;
      std::string text;
      for (const auto &c : checks) {
        all = all && c.ok;
        json j{{"check", c.name}, {"pass", c.ok}};
        if (!c.detail.empty())
          j["detail"] = c.detail;
        text += j.dump() + "\n";
      }
      write_output(out_path, text);
      return all ? 0 : 1;
    }

    if (*bench) {
      cfg.seed = seed;
      cfg.max_iter = max_iter;
      cfg.svd_baseline = !no_svd;
      cfg.coeff_mode = parse_coeff_mode(coeff_mode);
      auto ks = parse_int_list(k_range);
      cfg.k_min = ks.front();
      cfg.k_max = ks.back();
      cfg.sites = parse_int_list(sites_list);
      cfg.grid_l = parse_int_list(grid_list);
      cfg.molecules = parse_int_list(mol_list);
      if (!topo_list.empty()) {
        if (cfg.family == "heom")
          cfg.layouts = parse_str_list(topo_list);
        else
          cfg.topologies = parse_str_list(topo_list);
      }
      auto r = run_benchmark(cfg);
      write_benchmark(r, bench_out);
      std::cout << r.summary.dump(2) << "\n";
      return 0;
    }
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

} // namespace

int main(int argc, char **argv) { return run(argc, argv); }
