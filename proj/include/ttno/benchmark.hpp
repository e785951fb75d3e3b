#pragma once

#include "ttno/generators.hpp"
#include "ttno/optimizer.hpp"
#include "ttno/verification.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace ttno {

inline constexpr std::uint64_t kDefaultSeed = 12345;

/// Stacks the terms on the topology and optimizes with the given method.
StateDiagram build_diagram(const SymbolicOperator &op, const TreeTopology &t,
                           Method method, int max_iter = 10);

/// Per-instance seed derived from a base seed and coordinates.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

struct BenchmarkConfig {
  std::string family; ///< random, lattice or heom
  std::uint64_t seed = kDefaultSeed;
  int max_iter = 10;
  bool svd_baseline = true;
  unsigned threads = 0; ///< 0 = hardware concurrency

  // random
  int k_min = 1, k_max = 15;
  int samples = 100;
  CoefficientMode coeff_mode{CoeffMode::Uniform, 0};
  std::vector<int> sites{5, 6};

  // lattice
  std::vector<int> grid_l{2, 3, 4};
  std::vector<std::string> topologies{"snake", "fork", "fork_virtual",
                                      "staircase", "binary_virtual"};

  // heom
  std::vector<int> molecules{2, 3, 4, 5, 6};
  int modes = 4;
  bool homogeneous = false;
  std::vector<std::string> layouts{"heom_mps", "heom_ttn"};
};

struct BenchmarkResult {
  /// One record per (configuration, method).
  std::vector<nlohmann::json> records;
  /// Aggregated rows, the plot table.
  std::vector<std::string> csv_header;
  std::vector<std::vector<std::string>> csv_rows;
  nlohmann::json summary;
};

/// Throws BadParams for an unknown family or empty ranges.
BenchmarkResult run_benchmark(const BenchmarkConfig &cfg);

/// records.jsonl, summary.json and table.csv inside dir.
void write_benchmark(const BenchmarkResult &r, const std::string &dir);

} // namespace ttno
