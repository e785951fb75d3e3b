#include "ttno/benchmark.hpp"

#include "ttno/error.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

namespace ttno {

using nlohmann::json;

StateDiagram build_diagram(const SymbolicOperator &op, const TreeTopology &t,
                           Method method, int max_iter) {
  return optimize_diagram(stack_terms(op, t), method, max_iter);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  // splitmix64 over the combined words
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(base) ^ a) ^ b);
}

namespace {

const Method kMethods[] = {Method::Basic, Method::Bipartite, Method::Sge};

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

json report_json(const BondReport &r) {
  json j;
  j["method"] = r.method;
  j["dims"] = r.dims();
  j["d_mean"] = r.d_mean.get_str();
  j["d_mean_value"] = r.d_mean.get_d();
  j["d_max"] = r.d_max;
  return j;
}

/// Runs tasks on a worker pool; results keep task order.
std::vector<std::vector<json>>
run_tasks(const std::vector<std::function<std::vector<json>()>> &tasks,
          unsigned threads) {
  std::vector<std::vector<json>> out(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  if (threads == 0)
    threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(tasks.size()));
  auto worker = [&] {
    for (std::size_t i; (i = next++) < tasks.size();) {
      try {
        out[i] = tasks[i]();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned k = 0; k < threads; ++k)
    pool.emplace_back(worker);
  for (auto &th : pool)
    th.join();
  for (auto &e : errors)
    if (e)
      std::rethrow_exception(e);
  return out;
}

std::vector<json> method_records(const json &base, const SymbolicOperator &op,
                                 const TreeTopology &t, int max_iter,
                                 const BondReport *svd) {
  std::vector<json> out;
  for (Method m : kMethods) {
    auto d = build_diagram(op, t, m, max_iter);
    auto rep = metrics(d, method_name(m));
    json rec = base;
    rec.update(report_json(rep));
    if (svd) {
      bool exceeds = false;
      auto dims = rep.dims();
      auto ranks = svd->dims();
      for (std::size_t k = 0; k < dims.size(); ++k)
        exceeds = exceeds || dims[k] > ranks[k];
      rec["exceeds_svd"] = exceeds;
    }
    out.push_back(rec);
  }
  if (svd) {
    json rec = base;
    rec.update(report_json(*svd));
    out.push_back(rec);
  }
  return out;
}

BenchmarkResult run_random(const BenchmarkConfig &cfg) {
  if (cfg.k_min < 1 || cfg.k_max < cfg.k_min || cfg.samples < 1 || cfg.sites.empty())
    throw Error(ErrorCode::BadParams, "bad random benchmark ranges");
  std::vector<std::function<std::vector<json>()>> tasks;
  for (int K = cfg.k_min; K <= cfg.k_max; ++K)
    for (int s = 0; s < cfg.samples; ++s)
      tasks.push_back([&cfg, K, s] {
        int L = cfg.sites[s % cfg.sites.size()];
        auto seed = derive_seed(cfg.seed, K, s);
        auto op = random_hamiltonian(L, K, cfg.coeff_mode, seed);
        auto t = random_tree(L, derive_seed(seed, 1));
        json base{{"family", "random"}, {"K", K}, {"sample", s}, {"sites", L},
                  {"coeff_mode", coeff_mode_name(cfg.coeff_mode)}};
        std::optional<BondReport> svd;
        if (cfg.svd_baseline && L <= 8)
          svd = svd_bond_ranks(op, t, random_instantiation(op, derive_seed(seed, 2)));
        return method_records(base, op, t, cfg.max_iter, svd ? &*svd : nullptr);
      });
  auto results = run_tasks(tasks, cfg.threads);

  BenchmarkResult r;
  struct Agg {
    double d_mean = 0, d_max = 0;
    int n = 0, exceeding = 0;
  };
  std::map<std::pair<int, std::string>, Agg> agg;
  std::vector<std::string> method_order{"basic", "bipartite", "sge", "svd"};
  for (auto &task : results)
    for (auto &rec : task) {
      auto &a = agg[{rec["K"].get<int>(), rec["method"].get<std::string>()}];
      a.d_mean += rec["d_mean_value"].get<double>();
      a.d_max += rec["d_max"].get<double>();
      a.n += 1;
      if (rec.contains("exceeds_svd") && rec["exceeds_svd"].get<bool>())
        a.exceeding += 1;
      r.records.push_back(std::move(rec));
    }
  r.csv_header = {"K", "method", "d_mean", "d_max", "count_exceeding_svd"};
  json rows = json::array();
  for (int K = cfg.k_min; K <= cfg.k_max; ++K)
    for (const auto &m : method_order) {
      auto it = agg.find({K, m});
      if (it == agg.end())
        continue;
      const auto &a = it->second;
      double dm = a.d_mean / a.n, dx = a.d_max / a.n;
      r.csv_rows.push_back({std::to_string(K), m, fmt(dm), fmt(dx),
                            std::to_string(a.exceeding)});
      rows.push_back({{"K", K}, {"method", m}, {"d_mean", dm}, {"d_max", dx},
                      {"count_exceeding_svd", a.exceeding}, {"samples", a.n}});
    }
  r.summary = {{"family", "random"},
               {"seed", cfg.seed},
               {"coeff_mode", coeff_mode_name(cfg.coeff_mode)},
               {"samples", cfg.samples},
               {"sites", cfg.sites},
               {"rows", rows}};
  return r;
}

BenchmarkResult run_lattice(const BenchmarkConfig &cfg) {
  if (cfg.grid_l.empty() || cfg.topologies.empty())
    throw Error(ErrorCode::BadParams, "bad lattice benchmark ranges");
  std::vector<std::function<std::vector<json>()>> tasks;
  for (int L : cfg.grid_l)
    for (const auto &kind : cfg.topologies)
      tasks.push_back([&cfg, L, kind] {
        auto op = lattice_hamiltonian(L);
        auto t = generate_topology(kind, L);
        json base{{"family", "lattice"}, {"L", L}, {"topology", kind}};
        std::optional<BondReport> svd;
        if (cfg.svd_baseline && L * L <= 8)
          svd = svd_bond_ranks(op, t, random_instantiation(op, derive_seed(cfg.seed, L)));
        return method_records(base, op, t, cfg.max_iter, svd ? &*svd : nullptr);
      });
  auto results = run_tasks(tasks, cfg.threads);
  BenchmarkResult r;
  r.csv_header = {"L", "topology", "method", "d_mean", "d_max"};
  json rows = json::array();
  for (auto &task : results)
    for (auto &rec : task) {
      r.csv_rows.push_back({std::to_string(rec["L"].get<int>()),
                            rec["topology"].get<std::string>(),
                            rec["method"].get<std::string>(),
                            fmt(rec["d_mean_value"].get<double>()),
                            std::to_string(rec["d_max"].get<int>())});
      rows.push_back({{"L", rec["L"]}, {"topology", rec["topology"]},
                      {"method", rec["method"]}, {"d_mean", rec["d_mean"]},
                      {"d_max", rec["d_max"]}});
      r.records.push_back(std::move(rec));
    }
  r.summary = {{"family", "lattice"}, {"seed", cfg.seed}, {"rows", rows}};
  return r;
}

BenchmarkResult run_heom(const BenchmarkConfig &cfg) {
  if (cfg.molecules.empty() || cfg.layouts.empty() || cfg.modes < 0)
    throw Error(ErrorCode::BadParams, "bad heom benchmark ranges");
  std::vector<std::function<std::vector<json>()>> tasks;
  for (int M : cfg.molecules)
    for (const auto &layout : cfg.layouts)
      tasks.push_back([&cfg, M, layout] {
        auto op = heom_hamiltonian({M, cfg.modes, cfg.homogeneous});
        auto t = generate_topology(layout, M, cfg.modes);
        json base{{"family", "heom"}, {"M", M}, {"N", cfg.modes},
                  {"layout", layout}, {"homogeneous", cfg.homogeneous}};
        return method_records(base, op, t, cfg.max_iter, nullptr);
      });
  auto results = run_tasks(tasks, cfg.threads);
  BenchmarkResult r;
  r.csv_header = {"M", "layout", "homogeneous", "method", "d_mean", "d_max"};
  json rows = json::array();
  for (auto &task : results)
    for (auto &rec : task) {
      r.csv_rows.push_back({std::to_string(rec["M"].get<int>()),
                            rec["layout"].get<std::string>(),
                            cfg.homogeneous ? "true" : "false",
                            rec["method"].get<std::string>(),
                            fmt(rec["d_mean_value"].get<double>()),
                            std::to_string(rec["d_max"].get<int>())});
      rows.push_back({{"M", rec["M"]}, {"layout", rec["layout"]},
                      {"method", rec["method"]}, {"d_mean", rec["d_mean"]},
                      {"d_max", rec["d_max"]}, {"dims", rec["dims"]}});
      r.records.push_back(std::move(rec));
    }
  r.summary = {{"family", "heom"}, {"N", cfg.modes},
               {"homogeneous", cfg.homogeneous}, {"rows", rows}};
  return r;
}

} // namespace

BenchmarkResult run_benchmark(const BenchmarkConfig &cfg) {
  if (cfg.max_iter < 1)
    throw Error(ErrorCode::BadParams, "max_iter must be at least 1");
  if (cfg.family == "random")
    return run_random(cfg);
  if (cfg.family == "lattice")
    return run_lattice(cfg);
  if (cfg.family == "heom")
    return run_heom(cfg);
  throw Error(ErrorCode::BadParams, "unknown benchmark family '" + cfg.family + "'");
}

void write_benchmark(const BenchmarkResult &r, const std::string &dir) {
  std::filesystem::create_directories(dir);
  std::filesystem::path p(dir);
  {
    std::ofstream f(p / "records.jsonl");
    for (const auto &rec : r.records)
      f << rec.dump() << "\n";
  }
  {
    std::ofstream f(p / "summary.json");
    f << r.summary.dump(2) << "\n";
  }
  {
    std::ofstream f(p / "table.csv");
    for (std::size_t k = 0; k < r.csv_header.size(); ++k)
      f << (k ? "," : "") << r.csv_header[k];
    f << "\n";
    for (const auto &row : r.csv_rows) {
      for (std::size_t k = 0; k < row.size(); ++k)
        f << (k ? "," : "") << row[k];
      f << "\n";
    }
  }
}

} // namespace ttno
