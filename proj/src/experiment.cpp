#include "jbc/experiment.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

namespace jbc {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void get_if_present(const json& j, const char* key, double& out) {
  if (j.contains(key)) out = j.at(key).get<double>();
}

void get_if_present(const json& j, const char* key, int& out) {
  if (j.contains(key)) out = j.at(key).get<int>();
}

void get_if_present(const json& j, const char* key, long& out) {
  if (j.contains(key)) out = j.at(key).get<long>();
}

void get_if_present(const json& j, const char* key, std::uint64_t& out) {
  if (j.contains(key)) out = j.at(key).get<std::uint64_t>();
}

void get_if_present(const json& j, const char* key, std::string& out) {
  if (j.contains(key)) out = j.at(key).get<std::string>();
}

}  // namespace

void ExperimentConfig::validate() const {
  if (num_realizations <= 0) throw ParseError("num_realizations must be positive");
  if (gamma_db_sweep.empty()) throw ParseError("gamma_db_sweep must be nonempty");
  if (cbar_sweep.empty()) throw ParseError("cbar_sweep must be nonempty");
  for (double c : cbar_sweep) {
    if (!(c > 0.0)) throw ParseError("cbar_sweep entries must be positive");
  }
  if (parallelism < 0) throw ParseError("parallelism must be nonnegative");
  if (!(cert_tol > 0.0)) throw ParseError("cert_tol must be positive");
  dual.validate();
  primal.validate();
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }

  ExperimentConfig cfg;
  try {
    if (j.contains("scenario")) {
      const json& s = j["scenario"];
      get_if_present(s, "num_relays", cfg.scenario.num_relays);
      get_if_present(s, "num_users", cfg.scenario.num_users);
      get_if_present(s, "inter_site_distance", cfg.scenario.inter_site_distance);
      get_if_present(s, "relay_height", cfg.scenario.relay_height);
      get_if_present(s, "pathloss_a", cfg.scenario.pathloss_a);
      get_if_present(s, "pathloss_b", cfg.scenario.pathloss_b);
      get_if_present(s, "noise_psd_dbm_hz", cfg.scenario.noise_psd_dbm_hz);
      get_if_present(s, "bandwidth_hz", cfg.scenario.bandwidth_hz);
      get_if_present(s, "seed", cfg.scenario.seed);
    }
    if (j.contains("gamma_db_sweep")) {
      cfg.gamma_db_sweep = j["gamma_db_sweep"].get<std::vector<double>>();
    }
    if (j.contains("cbar_sweep")) {
      cfg.cbar_sweep = j["cbar_sweep"].get<std::vector<double>>();
    }
    get_if_present(j, "num_realizations", cfg.num_realizations);
    if (j.contains("dual")) {
      const json& d = j["dual"];
      get_if_present(d, "tol", cfg.dual.tol);
      get_if_present(d, "max_iter", cfg.dual.max_iter);
      get_if_present(d, "power_cap", cfg.dual.power_cap);
      if (d.contains("fast_eval")) cfg.dual.fast_eval = d["fast_eval"].get<bool>();
    }
    if (j.contains("primal")) {
      const json& p = j["primal"];
      get_if_present(p, "tol", cfg.primal.tol);
      get_if_present(p, "max_iter", cfg.primal.max_iter);
    }
    get_if_present(j, "cert_tol", cfg.cert_tol);
    get_if_present(j, "output_dir", cfg.output_dir);
    get_if_present(j, "parallelism", cfg.parallelism);
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  cfg.validate();
  return cfg;
}

std::vector<RunRecord> run_sweep(const ExperimentConfig& cfg,
                                 bool rate_diagnostics) {
  cfg.validate();

  struct Task {
    std::uint64_t seed;
    double gamma_db;
    double cbar;
  };
  std::vector<Task> tasks;
  tasks.reserve(static_cast<size_t>(cfg.num_realizations) *
                cfg.gamma_db_sweep.size() * cfg.cbar_sweep.size());
  for (int r = 0; r < cfg.num_realizations; ++r) {
    const std::uint64_t seed = cfg.scenario.seed + static_cast<std::uint64_t>(r);
    for (double gamma_db : cfg.gamma_db_sweep) {
      for (double cbar : cfg.cbar_sweep) {
        tasks.push_back({seed, gamma_db, cbar});
      }
    }
  }

  std::vector<RunRecord> rows(tasks.size());
  std::atomic<size_t> cursor{0};
  auto worker = [&]() {
    for (;;) {
      const size_t i = cursor.fetch_add(1);
      if (i >= tasks.size()) return;
      const Task& t = tasks[i];
      Scenario sc = cfg.scenario;
      sc.seed = t.seed;
      const ProblemInstance inst = generate_instance(sc, t.gamma_db, t.cbar);

      SolveOptions opts;
      opts.dual = cfg.dual;
      opts.primal = cfg.primal;
      opts.cert_tol = cfg.cert_tol;
      opts.rate_diagnostics = rate_diagnostics;
      const SolveResult res = solve(inst, opts);

      RunRecord& row = rows[i];
      row.seed = t.seed;
      row.gamma_db = t.gamma_db;
      row.cbar = t.cbar;
      row.status = res.status;
      row.total_power = res.report.primal_objective;
      row.dual_obj = res.report.dual_objective;
      row.gap_rel = res.report.duality_gap_rel;
      row.dual_iters = res.report.dual_iters;
      row.primal_iters = res.report.primal_iters;
      row.rate_bound = res.report.rate_bound;
      row.rate_practical = res.report.rate_practical;
      row.t_dual = res.t_dual;
      row.t_primal = res.t_primal;
      row.t_certify = res.t_certify;
    }
  };

  unsigned n_workers = cfg.parallelism > 0
                           ? static_cast<unsigned>(cfg.parallelism)
                           : std::max(1u, std::thread::hardware_concurrency());
  n_workers = std::min<unsigned>(n_workers, tasks.size());
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return rows;
}

void write_runs_csv(const std::vector<RunRecord>& rows,
                    const std::string& path) {
  std::ostringstream os;
  os << "seed,gamma_db,cbar,status,total_power,dual_obj,gap_rel,dual_iters,"
        "primal_iters,rate_bound,rate_practical,t_dual_s,t_primal_s\n";
  for (const auto& r : rows) {
    os << r.seed << ',' << fmt(r.gamma_db) << ',' << fmt(r.cbar) << ','
       << to_string(r.status) << ',' << fmt(r.total_power) << ','
       << fmt(r.dual_obj) << ',' << fmt(r.gap_rel) << ',' << r.dual_iters
       << ',' << r.primal_iters << ',' << fmt(r.rate_bound) << ','
       << fmt(r.rate_practical) << ',' << fmt_short(r.t_dual) << ','
       << fmt_short(r.t_primal) << "\n";
  }
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  out << os.str();
}

void write_summary_csv(const std::vector<RunRecord>& rows,
                       const std::string& path) {
  struct Agg {
    int n = 0;
    int n_optimal = 0;
    int n_infeasible = 0;
    int n_limit = 0;
    double power_sum = 0.0;
    double power_sq_sum = 0.0;
    double gap_max = 0.0;
    double dual_iters_sum = 0.0;
    double primal_iters_sum = 0.0;
  };
  std::map<std::pair<double, double>, Agg> groups;
  for (const auto& r : rows) {
    Agg& a = groups[{r.gamma_db, r.cbar}];
    a.n += 1;
    switch (r.status) {
      case SolveStatus::Optimal:
        a.n_optimal += 1;
        a.power_sum += r.total_power;
        a.power_sq_sum += r.total_power * r.total_power;
        a.gap_max = std::max(a.gap_max, r.gap_rel);
        a.dual_iters_sum += static_cast<double>(r.dual_iters);
        a.primal_iters_sum += static_cast<double>(r.primal_iters);
        break;
      case SolveStatus::Infeasible:
        a.n_infeasible += 1;
        break;
      case SolveStatus::IterationLimit:
        a.n_limit += 1;
        break;
    }
  }

  std::ostringstream os;
  os << "gamma_db,cbar,n,n_optimal,n_infeasible,n_iterlimit,feasible_frac,"
        "mean_power,std_power,max_gap_rel,mean_dual_iters,mean_primal_iters\n";
  for (const auto& [key, a] : groups) {
    const double frac = static_cast<double>(a.n_optimal) / a.n;
    double mean = std::numeric_limits<double>::quiet_NaN();
    double stdev = std::numeric_limits<double>::quiet_NaN();
    double mean_di = std::numeric_limits<double>::quiet_NaN();
    double mean_pi = std::numeric_limits<double>::quiet_NaN();
    if (a.n_optimal > 0) {
      mean = a.power_sum / a.n_optimal;
      const double var =
          std::max(0.0, a.power_sq_sum / a.n_optimal - mean * mean);
      stdev = std::sqrt(var);
      mean_di = a.dual_iters_sum / a.n_optimal;
      mean_pi = a.primal_iters_sum / a.n_optimal;
    }
    os << fmt(key.first) << ',' << fmt(key.second) << ',' << a.n << ','
       << a.n_optimal << ',' << a.n_infeasible << ',' << a.n_limit << ','
       << fmt(frac) << ',' << fmt(mean) << ',' << fmt(stdev) << ','
       << fmt(a.gap_max) << ',' << fmt(mean_di) << ',' << fmt(mean_pi)
       << "\n";
  }
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  out << os.str();
}

void write_bench_csv(const std::vector<RunRecord>& rows,
                     const std::string& path) {
  std::ostringstream os;
  os << "seed,gamma_db,cbar,status,dual_iters,primal_iters,t_dual_s,"
        "t_primal_s,t_certify_s,t_total_s\n";
  for (const auto& r : rows) {
    os << r.seed << ',' << fmt(r.gamma_db) << ',' << fmt(r.cbar) << ','
       << to_string(r.status) << ',' << r.dual_iters << ',' << r.primal_iters
       << ',' << fmt_short(r.t_dual) << ',' << fmt_short(r.t_primal) << ','
       << fmt_short(r.t_certify) << ','
       << fmt_short(r.t_dual + r.t_primal + r.t_certify) << "\n";
  }
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  out << os.str();
}

}  // namespace jbc
