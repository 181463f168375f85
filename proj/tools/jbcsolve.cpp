#include <CLI11.hpp>

#include "jbc/diagnostics.hpp"
#include "jbc/experiment.hpp"
#include "jbc/json_io.hpp"
#include "jbc/pipeline.hpp"
#include "jbc/scenario.hpp"
#include "jbc/verify.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitIterationLimit = 3;
constexpr int kExitCertification = 4;

int status_exit_code(jbc::SolveStatus s) {
  switch (s) {
    case jbc::SolveStatus::Optimal:
      return kExitOk;
    case jbc::SolveStatus::Infeasible:
      return kExitInfeasible;
    case jbc::SolveStatus::IterationLimit:
      return kExitIterationLimit;
  }
  return kExitIterationLimit;
}

struct SolveFlags {
  std::string config_path;
  std::string out_dir = ".";
  double tol_dual = -1.0;
  double tol_primal = -1.0;
  long max_iter = -1;
  double power_cap = -1.0;
  int workers = -1;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

// Config file first, then explicit flags on top.
jbc::ExperimentConfig effective_config(const SolveFlags& f) {
  jbc::ExperimentConfig cfg;
  if (!f.config_path.empty()) cfg = jbc::load_experiment_config(f.config_path);
  if (f.tol_dual > 0.0) cfg.dual.tol = f.tol_dual;
  if (f.tol_primal > 0.0) cfg.primal.tol = f.tol_primal;
  if (f.max_iter > 0) {
    cfg.dual.max_iter = f.max_iter;
    cfg.primal.max_iter = f.max_iter;
  }
  if (f.power_cap > 0.0) cfg.dual.power_cap = f.power_cap;
  if (f.workers >= 0) cfg.parallelism = f.workers;
  if (f.seed_set) cfg.scenario.seed = f.seed;
  return cfg;
}

int cmd_solve(const std::string& instance_path, const SolveFlags& flags) {
  const jbc::ProblemInstance inst = jbc::load_instance(instance_path);
  const jbc::ExperimentConfig cfg = effective_config(flags);

  jbc::SolveOptions opts;
  opts.dual = cfg.dual;
  opts.primal = cfg.primal;
  opts.cert_tol = cfg.cert_tol;
  opts.rate_diagnostics = true;
  const jbc::SolveResult res = jbc::solve(inst, opts);

  fs::create_directories(flags.out_dir);
  const fs::path out(flags.out_dir);
  jbc::save_report(res.report, (out / "report.json").string());
  jbc::save_trace_csv(res.report.dual_trace, res.report.dual_step_trace,
                      "dual_objective", (out / "dual_trace.csv").string());
  if (res.has_solution) {
    jbc::save_solution({res.primal, res.dual}, (out / "solution.json").string());
  }
  if (!res.report.primal_trace.empty()) {
    jbc::save_trace_csv(res.report.primal_trace, res.report.primal_step_trace,
                        "primal_objective", (out / "primal_trace.csv").string());
  }

  std::printf("status=%s dual_iters=%ld primal_iters=%ld\n",
              jbc::to_string(res.status), res.report.dual_iters,
              res.report.primal_iters);
  if (res.has_solution) {
    std::printf("total_power=%.12g dual_objective=%.12g gap_rel=%.3e\n",
                res.report.primal_objective, res.report.dual_objective,
                res.report.duality_gap_rel);
  }
  return status_exit_code(res.status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Globally optimal joint beamforming and fronthaul compression"};
  app.require_subcommand(1);

  SolveFlags flags;
  std::string instance_path;
  std::string solution_path;
  std::string gen_out = "instance.json";
  jbc::Scenario gen_scenario;
  double gen_gamma_db = 4.0;
  double gen_cbar = 3.0;

  CLI::App* solve_cmd = app.add_subcommand("solve", "solve one instance file");
  solve_cmd->add_option("instance", instance_path, "instance JSON")->required();
  solve_cmd->add_option("--config", flags.config_path, "experiment config JSON");
  solve_cmd->add_option("--out", flags.out_dir, "output directory");
  solve_cmd->add_option("--tol-dual", flags.tol_dual, "dual convergence tolerance");
  solve_cmd->add_option("--tol-primal", flags.tol_primal, "primal convergence tolerance");
  solve_cmd->add_option("--max-iter", flags.max_iter, "iteration cap for both stages");
  solve_cmd->add_option("--power-cap", flags.power_cap, "dual objective infeasibility cap");
  solve_cmd->add_option("--workers", flags.workers, "worker threads (0 = hardware)");

  CLI::App* verify_cmd = app.add_subcommand("verify", "certify a solution file");
  verify_cmd->add_option("instance", instance_path, "instance JSON")->required();
  verify_cmd->add_option("solution", solution_path, "solution JSON")->required();
  verify_cmd->add_option("--config", flags.config_path, "experiment config JSON");

  CLI::App* gen_cmd = app.add_subcommand("gen", "generate an instance from a scenario");
  gen_cmd->add_option("--relays", gen_scenario.num_relays, "7 or 19");
  gen_cmd->add_option("--users", gen_scenario.num_users, "number of users");
  gen_cmd->add_option("--isd", gen_scenario.inter_site_distance, "inter-site distance (m)");
  gen_cmd->add_option("--gamma-db", gen_gamma_db, "SINR target (dB)");
  gen_cmd->add_option("--cbar", gen_cbar, "fronthaul capacity (bits)");
  auto* gen_seed = gen_cmd->add_option("--seed", flags.seed, "scenario seed");
  gen_cmd->add_option("--config", flags.config_path, "experiment config JSON");
  gen_cmd->add_option("--out", gen_out, "output instance path");

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "run the experiment grid");
  sweep_cmd->add_option("--config", flags.config_path, "experiment config JSON")->required();
  sweep_cmd->add_option("--out", flags.out_dir, "override output directory");
  sweep_cmd->add_option("--workers", flags.workers, "worker threads");
  auto* sweep_seed = sweep_cmd->add_option("--seed", flags.seed, "override base seed");

  CLI::App* bench_cmd = app.add_subcommand("bench", "measure solve timings");
  bench_cmd->add_option("--config", flags.config_path, "experiment config JSON")->required();
  bench_cmd->add_option("--out", flags.out_dir, "override output directory");
  bench_cmd->add_option("--workers", flags.workers, "worker threads");
  auto* bench_seed = bench_cmd->add_option("--seed", flags.seed, "override base seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve_cmd->parsed()) {
      return cmd_solve(instance_path, flags);
    }

    if (verify_cmd->parsed()) {
      const jbc::ProblemInstance inst = jbc::load_instance(instance_path);
      const jbc::SolutionBundle bundle = jbc::load_solution(solution_path);
      double tol = 1e-7;
      if (!flags.config_path.empty()) {
        tol = jbc::load_experiment_config(flags.config_path).cert_tol;
      }
      const jbc::Certification cert =
          jbc::certify(inst, bundle.primal, bundle.dual, tol);
      for (const auto& [name, value] : cert.residuals) {
        std::printf("%-16s %.3e%s\n", name.c_str(), value,
                    value <= tol ? "" : "  FAIL");
      }
      std::printf("certificate=%s gap_rel=%.3e\n",
                  cert.pass ? "pass" : "fail", cert.duality_gap_rel);
      return cert.pass ? kExitOk : kExitCertification;
    }

    if (gen_cmd->parsed()) {
      jbc::Scenario sc = gen_scenario;
      if (!flags.config_path.empty()) {
        sc = jbc::load_experiment_config(flags.config_path).scenario;
      }
      if (gen_seed->count() > 0) sc.seed = flags.seed;
      const jbc::ProblemInstance inst =
          jbc::generate_instance(sc, gen_gamma_db, gen_cbar);
      jbc::save_instance(inst, gen_out);
      std::printf("wrote %s (M=%d K=%d)\n", gen_out.c_str(), inst.M, inst.K);
      return kExitOk;
    }

    if (sweep_cmd->parsed() || bench_cmd->parsed()) {
      jbc::ExperimentConfig cfg = jbc::load_experiment_config(flags.config_path);
      if (flags.workers >= 0) cfg.parallelism = flags.workers;
      if (sweep_cmd->parsed() && sweep_seed->count() > 0) cfg.scenario.seed = flags.seed;
      if (bench_cmd->parsed() && bench_seed->count() > 0) cfg.scenario.seed = flags.seed;
      if (flags.out_dir != ".") cfg.output_dir = flags.out_dir;
      fs::create_directories(cfg.output_dir);
      const fs::path out(cfg.output_dir);

      if (sweep_cmd->parsed()) {
        const auto rows = jbc::run_sweep(cfg, true);
        jbc::write_runs_csv(rows, (out / "sweep_runs.csv").string());
        jbc::write_summary_csv(rows, (out / "sweep_summary.csv").string());
        std::printf("wrote %s and %s (%zu runs)\n",
                    (out / "sweep_runs.csv").c_str(),
                    (out / "sweep_summary.csv").c_str(), rows.size());
      } else {
        const auto rows = jbc::run_sweep(cfg, false);
        jbc::write_bench_csv(rows, (out / "bench.csv").string());
        std::printf("wrote %s (%zu runs)\n", (out / "bench.csv").c_str(),
                    rows.size());
      }
      return kExitOk;
    }
  } catch (const jbc::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  }
  return kExitInput;
}
