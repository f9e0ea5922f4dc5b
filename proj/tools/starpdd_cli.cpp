// Command-line front end: single solves, convergence traces, N sweeps.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "starpdd/starpdd.hpp"

namespace {

struct CommonArgs {
  std::string config;
  std::string out;
  std::string schemes;
  long long seed = -1;
  int realizations = 0;
  int n = 0;
  int k = 0;
  int jobs = 0;
};

void add_common(CLI::App* cmd, CommonArgs* args) {
  cmd->add_option("--config", args->config, "config file path");
  cmd->add_option("--seed", args->seed, "override base RNG seed");
  cmd->add_option("--out", args->out, "output CSV path");
  cmd->add_option("--schemes", args->schemes,
                  "comma-separated scheme list (coupled_pdd, coupled_ao, "
                  "pspsc_t, pspsc_r, independent, conventional)");
  cmd->add_option("--realizations", args->realizations,
                  "channel realizations per point");
  cmd->add_option("--n", args->n, "override element count N");
  cmd->add_option("--k", args->k, "override user count K");
  cmd->add_option("--jobs", args->jobs, "worker thread budget");
}

starpdd::ExperimentConfig build_config(const CommonArgs& args) {
  starpdd::ExperimentConfig cfg;
  if (!args.config.empty()) cfg = starpdd::load_config(args.config);
  if (args.seed >= 0) cfg.system.seed = static_cast<std::uint64_t>(args.seed);
  if (!args.out.empty()) cfg.out = args.out;
  if (!args.schemes.empty()) {
    cfg.schemes.clear();
    for (const std::string& name : starpdd::detail::split_list(args.schemes)) {
      cfg.schemes.push_back(starpdd::parse_scheme(name));
    }
    cfg.schemes_set = true;
  }
  if (args.realizations > 0) cfg.realizations = args.realizations;
  if (args.n > 0) cfg.system.n = args.n;
  if (args.k > 0) cfg.system.k = args.k;
  if (args.jobs > 0) cfg.jobs = args.jobs;
  cfg.validate();
  return cfg;
}

int cmd_run(const CommonArgs& args, const std::string& scheme) {
  starpdd::ExperimentConfig cfg = build_config(args);
  const starpdd::SchemeId id = starpdd::parse_scheme(scheme);
  const starpdd::SystemConfig& sys = cfg.system;
  const starpdd::ChannelSet cs = starpdd::generate_channels(sys, 0);
  starpdd::SolveOptions opts;
  opts.pdd = cfg.pdd;
  opts.init_seed = sys.seed;
  opts.ao_amp_levels = cfg.ao_amp_levels;
  opts.ao_phase_levels = cfg.ao_phase_levels;
  const starpdd::SchemeResult res =
      starpdd::solve_scheme(id, cs, sys.pt_watts(), opts);
  starpdd::validate_scheme_output(id, res.coefficients);

  std::printf("scheme: %s\n", starpdd::scheme_name(id));
  std::printf("m: %d  n: %d  k: %d\n", sys.m, sys.n, sys.k);
  std::printf("throughput: %.6f bit/s/Hz\n", res.rate);
  std::printf("converged: %s\n", res.converged ? "yes" : "no");
  if (res.summary.outer_iterations > 0) {
    std::printf("outer_iterations: %d\n", res.summary.outer_iterations);
    std::printf("inner_iterations: %d\n", res.summary.inner_iterations);
    std::printf("delta: %.3e\n", res.summary.final_delta);
  }
  std::printf("beamformer_power: %.6e W (budget %.6e W)\n",
              res.state.w.squaredNorm(), sys.pt_watts());
  return res.converged ? 0 : 1;
}

int cmd_converge(const CommonArgs& args) {
  starpdd::ExperimentConfig cfg = build_config(args);
  if (cfg.out.empty()) cfg.out = "converge.csv";
  const auto records = starpdd::run_convergence(cfg);
  std::printf("wrote %zu trace rows to %s\n", records.size(),
              cfg.out.c_str());
  return 0;
}

int cmd_sweep(const CommonArgs& args) {
  starpdd::ExperimentConfig cfg = build_config(args);
  if (cfg.out.empty()) cfg.out = "sweep.csv";
  const auto rows = starpdd::run_sweep(cfg);
  std::printf("wrote %zu summary rows to %s\n", rows.size(), cfg.out.c_str());
  for (const starpdd::SweepRow& row : rows) {
    std::printf("  n=%-3d %-12s mean %.4f  std %.4f\n", row.n,
                starpdd::scheme_name(row.scheme), row.mean_rate, row.std_rate);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coupled phase-shift STAR-RIS design via penalty dual "
               "decomposition"};
  app.require_subcommand(1);

  CommonArgs run_args, converge_args, sweep_args;
  std::string run_scheme = "coupled_pdd";

  CLI::App* run = app.add_subcommand("run", "single solve, print summary");
  add_common(run, &run_args);
  run->add_option("--scheme", run_scheme, "scheme to solve");

  CLI::App* converge =
      app.add_subcommand("converge", "per-iteration trace CSV");
  add_common(converge, &converge_args);

  CLI::App* sweep =
      app.add_subcommand("sweep", "throughput vs N summary CSV");
  add_common(sweep, &sweep_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_args, run_scheme);
    if (converge->parsed()) return cmd_converge(converge_args);
    if (sweep->parsed()) return cmd_sweep(sweep_args);
  } catch (const starpdd::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "unexpected error: %s\n", e.what());
    return 2;
  }
  return 0;
}
