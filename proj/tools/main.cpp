// wavebvs: simulate, fit and replicate spatially varying coefficient models.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wavebvs/config.hpp"
#include "wavebvs/experiment.hpp"
#include "wavebvs/grid.hpp"
#include "wavebvs/pipeline.hpp"
#include "wavebvs/posterior.hpp"

namespace {

using namespace wavebvs;

struct RunFlags {
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool paper_scale = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("-c,--config", f.config_path, "key = value config file")->check(CLI::ExistingFile);
  cmd->add_option("-s,--set", f.sets, "override one key, e.g. --set model=II (repeatable)");
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("-o,--out", f.out, "output directory");
  cmd->add_flag("--paper-scale", f.paper_scale, "L = 50, 5000 sweeps, 2500 burn-in");
}

ExperimentConfig resolve(const RunFlags& f) {
  ExperimentConfig cfg = f.config_path.empty() ? ExperimentConfig{} : load_config(f.config_path);
  for (const auto& s : f.sets) apply_override(cfg, s);
  if (f.seed) cfg.seed = *f.seed;
  if (!f.out.empty()) cfg.out = f.out;
  if (f.paper_scale) cfg.paper_scale = true;
  cfg.validate();
  return cfg;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wavelet-domain Bayesian variable selection for spatial concurrent linear models"};
  app.require_subcommand(1);

  RunFlags sim_flags;
  RunFlags fit_flags;
  RunFlags rep_flags;
  RunFlags show_flags;
  auto* sim = app.add_subcommand("simulate", "write y, x and the truth surfaces for a configured simulation");
  auto* fit = app.add_subcommand("fit", "run the Gibbs chains and write estimates, class map and diagnostics");
  auto* rep = app.add_subcommand("replicate", "L simulate+fit runs, one metrics.csv row");
  auto* show = app.add_subcommand("config", "print the resolved configuration");
  add_run_flags(sim, sim_flags);
  add_run_flags(fit, fit_flags);
  add_run_flags(rep, rep_flags);
  add_run_flags(show, show_flags);

  std::string b_hat_path;
  std::string psd_path;
  std::optional<double> delta;
  std::optional<double> frac;
  std::string classify_out = ".";
  auto* cls = app.add_subcommand("classify", "class map from B_hat and psd_B grids");
  cls->add_option("--b-hat", b_hat_path, "B_hat grid")->required()->check(CLI::ExistingFile);
  cls->add_option("--psd", psd_path, "psd_B grid")->required()->check(CLI::ExistingFile);
  auto* delta_opt = cls->add_option("--delta", delta, "category threshold");
  cls->add_option("--max-abs-frac", frac, "delta = frac * max |B_hat|")->excludes(delta_opt);
  cls->add_option("-o,--out", classify_out, "output directory");

  std::string truth = "case1";
  std::string covariate = "xa";
  std::size_t eval_side = 100;
  std::vector<std::string> estimate_dirs;
  std::string metrics_out = ".";
  auto* met = app.add_subcommand("metrics", "bias, variance and MSE of fitted surfaces against a known truth");
  met->add_option("--truth", truth, "case1 | case2")->check(CLI::IsMember({"case1", "case2"}));
  met->add_option("--covariate", covariate, "xa | xb | xc")->check(CLI::IsMember({"xa", "xb", "xc"}));
  met->add_option("--eval-side", eval_side, "evaluation grid side");
  met->add_option("estimates", estimate_dirs, "directories holding A_hat.csv and B_hat.csv")->required();
  met->add_option("-o,--out", metrics_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      const ExperimentConfig cfg = resolve(sim_flags);
      cmd_simulate(cfg);
      std::cout << "wrote simulation to " << cfg.out << '\n';
    } else if (fit->parsed()) {
      const ExperimentConfig cfg = resolve(fit_flags);
      const FitResult r = cmd_fit(cfg);
      print_warnings(r.warnings);
      std::cout << format_diagnostics(r);
      if (r.metrics) std::cout << metrics_csv_header() << '\n' << metrics_csv_row(*r.metrics) << '\n';
      std::cout << "wrote fit to " << cfg.out << '\n';
    } else if (rep->parsed()) {
      const ExperimentConfig cfg = resolve(rep_flags);
      const ReplicateResult r = cmd_replicate(cfg);
      print_warnings(r.warnings);
      std::cout << metrics_csv_header() << '\n' << metrics_csv_row(r.metrics) << '\n';
    } else if (show->parsed()) {
      std::cout << serialize_config(resolve(show_flags));
    } else if (cls->parsed()) {
      if (!delta && !frac) throw ConfigError("classify needs --delta or --max-abs-frac");
      const Grid b = load_grid(b_hat_path, GridLoadOptions{false});
      const Grid psd = load_grid(psd_path, GridLoadOptions{false});
      const double d = delta ? *delta : delta_from_max_abs(b, *frac);
      const ClassMap map = classify(b, psd, d);
      std::filesystem::create_directories(classify_out);
      write_classmap_csv(map, b, psd, std::filesystem::path(classify_out) / "classmap.csv");
      write_classmap_ppm(map, std::filesystem::path(classify_out) / "classmap.ppm");
      std::cout << "delta = " << d << '\n';
    } else if (met->parsed()) {
      const TruthCase tc = parse_truth_case(truth);
      const Grid ta = truth_a_grid(eval_side);
      const Grid tb = truth_b_grid(tc, eval_side);
      const Grid x = gen_covariate(parse_covariate_kind(covariate), eval_side);
      std::vector<SurfaceEstimate> est;
      for (const auto& dir : estimate_dirs) {
        const std::filesystem::path p(dir);
        est.push_back({load_grid(p / "A_hat.csv", GridLoadOptions{false}),
                       load_grid(p / "B_hat.csv", GridLoadOptions{false})});
      }
      const SimMetrics m = sim_metrics(ta, tb, x, est);
      std::filesystem::create_directories(metrics_out);
      std::ofstream(std::filesystem::path(metrics_out) / "metrics.csv")
          << metrics_csv_header() << '\n' << metrics_csv_row(m) << '\n';
      std::cout << metrics_csv_header() << '\n' << metrics_csv_row(m) << '\n';
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
