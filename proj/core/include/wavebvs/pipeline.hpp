#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wavebvs/config.hpp"
#include "wavebvs/gibbs.hpp"
#include "wavebvs/grid.hpp"
#include "wavebvs/posterior.hpp"

namespace wavebvs {

/// Worker threads from WAVEBVS_WORKERS, else the hardware concurrency.
std::size_t worker_count();

/// Seed streams under one master seed. Replication l uses
/// derive_seed(master, l) as its own master.
inline constexpr std::uint64_t kDataStream = 0;
inline constexpr std::uint64_t kChainStream = 1;

/// Training-lattice inputs for one fit.
struct ProblemData {
  LatticeSpec lattice{0};
  Grid y;
  Grid x;
  /// Truth on the training lattice (simulation only).
  std::optional<Grid> truth_a;
  std::optional<Grid> truth_b;
  /// Removed location/scale when the inputs were standardized.
  std::optional<std::pair<double, double>> y_scaling;
  std::optional<std::pair<double, double>> x_scaling;
};

/// Truth and covariate on the evaluation grid, used for metrics.
struct EvalTruth {
  Grid a;
  Grid b;
  Grid x;
};

/// Piecewise-constant resampling: output pixel s takes the value of the
/// input pixel that contains s.
Grid resample_nearest(const Grid& g, std::size_t side);

/// Loads or simulates y and x; simulation noise uses `data_seed`.
ProblemData prepare_data(const ExperimentConfig& cfg, std::uint64_t data_seed);

/// Truth on the evaluation grid, or nullopt in real-data mode. Analytic
/// truth is evaluated pointwise; file truth lives on the training lattice
/// and the evaluation grid is that lattice.
std::optional<EvalTruth> eval_truth(const ExperimentConfig& cfg, const ProblemData& data);

struct MonitoredRhat {
  std::string name;
  GelmanRubin value;
};

struct FitResult {
  ProblemData data;
  std::vector<ChainOutput> chains;
  PosteriorSummary summary;
  /// sigma2, tau2 and log_posterior; empty with a single chain.
  std::vector<MonitoredRhat> rhat;
  std::optional<double> delta;
  std::optional<ClassMap> classmap;
  std::optional<SimMetrics> metrics;
  std::vector<std::string> warnings;
};

/// Data, chains, summaries, diagnostics and (when truth is known) metrics
/// for one master seed. Nothing is written.
FitResult fit_experiment(const ExperimentConfig& cfg, std::size_t workers);

/// Writes the fit artifacts into `dir`:
///   A_hat.csv B_hat.csv psd_B.csv y_hat.csv coefficients.csv
///   classmap.csv classmap.ppm (when a delta is configured)
///   metrics.csv (when truth is known)
///   diagnostics.txt summary.json config.txt chains/chain_<c>/
void write_fit_outputs(const FitResult& result, const ExperimentConfig& cfg, const std::filesystem::path& dir);

/// Fit plus outputs under cfg.out. Requires delta or delta.max_abs_frac.
FitResult cmd_fit(const ExperimentConfig& cfg);

/// Surfaces standing in for a fit: on the evaluation grid and on the
/// training lattice (the latter feeds MSE_y).
struct ForcedEstimate {
  SurfaceEstimate eval;
  SurfaceEstimate training;
};

/// Replaces the fit of replication l when it returns a value.
using EstimateHook =
    std::function<std::optional<ForcedEstimate>(std::size_t l, const EvalTruth& truth, const ProblemData& data)>;

struct ReplicateResult {
  SimMetrics metrics;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> warnings;
};

/// L simulate+fit runs with seeds derive_seed(cfg.seed, l), pooled by
/// sim_metrics on the evaluation grid.
ReplicateResult replicate_experiment(const ExperimentConfig& cfg, std::size_t workers, const EstimateHook& hook = {});

/// Replication study plus metrics.csv and replicate.txt under cfg.out.
ReplicateResult cmd_replicate(const ExperimentConfig& cfg, const EstimateHook& hook = {});

/// Writes y.csv, x.csv, A.csv and B.csv for the configured simulation.
void cmd_simulate(const ExperimentConfig& cfg);

std::string format_diagnostics(const FitResult& result);
std::string format_summary_json(const FitResult& result, const ExperimentConfig& cfg);

}  // namespace wavebvs
