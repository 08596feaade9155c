#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "wavebvs/haar.hpp"
#include "wavebvs/prior.hpp"
#include "wavebvs/random.hpp"

namespace wavebvs {

class SamplerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Closed-form conditional of (gamma_j, beta_j) given everything else.
struct CoordinateConditional {
  double u = 0.0;             ///< (y - X_{-j} beta_{-j})' X_j
  double v2 = 0.0;            ///< X_j'X_j + sigma^2 / tau^2
  double log_rho = 0.0;       ///< log of P(gamma_j = 0 | .) / P(gamma_j = 1 | .)
  double prob_include = 0.0;  ///< 1 / (1 + rho)
  double slab_mean = 0.0;     ///< u / v^2
  double slab_var = 0.0;      ///< sigma^2 / v^2
};

CoordinateConditional coordinate_conditional(double u, double xtx, double sigma2, double tau2,
                                             double log_prior_odds) noexcept;

/// 1 / (1 + exp(-x)) without overflow for any finite x.
double stable_sigmoid(double x) noexcept;

/// Current state of one chain.
///
/// `residual` is the full residual y - X beta. The partial residual
/// V_j = y - X_{-j} beta_{-j} seen by coordinate j is residual + beta_j X_j.
struct ChainState {
  Eigen::VectorXd beta;
  std::vector<std::uint8_t> gamma;
  double sigma2 = 1.0;
  double tau2 = 1.0;          ///< Model I
  Eigen::VectorXd tau2_vec;   ///< Model II, one per coordinate
  Eigen::VectorXd residual;
  Rng rng;
  std::uint64_t tau_clamps = 0;

  std::size_t included() const noexcept;
};

enum class ScanOrder { Fixed, Random };

struct SamplerOptions {
  ScanOrder scan = ScanOrder::Fixed;
#ifdef NDEBUG
  bool check_residual = false;
#else
  bool check_residual = true;
#endif
};

struct RunSettings {
  std::size_t sweeps = 2000;
  std::size_t burn_in = 1000;
  std::size_t thin = 1;
  /// Variance of the perturbation around the least-squares start.
  double init_sigma2 = 1e-4;
  /// tau^2 starts at init_tau2_scale / mu. A design built on a coarser
  /// coefficient scale than unit columns passes the squared ratio of the two
  /// norms, so the start matches the unit-column prior mean.
  double init_tau2_scale = 1.0;

  void validate() const;
};

struct ChainMeta {
  std::uint64_t seed = 0;
  Model model = Model::I;
  std::size_t sweeps = 0;
  std::size_t burn_in = 0;
  std::size_t thin = 1;
  double wall_seconds = 0.0;
  bool ridge_fallback = false;
  std::uint64_t tau_clamps = 0;
};

/// Post-burn-in record of one chain.
///
/// For Model II `tau2_draws` holds the geometric mean of the tau_j^2.
struct ChainOutput {
  Eigen::MatrixXd beta_draws;  ///< kept x m
  std::vector<double> sigma2_draws;
  std::vector<double> tau2_draws;
  std::vector<double> log_posterior;
  std::vector<double> gamma_freq;
  ChainMeta meta;

  std::size_t kept() const noexcept { return static_cast<std::size_t>(beta_draws.rows()); }
};

/// Blockwise spike-and-slab Gibbs sampler over y = X beta + eps.
///
/// The design matrix is held by reference and must outlive the sampler. The
/// sampler itself is immutable; all mutable state lives in ChainState, so one
/// sampler can drive several chains on different threads.
class GibbsSampler {
 public:
  GibbsSampler(const DesignMatrix& X, Eigen::VectorXd y, const PriorSchedule& prior, Hyperparams hyper,
               SamplerOptions options = {});
  /// Explicit log prior odds log((1 - theta_j) / theta_j), one per column.
  GibbsSampler(const DesignMatrix& X, Eigen::VectorXd y, std::vector<double> log_prior_odds, Hyperparams hyper,
               SamplerOptions options = {});

  const DesignMatrix& design() const noexcept { return *X_; }
  const Eigen::VectorXd& response() const noexcept { return y_; }
  const Hyperparams& hyper() const noexcept { return hyper_; }
  std::span<const double> log_prior_odds() const noexcept { return log_odds_; }

  /// (X'X)^{-1} X'y; a 1e-8 ridge is added when X'X is numerically singular.
  const Eigen::VectorXd& least_squares() const noexcept { return beta_ls_; }
  bool ridge_fallback() const noexcept { return ridge_; }

  /// beta = LS + N(0, sigma_tilde2 I), gamma = 1, sigma^2 = 1/nu,
  /// tau^2 = tau2_scale / mu.
  ChainState init_chain(double sigma_tilde2, std::uint64_t seed, double tau2_scale = 1.0) const;

  /// Coordinate updates of (gamma_j, beta_j) with a shared tau^2.
  void sweep_model1(ChainState& state) const;
  /// Coordinate updates with per-coordinate tau_j^2.
  void sweep_model2(ChainState& state) const;
  /// sigma^2 then tau^2 from their inverse-gamma conditionals.
  void update_variances_model1(ChainState& state) const;
  /// tau_j^2 for every j, then sigma^2.
  void update_variances_model2(ChainState& state) const;
  /// One full iteration for the configured model.
  void step(ChainState& state) const;

  ChainOutput run_chain(const RunSettings& settings, std::uint64_t seed) const;

  /// Conditional for coordinate j at the current state (no draws).
  CoordinateConditional conditional(const ChainState& state, Eigen::Index j) const;

  Eigen::VectorXd direct_residual(const ChainState& state) const;
  /// Recomputes state.residual from scratch.
  void refresh_residual(ChainState& state) const;
  /// Unnormalized log joint posterior (point mass counted as probability).
  double log_posterior(const ChainState& state) const;

 private:
  void sweep(ChainState& state, bool per_coordinate_tau) const;
  double draw_sigma2(ChainState& state) const;
  double clamp_tau2(ChainState& state, double tau2) const;
  void verify_residual(const ChainState& state) const;

  const DesignMatrix* X_;
  Eigen::VectorXd y_;
  std::vector<double> log_odds_;
  Hyperparams hyper_;
  SamplerOptions options_;
  Eigen::VectorXd beta_ls_;
  bool ridge_ = false;
};

/// Runs `count` chains with seeds derive_seed(seed, c) on up to `workers`
/// threads. Output order follows chain index, independent of scheduling.
std::vector<ChainOutput> run_chains(const GibbsSampler& sampler, const RunSettings& settings, std::uint64_t seed,
                                    std::size_t count, std::size_t workers);

/// Writes beta.csv, scalars.csv, gamma_freq.csv and meta.txt into `dir`.
void write_chain_output(const ChainOutput& out, const std::filesystem::path& dir);
ChainOutput read_chain_output(const std::filesystem::path& dir);

}  // namespace wavebvs
