#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wavebvs/gibbs.hpp"
#include "wavebvs/prior.hpp"

namespace wavebvs {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat `key = value` experiment description.
///
/// Keys (defaults in brackets):
///   J [3]                   lattice level, side = 2^(J+2)
///   model [I]               I | II
///   prior.kind [1]          1 | 2 | 3
///   prior.phi [0.8]
///   hyper.nu [6], hyper.mu [6]
///   sweeps [2000], burn_in [1000], thin [1], chains [1]
///   init.sigma2 [1e-4]      spread of the start around least squares
///   scan [fixed]            fixed | random
///   basis.scale [function]  function | unit, coefficient scale of the design
///   replications [5]
///   sigma [1]               simulation noise sd
///   covariate [xa]          xa | xb | xc | file
///   covariate.file []
///   truth [case1]           case1 | case2 | files | none
///   truth.a_file [], truth.b_file []
///   response.file []        fit this grid instead of simulating
///   standardize.x [auto]    auto | on | off
///   standardize.y [auto]    auto | own | covariate | off
///   seed [1]
///   out [out]
///   delta []                classification threshold
///   delta.max_abs_frac []   alternative: delta = frac * max |B_hat|
///   eval.side [100]
///   metrics.response_grid [training]  training | eval, where MSE_y is taken
///   paper_scale [false]     replications 50, sweeps 5000, burn_in 2500
///
/// `auto` standardization means on for file input and off for simulation.
struct ExperimentConfig {
  int level = 3;
  Model model = Model::I;
  PriorKind prior_kind = PriorKind::Prior1;
  double phi = 0.8;
  double nu = 6.0;
  double mu = 6.0;
  std::size_t sweeps = 2000;
  std::size_t burn_in = 1000;
  std::size_t thin = 1;
  std::size_t chains = 1;
  double init_sigma2 = 1e-4;
  ScanOrder scan = ScanOrder::Fixed;
  BasisScale basis_scale = BasisScale::Function;
  std::size_t replications = 5;
  double sigma = 1.0;
  std::string covariate = "xa";
  std::string covariate_file;
  std::string truth = "case1";
  std::string truth_a_file;
  std::string truth_b_file;
  std::string response_file;
  std::string standardize_x = "auto";
  std::string standardize_y = "auto";
  std::uint64_t seed = 1;
  std::string out = "out";
  std::optional<double> delta;
  std::optional<double> delta_max_abs_frac;
  std::size_t eval_side = 100;
  std::string response_grid = "training";
  bool paper_scale = false;

  bool operator==(const ExperimentConfig&) const = default;

  /// Throws ConfigError on inconsistent or out-of-range values.
  void validate() const;

  /// Copy with the paper-scale run lengths applied when requested.
  ExperimentConfig effective() const;

  bool has_truth() const noexcept { return truth != "none"; }
  bool uses_response_file() const noexcept { return !response_file.empty(); }

  Hyperparams hyperparams() const { return {nu, mu, model}; }
  PriorSchedule prior() const { return PriorSchedule::builtin(prior_kind, phi); }
  RunSettings run_settings() const { return {sweeps, burn_in, thin, init_sigma2}; }
};

/// Sets one key; unknown keys and malformed values throw ConfigError.
void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value);
/// `key=value` form used by command-line overrides.
void apply_override(ExperimentConfig& cfg, std::string_view assignment);

/// Parses config text. Blank lines and lines starting with '#' or ';' are
/// skipped; later keys win.
ExperimentConfig parse_config(std::string_view text, std::string_view source = "<memory>");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Every key in schema order; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& cfg);

std::vector<std::string> config_keys();

}  // namespace wavebvs
