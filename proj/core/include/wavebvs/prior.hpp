#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wavebvs/wavelet_index.hpp"

namespace wavebvs {

class PriorError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Model { I, II };

/// Coefficient block: intercept surface A or slope surface B.
enum class Block { A, B };

/// Degrees of freedom for 1/sigma^2 ~ chi2(nu) and 1/tau^2 ~ chi2(mu).
struct Hyperparams {
  double nu = 6.0;
  double mu = 6.0;
  Model model = Model::I;

  void validate() const;
};

enum class PriorKind { Prior1, Prior2, Prior3, Custom };

/// Resolution-level Bernoulli inclusion probabilities.
///
/// All built-in kinds give the scaling coefficient theta = 0.5. Detail
/// coefficients at level j get:
///   Prior1: 0.5 phi^j in both blocks
///   Prior2: 0.5 phi^j in A, 0.5 in B
///   Prior3: 0.5 phi^(8j) in A, 0.5 in B
/// With phi = 1 every kind is the indifference prior.
class PriorSchedule {
 public:
  static PriorSchedule builtin(PriorKind kind, double phi);
  /// Explicit per-coefficient table, one entry per flat index of each block.
  static PriorSchedule custom(std::vector<double> theta_a, std::vector<double> theta_b);

  PriorKind kind() const noexcept { return kind_; }
  double phi() const noexcept { return phi_; }

  double inclusion_prob(Block block, const WaveletIndex& idx, const WaveletBasis& basis) const;
  /// Built-in kinds only; Custom throws PriorError.
  double inclusion_prob(Block block, const WaveletIndex& idx) const;

 private:
  PriorSchedule(PriorKind kind, double phi) : kind_(kind), phi_(phi) {}

  PriorKind kind_;
  double phi_;
  std::vector<double> theta_a_;
  std::vector<double> theta_b_;
};

double inclusion_prob(const PriorSchedule& sched, Block block, const WaveletIndex& idx);

/// (1 - theta) / theta. Throws PriorError when theta is 0 or 1.
double prior_odds_ratio(double theta);
double prior_odds_ratio(const PriorSchedule& sched, Block block, const WaveletIndex& idx);

/// log((1 - theta_j) / theta_j) for every coordinate of beta = [a; b].
std::vector<double> log_prior_odds(const PriorSchedule& sched, const WaveletBasis& basis);

std::string to_string(PriorKind kind);
std::string to_string(Model model);
PriorKind parse_prior_kind(std::string_view text);
Model parse_model(std::string_view text);

}  // namespace wavebvs
