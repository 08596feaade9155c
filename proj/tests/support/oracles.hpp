#pragma once

// Independent reference implementations used as test oracles. Nothing here
// calls into the library's numerical code paths.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "wavebvs/grid.hpp"
#include "wavebvs/wavelet_index.hpp"

namespace oracle {

/// Index list in the documented order, built by nested loops.
std::vector<wavebvs::WaveletIndex> enumerate_basis(int level);

/// norm * 2^j * phi^r(2^j s - k) straight from the tensor definitions.
double haar_value(const wavebvs::WaveletIndex& idx, wavebvs::Location s, double norm);

/// n x d matrix from haar_value at every lattice point.
Eigen::MatrixXd haar_matrix(int level);

/// Full log joint density of (beta, gamma, sigma^2, tau^2) up to a constant
/// in y. tau2 has one entry (Model I) or one per coordinate (Model II).
struct JointModel {
  Eigen::VectorXd y;
  Eigen::MatrixXd X;
  std::vector<double> theta;
  double nu = 6.0;
  double mu = 6.0;
};

double log_joint(const JointModel& model, const Eigen::VectorXd& beta, const std::vector<int>& gamma, double sigma2,
                 const std::vector<double>& tau2);

/// P(gamma_j = 1 | rest) and the slab moments by integrating the joint
/// over beta_j numerically.
struct QuadratureResult {
  double prob_include = 0.0;
  double slab_mean = 0.0;
  double slab_var = 0.0;
};

QuadratureResult quadrature_conditional(const JointModel& model, Eigen::VectorXd beta, std::vector<int> gamma,
                                        double sigma2, const std::vector<double>& tau2, std::size_t j);

/// One-sample Kolmogorov-Smirnov statistic of `samples` against `cdf`.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Asymptotic p-value with the Stephens small-sample correction.
double ks_pvalue(double d, std::size_t n);

/// CDF of IG(shape, scale) with density proportional to x^(-shape-1) e^(-scale/x).
double inverse_gamma_cdf(double x, double shape, double scale);

/// Batch-means standard error of the mean of a correlated series.
double batch_means_se(std::span<const double> series, std::size_t batches);

}  // namespace oracle
