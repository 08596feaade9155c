#pragma once

#include <cstddef>
#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wavebvs/gibbs.hpp"
#include "wavebvs/grid.hpp"
#include "wavebvs/haar.hpp"

namespace wavebvs {

/// Maps coefficient draws back to surfaces.
struct SummaryContext {
  LatticeSpec training;
  /// Covariate on the training lattice, used for y_hat.
  Grid covariate;
  /// Side of the uniform evaluation grid for A_hat, B_hat and the PSD map.
  std::size_t eval_side = 100;
  /// Must match the scale the design matrix was built with.
  BasisScale scale = BasisScale::Unit;
};

struct PosteriorSummary {
  Grid a_hat;
  Grid b_hat;
  /// Posterior standard deviation of B at each evaluation pixel.
  Grid psd_b;
  /// A_hat + x o B_hat on the training lattice.
  Grid y_hat;
  CoeffVector a_mean = CoeffVector::zeros(0);
  CoeffVector b_mean = CoeffVector::zeros(0);
  std::vector<double> gamma_freq;
  std::size_t draws = 0;
};

/// Posterior means and PSD from a T x m matrix of beta draws.
///
/// The PSD at s is the (T-1)-denominator sample sd of the scalar series
/// W(s) b^(t), which equals sqrt(W(s) Sigma W(s)') without forming Sigma.
PosteriorSummary summarize(const Eigen::MatrixXd& beta_draws, std::span<const double> gamma_freq,
                           const SummaryContext& ctx);
/// Pools the kept draws of several chains.
PosteriorSummary summarize(std::span<const ChainOutput> chains, const SummaryContext& ctx);

// Convergence -----------------------------------------------------------------

struct GelmanRubin {
  double rhat = std::numeric_limits<double>::quiet_NaN();
  double within = 0.0;            ///< W, mean within-chain variance
  double between_over_len = 0.0;  ///< B / T', variance of chain means
  /// True when W = 0 ("constant chains"); rhat is NaN then.
  bool degenerate = false;
};

/// Potential scale reduction factor for M >= 2 equal-length chains of
/// length T' >= 2:
///   W = mean of the within-chain sample variances
///   B = T' / (M - 1) * sum_m (mean_m - grand mean)^2
///   R = sqrt(((T' - 1) / T' * W + B / T') / W)
GelmanRubin gelman_rubin(std::span<const std::vector<double>> chains);

// Classification ----------------------------------------------------------------

enum class Category { GeDelta, ZeroToDelta, NegDeltaToZero, LeNegDelta };
enum class Evidence { Strong, Moderate, Weak };

constexpr double kStrongCutoff = 1.96;
constexpr double kModerateCutoff = 1.64;

Category classify_category(double b, double delta) noexcept;
/// Strong if |b/sd| > 1.96, Moderate if 1.64 <= |b/sd| <= 1.96, Weak
/// otherwise. sd = 0 counts as Strong for b != 0 and Weak for b = 0.
Evidence classify_evidence(double b, double sd) noexcept;

std::string to_string(Category c);
std::string to_string(Evidence e);

struct ClassMap {
  std::size_t side = 0;
  double delta = 0.0;
  std::vector<Category> category;
  std::vector<Evidence> evidence;
};

ClassMap classify(const Grid& b_hat, const Grid& psd_b, double delta);
ClassMap classify(const PosteriorSummary& summary, double delta);

/// frac * max |B_hat|, the convenience rule for choosing delta on real data.
double delta_from_max_abs(const Grid& b_hat, double frac);

/// Long-format CSV: row,col,s1,s2,b_hat,psd,ratio,category,evidence.
std::string format_classmap_csv(const ClassMap& map, const Grid& b_hat, const Grid& psd_b);
void write_classmap_csv(const ClassMap& map, const Grid& b_hat, const Grid& psd_b,
                        const std::filesystem::path& path);

/// Binary P6 choropleth. Category picks the hue (GeDelta red, ZeroToDelta
/// yellow, NegDeltaToZero green, LeNegDelta blue); evidence scales intensity
/// (Strong 100%, Moderate 65%, Weak 30%).
void write_classmap_ppm(const ClassMap& map, const std::filesystem::path& path, std::size_t pixel_scale = 1);

/// Linear grey-scale P5 rendering of a grid, min -> 0, max -> 255.
void write_grid_pgm(const Grid& g, const std::filesystem::path& path);

// Simulation metrics ------------------------------------------------------------

struct SimMetrics {
  double bias2_a = 0.0;
  double bias2_b = 0.0;
  double var_a = 0.0;
  double var_b = 0.0;
  double mse_a = 0.0;
  double mse_b = 0.0;
  double mse_y = 0.0;
};

struct SurfaceEstimate {
  Grid a_hat;
  Grid b_hat;
};

/// Average squared bias, variance (L denominator) and MSE over L replications
/// evaluated on a common grid; mse_a = bias2_a + var_a and likewise for B.
SimMetrics sim_metrics(const Grid& truth_a, const Grid& truth_b, const Grid& x,
                       std::span<const SurfaceEstimate> estimates);

/// sum_i sum_l (A_hat_i^l + x_i B_hat_i^l - (A_i + x_i B_i))^2 / (N L).
double response_mse(const Grid& truth_a, const Grid& truth_b, const Grid& x,
                    std::span<const SurfaceEstimate> estimates);

std::string metrics_csv_header();
std::string metrics_csv_row(const SimMetrics& m);

}  // namespace wavebvs
