#include "wavebvs/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "text_util.hpp"

namespace wavebvs {
namespace {

int level_for_width(Eigen::Index m) {
  for (int j = 0; j <= 12; ++j) {
    if (static_cast<Eigen::Index>(2 * basis_size(j)) == m) return j;
  }
  throw std::invalid_argument("draw width " + std::to_string(m) + " is not 2 * 4^(J+1)");
}

}  // namespace

PosteriorSummary summarize(const Eigen::MatrixXd& beta_draws, std::span<const double> gamma_freq,
                           const SummaryContext& ctx) {
  const Eigen::Index T = beta_draws.rows();
  if (T < 2) throw std::invalid_argument("summarize needs at least 2 kept draws, got " + std::to_string(T));
  const int level = level_for_width(beta_draws.cols());
  if (level != ctx.training.level()) {
    throw std::invalid_argument("draws are level " + std::to_string(level) + " but the training lattice is level " +
                                std::to_string(ctx.training.level()));
  }
  if (ctx.covariate.side() != ctx.training.side()) {
    throw GridError("summarize: covariate is not on the training lattice");
  }
  if (ctx.eval_side == 0) throw std::invalid_argument("summarize: evaluation side must be positive");

  const auto d = static_cast<Eigen::Index>(basis_size(level));
  const Eigen::VectorXd mean = beta_draws.colwise().mean().transpose();
  std::vector<double> a(mean.data(), mean.data() + d);
  std::vector<double> b(mean.data() + d, mean.data() + 2 * d);

  PosteriorSummary s;
  s.draws = static_cast<std::size_t>(T);
  s.a_mean = CoeffVector(level, std::move(a));
  s.b_mean = CoeffVector(level, std::move(b));
  s.gamma_freq.assign(gamma_freq.begin(), gamma_freq.end());

  const double norm = basis_norm(ctx.training, ctx.scale);
  s.a_hat = synthesize(s.a_mean, ctx.eval_side, norm);
  s.b_hat = synthesize(s.b_mean, ctx.eval_side, norm);

  // Pixels in the same finest dyadic cell share W(s), so the projected
  // variance is computed once per cell.
  std::vector<double> cell_sd(basis_size(level), -1.0);
  std::vector<double> psd(ctx.eval_side * ctx.eval_side);
  std::vector<BasisTerm> terms;
  Eigen::VectorXd series(T);
  for (std::size_t i = 0; i < psd.size(); ++i) {
    const Location loc = Grid::location_on(ctx.eval_side, i);
    double& sd = cell_sd[finest_cell(loc, level)];
    if (sd < 0.0) {
      basis_terms(loc, level, norm, terms);
      series.setZero();
      for (const auto& term : terms) series += term.value * beta_draws.col(d + static_cast<Eigen::Index>(term.flat));
      const double mu = series.mean();
      sd = std::sqrt((series.array() - mu).square().sum() / static_cast<double>(T - 1));
    }
    psd[i] = sd;
  }
  s.psd_b = Grid(ctx.eval_side, std::move(psd));

  const Grid a_train = synthesize(s.a_mean, ctx.training.side(), norm);
  const Grid b_train = synthesize(s.b_mean, ctx.training.side(), norm);
  std::vector<double> y(a_train.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = a_train[i] + ctx.covariate[i] * b_train[i];
  s.y_hat = Grid(ctx.training.side(), std::move(y));
  return s;
}

PosteriorSummary summarize(std::span<const ChainOutput> chains, const SummaryContext& ctx) {
  if (chains.empty()) throw std::invalid_argument("summarize: no chains");
  Eigen::Index rows = 0;
  for (const auto& c : chains) rows += c.beta_draws.rows();
  const Eigen::Index m = chains.front().beta_draws.cols();
  Eigen::MatrixXd pooled(rows, m);
  std::vector<double> freq(static_cast<std::size_t>(m), 0.0);
  Eigen::Index at = 0;
  for (const auto& c : chains) {
    if (c.beta_draws.cols() != m) throw std::invalid_argument("summarize: chains have different widths");
    pooled.middleRows(at, c.beta_draws.rows()) = c.beta_draws;
    at += c.beta_draws.rows();
    for (std::size_t j = 0; j < freq.size(); ++j) {
      freq[j] += c.gamma_freq[j] * static_cast<double>(c.beta_draws.rows());
    }
  }
  for (double& f : freq) f /= static_cast<double>(rows);
  return summarize(pooled, freq, ctx);
}

GelmanRubin gelman_rubin(std::span<const std::vector<double>> chains) {
  const std::size_t M = chains.size();
  if (M < 2) throw std::invalid_argument("gelman_rubin needs at least 2 chains");
  const std::size_t len = chains.front().size();
  if (len < 2) throw std::invalid_argument("gelman_rubin needs at least 2 points per chain");
  for (const auto& c : chains) {
    if (c.size() != len) throw std::invalid_argument("gelman_rubin needs equal-length chains");
  }
  const double n = static_cast<double>(len);
  std::vector<double> means(M);
  double within = 0.0;
  for (std::size_t c = 0; c < M; ++c) {
    const double mu = std::accumulate(chains[c].begin(), chains[c].end(), 0.0) / n;
    double ss = 0.0;
    for (double x : chains[c]) ss += (x - mu) * (x - mu);
    means[c] = mu;
    within += ss / (n - 1.0);
  }
  within /= static_cast<double>(M);
  const double grand = std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(M);
  double between = 0.0;
  for (double mu : means) between += (mu - grand) * (mu - grand);
  between /= static_cast<double>(M - 1);

  GelmanRubin r;
  r.within = within;
  r.between_over_len = between;
  if (!(within > 0.0)) {
    r.degenerate = true;
    return r;
  }
  const double pooled = (n - 1.0) / n * within + between;
  r.rhat = std::sqrt(pooled / within);
  return r;
}

Category classify_category(double b, double delta) noexcept {
  if (b >= delta) return Category::GeDelta;
  if (b >= 0.0) return Category::ZeroToDelta;
  if (b > -delta) return Category::NegDeltaToZero;
  return Category::LeNegDelta;
}

Evidence classify_evidence(double b, double sd) noexcept {
  if (sd == 0.0) return b != 0.0 ? Evidence::Strong : Evidence::Weak;
  const double ratio = std::abs(b / sd);
  if (ratio > kStrongCutoff) return Evidence::Strong;
  if (ratio >= kModerateCutoff) return Evidence::Moderate;
  return Evidence::Weak;
}

std::string to_string(Category c) {
  switch (c) {
    case Category::GeDelta: return "ge_delta";
    case Category::ZeroToDelta: return "zero_to_delta";
    case Category::NegDeltaToZero: return "neg_delta_to_zero";
    case Category::LeNegDelta: return "le_neg_delta";
  }
  return "?";
}

std::string to_string(Evidence e) {
  switch (e) {
    case Evidence::Strong: return "strong";
    case Evidence::Moderate: return "moderate";
    case Evidence::Weak: return "weak";
  }
  return "?";
}

ClassMap classify(const Grid& b_hat, const Grid& psd_b, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("classification delta must be positive");
  require_same_shape(b_hat, psd_b, "classify");
  ClassMap map;
  map.side = b_hat.side();
  map.delta = delta;
  map.category.resize(b_hat.size());
  map.evidence.resize(b_hat.size());
  for (std::size_t i = 0; i < b_hat.size(); ++i) {
    map.category[i] = classify_category(b_hat[i], delta);
    map.evidence[i] = classify_evidence(b_hat[i], psd_b[i]);
  }
  return map;
}

ClassMap classify(const PosteriorSummary& summary, double delta) {
  return classify(summary.b_hat, summary.psd_b, delta);
}

double delta_from_max_abs(const Grid& b_hat, double frac) {
  if (!(frac > 0.0)) throw std::invalid_argument("max-abs fraction must be positive");
  double mx = 0.0;
  for (double v : b_hat.values()) mx = std::max(mx, std::abs(v));
  if (!(mx > 0.0)) throw std::invalid_argument("B_hat is identically zero; cannot derive delta");
  return frac * mx;
}

SimMetrics sim_metrics(const Grid& truth_a, const Grid& truth_b, const Grid& x,
                       std::span<const SurfaceEstimate> estimates) {
  if (estimates.empty()) throw std::invalid_argument("sim_metrics needs at least one replication");
  require_same_shape(truth_a, truth_b, "sim_metrics");
  require_same_shape(truth_a, x, "sim_metrics");
  for (const auto& e : estimates) {
    require_same_shape(truth_a, e.a_hat, "sim_metrics");
    require_same_shape(truth_a, e.b_hat, "sim_metrics");
  }
  const std::size_t N = truth_a.size();
  const double L = static_cast<double>(estimates.size());
  SimMetrics r;
  for (std::size_t i = 0; i < N; ++i) {
    double mean_a = 0.0;
    double mean_b = 0.0;
    for (const auto& e : estimates) {
      mean_a += e.a_hat[i];
      mean_b += e.b_hat[i];
    }
    mean_a /= L;
    mean_b /= L;
    r.bias2_a += (mean_a - truth_a[i]) * (mean_a - truth_a[i]);
    r.bias2_b += (mean_b - truth_b[i]) * (mean_b - truth_b[i]);
    double va = 0.0;
    double vb = 0.0;
    for (const auto& e : estimates) {
      va += (e.a_hat[i] - mean_a) * (e.a_hat[i] - mean_a);
      vb += (e.b_hat[i] - mean_b) * (e.b_hat[i] - mean_b);
    }
    r.var_a += va / L;
    r.var_b += vb / L;
  }
  const double n = static_cast<double>(N);
  r.bias2_a /= n;
  r.bias2_b /= n;
  r.var_a /= n;
  r.var_b /= n;
  r.mse_a = r.bias2_a + r.var_a;
  r.mse_b = r.bias2_b + r.var_b;
  r.mse_y = response_mse(truth_a, truth_b, x, estimates);
  return r;
}

double response_mse(const Grid& truth_a, const Grid& truth_b, const Grid& x,
                    std::span<const SurfaceEstimate> estimates) {
  if (estimates.empty()) throw std::invalid_argument("response_mse needs at least one replication");
  require_same_shape(truth_a, truth_b, "response_mse");
  require_same_shape(truth_a, x, "response_mse");
  double total = 0.0;
  for (const auto& e : estimates) {
    require_same_shape(truth_a, e.a_hat, "response_mse");
    require_same_shape(truth_a, e.b_hat, "response_mse");
    for (std::size_t i = 0; i < truth_a.size(); ++i) {
      const double err = e.a_hat[i] + x[i] * e.b_hat[i] - (truth_a[i] + x[i] * truth_b[i]);
      total += err * err;
    }
  }
  return total / (static_cast<double>(truth_a.size()) * static_cast<double>(estimates.size()));
}

std::string metrics_csv_header() { return "bias2_a,bias2_b,var_a,var_b,mse_a,mse_b,mse_y"; }

std::string metrics_csv_row(const SimMetrics& m) {
  using detail::format_double;
  return format_double(m.bias2_a) + ',' + format_double(m.bias2_b) + ',' + format_double(m.var_a) + ',' +
         format_double(m.var_b) + ',' + format_double(m.mse_a) + ',' + format_double(m.mse_b) + ',' +
         format_double(m.mse_y);
}

}  // namespace wavebvs
