#include "wavebvs/gibbs.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <thread>

namespace wavebvs {
namespace {

constexpr double kTauFloor = 1e-300;
constexpr double kRidge = 1e-8;
constexpr double kResidualTolerance = 1e-8;

std::vector<double> odds_from_schedule(const DesignMatrix& X, const PriorSchedule& prior) {
  const auto d = static_cast<std::size_t>(X.cols() / 2);
  if (X.cols() % 2 != 0 || d == 0) throw SamplerError("design matrix must have 2d columns");
  int level = -1;
  for (int j = 0; j <= 12; ++j) {
    if (basis_size(j) == d) level = j;
  }
  if (level < 0) throw SamplerError("design width " + std::to_string(X.cols()) + " is not 2 * 4^(J+1)");
  return log_prior_odds(prior, WaveletBasis(level));
}

// log(1 + exp(x)) without overflow.
double log1p_exp(double x) noexcept { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double log_inverse_gamma_density(double x, double shape, double scale) {
  return shape * std::log(scale) - std::lgamma(shape) - (shape + 1.0) * std::log(x) - scale / x;
}

}  // namespace

CoordinateConditional coordinate_conditional(double u, double xtx, double sigma2, double tau2,
                                             double log_prior_odds) noexcept {
  CoordinateConditional c;
  c.u = u;
  c.v2 = xtx + sigma2 / tau2;
  c.log_rho = log_prior_odds + 0.5 * (std::log(tau2) + std::log(c.v2) - std::log(sigma2)) -
              (u * u) / (2.0 * sigma2 * c.v2);
  c.prob_include = stable_sigmoid(-c.log_rho);
  c.slab_mean = u / c.v2;
  c.slab_var = sigma2 / c.v2;
  return c;
}

double stable_sigmoid(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

std::size_t ChainState::included() const noexcept {
  return static_cast<std::size_t>(std::count(gamma.begin(), gamma.end(), std::uint8_t{1}));
}

void RunSettings::validate() const {
  if (sweeps == 0) throw SamplerError("sweeps must be positive");
  if (burn_in >= sweeps) {
    throw SamplerError("burn_in (" + std::to_string(burn_in) + ") must be less than sweeps (" +
                       std::to_string(sweeps) + ")");
  }
  if (thin == 0) throw SamplerError("thin must be at least 1");
  if (!(init_sigma2 >= 0.0)) throw SamplerError("init_sigma2 must be non-negative");
  if (!(init_tau2_scale > 0.0)) throw SamplerError("init_tau2_scale must be positive");
}

GibbsSampler::GibbsSampler(const DesignMatrix& X, Eigen::VectorXd y, const PriorSchedule& prior, Hyperparams hyper,
                           SamplerOptions options)
    : GibbsSampler(X, std::move(y), odds_from_schedule(X, prior), hyper, options) {}

GibbsSampler::GibbsSampler(const DesignMatrix& X, Eigen::VectorXd y, std::vector<double> log_prior_odds,
                           Hyperparams hyper, SamplerOptions options)
    : X_(&X), y_(std::move(y)), log_odds_(std::move(log_prior_odds)), hyper_(hyper), options_(options) {
  hyper_.validate();
  if (y_.size() != X.rows()) {
    throw SamplerError("response length " + std::to_string(y_.size()) + " does not match design rows " +
                       std::to_string(X.rows()));
  }
  if (log_odds_.size() != static_cast<std::size_t>(X.cols())) {
    throw SamplerError("prior odds length does not match design columns");
  }
  for (std::size_t j = 0; j < log_odds_.size(); ++j) {
    if (!std::isfinite(log_odds_[j])) throw SamplerError("non-finite prior odds at coordinate " + std::to_string(j));
  }

  const Eigen::MatrixXd& dense = X.dense();
  Eigen::MatrixXd xtx = dense.transpose() * dense;
  const Eigen::VectorXd xty = dense.transpose() * y_;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(xtx);
  const auto pivots = ldlt.vectorD().cwiseAbs();
  const bool singular = ldlt.info() != Eigen::Success || pivots.size() == 0 ||
                        pivots.minCoeff() <= 1e-12 * std::max(1.0, pivots.maxCoeff());
  if (singular) {
    ridge_ = true;
    xtx.diagonal().array() += kRidge;
    ldlt.compute(xtx);
  }
  beta_ls_ = ldlt.solve(xty);
}

ChainState GibbsSampler::init_chain(double sigma_tilde2, std::uint64_t seed, double tau2_scale) const {
  if (!(sigma_tilde2 >= 0.0)) throw SamplerError("init perturbation variance must be non-negative");
  if (!(tau2_scale > 0.0)) throw SamplerError("init tau^2 scale must be positive");
  const Eigen::Index m = X_->cols();
  ChainState s{.beta = beta_ls_,
                .gamma = std::vector<std::uint8_t>(static_cast<std::size_t>(m), 1),
                .sigma2 = 1.0 / hyper_.nu,
                .tau2 = tau2_scale / hyper_.mu,
                .tau2_vec = Eigen::VectorXd::Constant(m, tau2_scale / hyper_.mu),
                .residual = Eigen::VectorXd(),
                .rng = Rng(seed)};
  const double sd = std::sqrt(sigma_tilde2);
  if (sd > 0.0) {
    for (Eigen::Index j = 0; j < m; ++j) s.beta[j] += sd * s.rng.normal();
  }
  refresh_residual(s);
  return s;
}

CoordinateConditional GibbsSampler::conditional(const ChainState& state, Eigen::Index j) const {
  const auto& col = X_->sparse_column(j);
  double dot = 0.0;
  for (std::size_t t = 0; t < col.rows.size(); ++t) dot += state.residual[col.rows[t]] * col.values[t];
  const double xtx = X_->col_sqnorm(j);
  const double tau2 = hyper_.model == Model::II ? state.tau2_vec[j] : state.tau2;
  return coordinate_conditional(dot + state.beta[j] * xtx, xtx, state.sigma2, tau2,
                                log_odds_[static_cast<std::size_t>(j)]);
}

void GibbsSampler::sweep(ChainState& state, bool per_coordinate_tau) const {
  const Eigen::Index m = X_->cols();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  if (options_.scan == ScanOrder::Random) std::shuffle(order.begin(), order.end(), state.rng.engine());

  for (const Eigen::Index j : order) {
    const auto& col = X_->sparse_column(j);
    double dot = 0.0;
    for (std::size_t t = 0; t < col.rows.size(); ++t) dot += state.residual[col.rows[t]] * col.values[t];
    const double xtx = X_->col_sqnorm(j);
    const double beta_old = state.beta[j];
    const double tau2 = per_coordinate_tau ? state.tau2_vec[j] : state.tau2;
    const CoordinateConditional c = coordinate_conditional(dot + beta_old * xtx, xtx, state.sigma2, tau2,
                                                           log_odds_[static_cast<std::size_t>(j)]);
    if (!std::isfinite(c.u) || !std::isfinite(c.log_rho)) {
      throw SamplerError("non-finite conditional at coordinate " + std::to_string(j) + " (u=" + std::to_string(c.u) +
                         ", log rho=" + std::to_string(c.log_rho) + ")");
    }

    const bool include = state.rng.uniform() < c.prob_include;
    const double beta_new = include ? c.slab_mean + std::sqrt(c.slab_var) * state.rng.normal() : 0.0;
    state.gamma[static_cast<std::size_t>(j)] = include ? 1 : 0;
    state.beta[j] = beta_new;

    const double delta = beta_new - beta_old;
    if (delta != 0.0) {
      for (std::size_t t = 0; t < col.rows.size(); ++t) state.residual[col.rows[t]] -= delta * col.values[t];
    }
  }
  if (options_.check_residual) verify_residual(state);
}

void GibbsSampler::sweep_model1(ChainState& state) const { sweep(state, false); }

void GibbsSampler::sweep_model2(ChainState& state) const { sweep(state, true); }

double GibbsSampler::draw_sigma2(ChainState& state) const {
  if (options_.check_residual) verify_residual(state);
  const double rss = state.residual.squaredNorm();
  const double n = static_cast<double>(y_.size());
  return draw_inverse_gamma(state.rng, 0.5 * (n + hyper_.nu), 0.5 * (1.0 + rss));
}

double GibbsSampler::clamp_tau2(ChainState& state, double tau2) const {
  if (tau2 < kTauFloor) {
    ++state.tau_clamps;
    return kTauFloor;
  }
  return tau2;
}

void GibbsSampler::update_variances_model1(ChainState& state) const {
  state.sigma2 = draw_sigma2(state);
  const double k = static_cast<double>(state.included());
  // Excluded coordinates are exactly zero, so this is the norm over the included set.
  const double bb = state.beta.squaredNorm();
  state.tau2 = clamp_tau2(state, draw_inverse_gamma(state.rng, 0.5 * (k + hyper_.mu), 0.5 * (1.0 + bb)));
}

void GibbsSampler::update_variances_model2(ChainState& state) const {
  for (Eigen::Index j = 0; j < state.beta.size(); ++j) {
    const double t = state.gamma[static_cast<std::size_t>(j)]
                         ? draw_inverse_gamma(state.rng, 0.5 * (1.0 + hyper_.mu),
                                              0.5 * (1.0 + state.beta[j] * state.beta[j]))
                         : draw_inv_chi_square(state.rng, hyper_.mu);
    state.tau2_vec[j] = clamp_tau2(state, t);
  }
  state.sigma2 = draw_sigma2(state);
}

void GibbsSampler::step(ChainState& state) const {
  if (hyper_.model == Model::I) {
    sweep_model1(state);
    update_variances_model1(state);
  } else {
    sweep_model2(state);
    update_variances_model2(state);
  }
}

ChainOutput GibbsSampler::run_chain(const RunSettings& settings, std::uint64_t seed) const {
  settings.validate();
  const auto start = std::chrono::steady_clock::now();
  ChainState state = init_chain(settings.init_sigma2, seed, settings.init_tau2_scale);

  const std::size_t kept = (settings.sweeps - settings.burn_in) / settings.thin;
  const Eigen::Index m = X_->cols();
  ChainOutput out;
  out.beta_draws.resize(static_cast<Eigen::Index>(kept), m);
  out.sigma2_draws.reserve(kept);
  out.tau2_draws.reserve(kept);
  out.log_posterior.reserve(kept);
  std::vector<std::size_t> counts(static_cast<std::size_t>(m), 0);

  std::size_t row = 0;
  for (std::size_t t = 1; t <= settings.sweeps; ++t) {
    step(state);
    if (t <= settings.burn_in || (t - settings.burn_in) % settings.thin != 0 || row >= kept) continue;
    out.beta_draws.row(static_cast<Eigen::Index>(row++)) = state.beta.transpose();
    out.sigma2_draws.push_back(state.sigma2);
    out.tau2_draws.push_back(hyper_.model == Model::I ? state.tau2
                                                      : std::exp(state.tau2_vec.array().log().mean()));
    out.log_posterior.push_back(log_posterior(state));
    for (std::size_t j = 0; j < counts.size(); ++j) counts[j] += state.gamma[j];
  }

  out.gamma_freq.resize(counts.size());
  for (std::size_t j = 0; j < counts.size(); ++j) {
    out.gamma_freq[j] = static_cast<double>(counts[j]) / static_cast<double>(kept);
  }
  out.meta = {.seed = seed,
              .model = hyper_.model,
              .sweeps = settings.sweeps,
              .burn_in = settings.burn_in,
              .thin = settings.thin,
              .wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(),
              .ridge_fallback = ridge_,
              .tau_clamps = state.tau_clamps};
  return out;
}

Eigen::VectorXd GibbsSampler::direct_residual(const ChainState& state) const { return y_ - X_->dense() * state.beta; }

void GibbsSampler::refresh_residual(ChainState& state) const { state.residual = direct_residual(state); }

void GibbsSampler::verify_residual(const ChainState& state) const {
  const double err = (state.residual - direct_residual(state)).cwiseAbs().maxCoeff();
  if (!(err < kResidualTolerance)) {
    throw SamplerError("maintained residual drifted from y - X beta by " + std::to_string(err));
  }
}

double GibbsSampler::log_posterior(const ChainState& state) const {
  const double n = static_cast<double>(y_.size());
  const double log2pi = std::log(2.0 * std::numbers::pi);
  double lp = -0.5 * n * (log2pi + std::log(state.sigma2)) - state.residual.squaredNorm() / (2.0 * state.sigma2);
  lp += log_inverse_gamma_density(state.sigma2, 0.5 * hyper_.nu, 0.5);
  if (hyper_.model == Model::I) lp += log_inverse_gamma_density(state.tau2, 0.5 * hyper_.mu, 0.5);
  for (Eigen::Index j = 0; j < state.beta.size(); ++j) {
    const double lo = log_odds_[static_cast<std::size_t>(j)];
    const double tau2 = hyper_.model == Model::II ? state.tau2_vec[j] : state.tau2;
    if (hyper_.model == Model::II) lp += log_inverse_gamma_density(tau2, 0.5 * hyper_.mu, 0.5);
    if (state.gamma[static_cast<std::size_t>(j)]) {
      lp += -log1p_exp(lo) - 0.5 * (log2pi + std::log(tau2)) - state.beta[j] * state.beta[j] / (2.0 * tau2);
    } else {
      lp += lo - log1p_exp(lo);
    }
  }
  return lp;
}

std::vector<ChainOutput> run_chains(const GibbsSampler& sampler, const RunSettings& settings, std::uint64_t seed,
                                    std::size_t count, std::size_t workers) {
  settings.validate();
  std::vector<ChainOutput> outputs(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c = next++; c < count; c = next++) {
      try {
        outputs[c] = sampler.run_chain(settings, derive_seed(seed, c));
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return outputs;
}

}  // namespace wavebvs
