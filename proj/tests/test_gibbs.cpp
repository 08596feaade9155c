#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "wavebvs/gibbs.hpp"
#include "wavebvs/prior.hpp"
#include "wavebvs/random.hpp"

namespace {

using namespace wavebvs;

constexpr double kKsLevel = 0.01;

template <class Draw>
std::vector<double> sample(std::size_t n, Draw&& draw) {
  std::vector<double> out(n);
  for (double& v : out) v = draw();
  return out;
}

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

// Conditional formulas ---------------------------------------------------------

TEST(Conditional, DirectSubstitutionExample) {
  const auto c = coordinate_conditional(0.0, 1.0, 1.0, 1.0, 0.0);
  EXPECT_NEAR(c.v2, 2.0, 1e-15);
  EXPECT_NEAR(std::exp(c.log_rho), std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(c.prob_include, 1.0 / (1.0 + std::sqrt(2.0)), 1e-12);
  EXPECT_NEAR(c.prob_include, 0.4142, 1e-4);
  EXPECT_DOUBLE_EQ(c.slab_mean, 0.0);
  EXPECT_NEAR(c.slab_var, 0.5, 1e-15);
}

TEST(Conditional, WideSlabWithLargeSignalIncludes) {
  const auto c = coordinate_conditional(50.0, 1.0, 1.0, 1e12, 0.0);
  EXPECT_NEAR(c.v2, 1.0, 1e-11);
  EXPECT_GT(c.prob_include, 1.0 - 1e-12);
}

TEST(Conditional, ExtremeLogRhoDoesNotOverflow) {
  // u^2 / (2 sigma^2 v^2) near 700 and beyond.
  for (double u : {37.5, 40.0, 1e3}) {
    const auto c = coordinate_conditional(u, 1.0, 1.0, 1.0, 0.0);
    const double expected_log_rho = 0.5 * std::log(2.0) - u * u / 4.0;
    EXPECT_NEAR(c.log_rho, expected_log_rho, 1e-9 * std::abs(expected_log_rho));
    EXPECT_TRUE(std::isfinite(c.prob_include));
    EXPECT_GE(c.prob_include, 0.0);
    EXPECT_LE(c.prob_include, 1.0);
  }
  const auto inc = coordinate_conditional(40.0, 1.0, 1.0, 1.0, 0.0);
  EXPECT_DOUBLE_EQ(inc.prob_include, 1.0);
  const auto exc = coordinate_conditional(0.0, 1.0, 1.0, 1.0, 700.0);
  EXPECT_GT(exc.prob_include, 0.0);
  EXPECT_LT(exc.prob_include, 1e-300);
}

TEST(Conditional, StableSigmoid) {
  EXPECT_DOUBLE_EQ(stable_sigmoid(0.0), 0.5);
  EXPECT_DOUBLE_EQ(stable_sigmoid(1000.0), 1.0);
  EXPECT_EQ(stable_sigmoid(-1000.0), 0.0);
  EXPECT_NEAR(stable_sigmoid(-700.0), std::exp(-700.0), 1e-310);
  EXPECT_NEAR(stable_sigmoid(2.0), 1.0 / (1.0 + std::exp(-2.0)), 1e-15);
}

class ConditionalOracle : public ::testing::TestWithParam<Model> {};

TEST_P(ConditionalOracle, MatchesQuadratureOfJointPosterior) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const fixtures::Toy toy = fixtures::make_toy(GetParam(), seed);
    const GibbsSampler sampler(*toy.X, toy.y, toy.log_odds, toy.hyper);
    const ChainState state = toy.state(sampler);
    for (std::size_t j = 0; j < toy.gamma.size(); ++j) {
      const auto c = sampler.conditional(state, static_cast<Eigen::Index>(j));
      const auto q = oracle::quadrature_conditional(toy.joint(), toy.beta, toy.gamma, toy.sigma2, toy.tau2, j);
      EXPECT_NEAR(c.prob_include, q.prob_include, 1e-8) << "seed " << seed << " j " << j;
      EXPECT_NEAR(c.slab_mean, q.slab_mean, 1e-8) << "seed " << seed << " j " << j;
      EXPECT_NEAR(c.slab_var, q.slab_var, 1e-8) << "seed " << seed << " j " << j;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(BothModels, ConditionalOracle, ::testing::Values(Model::I, Model::II),
                         [](const auto& info) { return info.param == Model::I ? "ModelI" : "ModelII"; });

TEST(LogPosterior, DiffersFromOracleByAConstant) {
  for (Model model : {Model::I, Model::II}) {
    fixtures::Toy toy = fixtures::make_toy(model, 7);
    const GibbsSampler sampler(*toy.X, toy.y, toy.log_odds, toy.hyper);
    const double offset = sampler.log_posterior(toy.state(sampler)) -
                          oracle::log_joint(toy.joint(), toy.beta, toy.gamma, toy.sigma2, toy.tau2);
    toy.beta[0] += 0.3;
    toy.sigma2 = 1.9;
    for (double& t : toy.tau2) t *= 0.6;
    const double offset2 = sampler.log_posterior(toy.state(sampler)) -
                           oracle::log_joint(toy.joint(), toy.beta, toy.gamma, toy.sigma2, toy.tau2);
    EXPECT_NEAR(offset, offset2, 1e-9);
  }
}

// Initialization ----------------------------------------------------------------

TEST(Init, NoiselessLeastSquaresStart) {
  const fixtures::Toy toy = fixtures::make_toy(Model::I, 4);
  const Eigen::VectorXd truth = Eigen::VectorXd::LinSpaced(toy.X->cols(), -2.0, 3.0);
  const GibbsSampler sampler(*toy.X, toy.X->dense() * truth, toy.log_odds, toy.hyper);
  const ChainState s = sampler.init_chain(0.0, 5);
  EXPECT_LT((s.beta - truth).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_EQ(s.included(), static_cast<std::size_t>(toy.X->cols()));
  EXPECT_DOUBLE_EQ(s.sigma2, 1.0 / 6.0);
  EXPECT_DOUBLE_EQ(s.tau2, 1.0 / 6.0);
  EXPECT_FALSE(sampler.ridge_fallback());
  EXPECT_LT(s.residual.cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Init, TauScaleAndPerturbation) {
  const fixtures::Toy toy = fixtures::make_toy(Model::II, 4);
  const GibbsSampler sampler(*toy.X, toy.y, toy.log_odds, toy.hyper);
  const ChainState a = sampler.init_chain(1e-4, 5, 0.01);
  EXPECT_DOUBLE_EQ(a.tau2_vec[3], 0.01 / 6.0);
  const Eigen::VectorXd diff = a.beta - sampler.least_squares();
  EXPECT_GT(diff.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_LT(diff.cwiseAbs().maxCoeff(), 0.1);
  EXPECT_THROW(sampler.init_chain(-1.0, 1), SamplerError);
  EXPECT_THROW(sampler.init_chain(0.0, 1, 0.0), SamplerError);
}

TEST(Init, DuplicateColumnEngagesRidge) {
  const LatticeSpec l(0);
  // x = 1 makes the slope block a copy of W.
  const DesignMatrix X = build_design(l, Grid(l.side(), std::vector<double>(l.size(), 1.0)));
  const auto yv = fixtures::random_vector(l.size(), 3);
  const GibbsSampler sampler(X, Eigen::Map<const Eigen::VectorXd>(yv.data(), 16),
                             std::vector<double>(8, 0.0), Hyperparams{});
  EXPECT_TRUE(sampler.ridge_fallback());
  const ChainOutput out = sampler.run_chain(RunSettings{20, 10, 1, 0.0}, 1);
  EXPECT_TRUE(out.meta.ridge_fallback);
  EXPECT_TRUE(std::isfinite(out.beta_draws.sum()));
}

// Variance updates ------------------------------------------------------------------

struct EmptyModel {
  LatticeSpec lattice{0};
  DesignMatrix X = build_design(lattice, fixtures::random_grid(4, 2));
  Eigen::VectorXd y = Eigen::VectorXd::Zero(16);
};

TEST(Variances, EmptyModelOne) {
  EmptyModel e;
  const GibbsSampler sampler(e.X, e.y, std::vector<double>(8, 0.0), Hyperparams{6.0, 6.0, Model::I});
  ChainState s = sampler.init_chain(0.0, 9);
  s.beta.setZero();
  std::fill(s.gamma.begin(), s.gamma.end(), 0);
  sampler.refresh_residual(s);
  std::vector<double> sig;
  std::vector<double> tau;
  for (int t = 0; t < 100000; ++t) {
    sampler.update_variances_model1(s);
    sig.push_back(s.sigma2);
    tau.push_back(s.tau2);
  }
  // sigma^2 ~ IG(11, 0.5), mean 0.05; tau^2 ~ IG(3, 0.5).
  EXPECT_NEAR(mean_of(sig), 0.05, 3.0 * std::sqrt(0.25 / (100.0 * 9.0) / 1e5));
  const double d_sig = oracle::ks_statistic(sig, [](double x) { return oracle::inverse_gamma_cdf(x, 11.0, 0.5); });
  const double d_tau = oracle::ks_statistic(tau, [](double x) { return oracle::inverse_gamma_cdf(x, 3.0, 0.5); });
  EXPECT_GT(oracle::ks_pvalue(d_sig, sig.size()), kKsLevel);
  EXPECT_GT(oracle::ks_pvalue(d_tau, tau.size()), kKsLevel);
}

TEST(Variances, ModelTwoPerCoordinate) {
  EmptyModel e;
  const GibbsSampler sampler(e.X, e.y, std::vector<double>(8, 0.0), Hyperparams{6.0, 6.0, Model::II});
  ChainState s = sampler.init_chain(0.0, 10);
  s.beta.setZero();
  std::fill(s.gamma.begin(), s.gamma.end(), 0);
  s.gamma[2] = 1;
  s.beta[2] = 1.0;
  sampler.refresh_residual(s);
  std::vector<double> excluded;
  std::vector<double> included;
  for (int t = 0; t < 100000; ++t) {
    sampler.update_variances_model2(s);
    excluded.push_back(s.tau2_vec[0]);
    included.push_back(s.tau2_vec[2]);
  }
  // 1/chi2_6 has mean 1/(6-2).
  EXPECT_NEAR(mean_of(excluded), 0.25, 0.01);
  const double d_exc = oracle::ks_statistic(excluded, [](double x) { return oracle::inverse_gamma_cdf(x, 3.0, 0.5); });
  const double d_inc = oracle::ks_statistic(included, [](double x) { return oracle::inverse_gamma_cdf(x, 3.5, 1.0); });
  EXPECT_GT(oracle::ks_pvalue(d_exc, excluded.size()), kKsLevel);
  EXPECT_GT(oracle::ks_pvalue(d_inc, included.size()), kKsLevel);
}

// Random variates --------------------------------------------------------------------

TEST(Variates, InverseGammaPassesKs) {
  for (auto [a, b] : {std::pair{11.0, 0.5}, std::pair{3.5, 1.0}, std::pair{0.75, 2.0}}) {
    Rng rng(derive_seed(42, static_cast<std::uint64_t>(a * 100)));
    const auto x = sample(100000, [&] { return draw_inverse_gamma(rng, a, b); });
    const double d = oracle::ks_statistic(x, [a, b](double v) { return oracle::inverse_gamma_cdf(v, a, b); });
    EXPECT_GT(oracle::ks_pvalue(d, x.size()), kKsLevel) << "IG(" << a << ", " << b << ")";
  }
}

TEST(Variates, InverseChiSquarePassesKs) {
  for (double df : {1.0, 6.0, 20.0}) {
    Rng rng(derive_seed(7, static_cast<std::uint64_t>(df)));
    const auto x = sample(100000, [&] { return draw_inv_chi_square(rng, df); });
    const double d = oracle::ks_statistic(x, [df](double v) { return oracle::inverse_gamma_cdf(v, df / 2.0, 0.5); });
    EXPECT_GT(oracle::ks_pvalue(d, x.size()), kKsLevel) << "df " << df;
  }
}

TEST(Variates, GammaAtSmallShape) {
  Rng rng(3);
  const auto x = sample(100000, [&] { return rng.gamma(0.5); });
  const double d = oracle::ks_statistic(x, [](double v) { return boost::math::gamma_p(0.5, v); });
  EXPECT_GT(oracle::ks_pvalue(d, x.size()), kKsLevel);
}

TEST(Variates, KsOracleRejectsWrongDistribution) {
  Rng rng(5);
  const auto x = sample(100000, [&] { return draw_inverse_gamma(rng, 3.0, 0.5); });
  const double d = oracle::ks_statistic(x, [](double v) { return oracle::inverse_gamma_cdf(v, 3.0, 0.45); });
  EXPECT_LT(oracle::ks_pvalue(d, x.size()), 1e-6);
}

TEST(Variates, DerivedSeedsAreStableAndDistinct) {
  EXPECT_EQ(derive_seed(1, 0), derive_seed(1, 0));
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
}

// Sweeps -------------------------------------------------------------------------------

TEST(Sweep, MaintainedResidualMatchesDirectRecomputation) {
  for (Model model : {Model::I, Model::II}) {
    const LatticeSpec l(2);
    const DesignMatrix X = build_design(l, fixtures::random_grid(l.side(), 21));
    const auto yv = fixtures::random_vector(l.size(), 22, 2.0);
    const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(yv.data(), static_cast<Eigen::Index>(yv.size()));
    SamplerOptions opts;
    opts.check_residual = true;
    opts.scan = ScanOrder::Random;
    const GibbsSampler sampler(X, y, PriorSchedule::builtin(PriorKind::Prior1, 0.8), Hyperparams{6, 6, model}, opts);
    ChainState s = sampler.init_chain(1e-2, 23);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
      model == Model::I ? sampler.sweep_model1(s) : sampler.sweep_model2(s);
      worst = std::max(worst, (s.residual - (y - X.dense() * s.beta)).cwiseAbs().maxCoeff());
      model == Model::I ? sampler.update_variances_model1(s) : sampler.update_variances_model2(s);
      for (std::size_t j = 0; j < s.gamma.size(); ++j) {
        if (!s.gamma[j]) EXPECT_EQ(s.beta[static_cast<Eigen::Index>(j)], 0.0);
      }
    }
    EXPECT_LT(worst, 1e-8);
  }
}

TEST(Sweep, NonFiniteInputAborts) {
  const fixtures::Toy toy = fixtures::make_toy(Model::I, 1);
  Eigen::VectorXd y = toy.y;
  const GibbsSampler sampler(*toy.X, y, toy.log_odds, toy.hyper);
  ChainState s = sampler.init_chain(0.0, 1);
  s.residual[0] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(sampler.sweep_model1(s), SamplerError);
}

// Chains --------------------------------------------------------------------------------

TEST(Chain, KeptDrawCountAndThinning) {
  const fixtures::Toy toy = fixtures::make_toy(Model::I, 2);
  const GibbsSampler sampler(*toy.X, toy.y, toy.log_odds, toy.hyper);
  EXPECT_EQ(sampler.run_chain(RunSettings{5000, 2500, 1, 1e-4}, 1).kept(), 2500u);
  const ChainOutput thinned = sampler.run_chain(RunSettings{100, 40, 3, 1e-4}, 1);
  EXPECT_EQ(thinned.kept(), 20u);
  EXPECT_EQ(thinned.sigma2_draws.size(), 20u);
  for (double g : thinned.gamma_freq) {
    EXPECT_GE(g, 0.0);
    EXPECT_LE(g, 1.0);
  }
}

TEST(Chain, BurnInMustBeSmallerThanSweeps) {
  const fixtures::Toy toy = fixtures::make_toy(Model::I, 2);
  const GibbsSampler sampler(*toy.X, toy.y, toy.log_odds, toy.hyper);
  EXPECT_THROW(sampler.run_chain(RunSettings{10, 20, 1, 1e-4}, 1), SamplerError);
  EXPECT_THROW(sampler.run_chain(RunSettings{10, 5, 0, 1e-4}, 1), SamplerError);
}

TEST(Chain, SameSeedIsBitIdenticalAcrossWorkerCounts) {
  const fixtures::Toy toy = fixtures::make_toy(Model::II, 3);
  const GibbsSampler sampler(*toy.X, toy.y, toy.log_odds, toy.hyper);
  const RunSettings rs{300, 100, 1, 1e-4};
  const ChainOutput a = sampler.run_chain(rs, 77);
  const ChainOutput b = sampler.run_chain(rs, 77);
  EXPECT_TRUE(a.beta_draws == b.beta_draws);
  EXPECT_EQ(a.sigma2_draws, b.sigma2_draws);
  EXPECT_EQ(a.tau2_draws, b.tau2_draws);

  const auto serial = run_chains(sampler, rs, 5, 4, 1);
  const auto parallel = run_chains(sampler, rs, 5, 4, 4);
  for (std::size_t c = 0; c < 4; ++c) {
    EXPECT_TRUE(serial[c].beta_draws == parallel[c].beta_draws);
    EXPECT_EQ(serial[c].meta.seed, derive_seed(5, c));
  }
  EXPECT_FALSE(serial[0].beta_draws == serial[1].beta_draws);
}

TEST(Chain, OutputDirectoryRoundTrip) {
  const fixtures::Toy toy = fixtures::make_toy(Model::I, 3);
  const GibbsSampler sampler(*toy.X, toy.y, toy.log_odds, toy.hyper);
  const ChainOutput a = sampler.run_chain(RunSettings{60, 20, 2, 1e-4}, 8);
  const auto dir = std::filesystem::temp_directory_path() / "wavebvs_chain_io";
  std::filesystem::remove_all(dir);
  write_chain_output(a, dir);
  for (const char* f : {"beta.csv", "scalars.csv", "gamma_freq.csv", "meta.txt"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  }
  const ChainOutput b = read_chain_output(dir);
  EXPECT_TRUE(a.beta_draws == b.beta_draws);
  EXPECT_EQ(a.sigma2_draws, b.sigma2_draws);
  EXPECT_EQ(a.log_posterior, b.log_posterior);
  EXPECT_EQ(a.gamma_freq, b.gamma_freq);
  EXPECT_EQ(b.meta.seed, 8u);
  EXPECT_EQ(b.meta.thin, 2u);
}

// Stationarity --------------------------------------------------------------------------------

// Successive-conditional simulator: alternating a Gibbs step with a fresh
// y | parameters leaves the prior invariant, so the sigma^2 and tau^2 traces
// must reproduce the prior moments.
class GewekeCheck : public ::testing::TestWithParam<Model> {};

TEST_P(GewekeCheck, SuccessiveConditionalMatchesPriorMoments) {
  const Model model = GetParam();
  const Hyperparams hyper{8.0, 8.0, model};
  const LatticeSpec l(0);
  const DesignMatrix X = build_design(l, fixtures::random_grid(l.side(), 31));
  const std::vector<double> log_odds(8, 0.0);

  Rng prior_rng(99);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(16);
  GibbsSampler first(X, y, log_odds, hyper);
  ChainState s = first.init_chain(0.0, 100);
  s.sigma2 = draw_inv_chi_square(prior_rng, hyper.nu);
  s.tau2 = draw_inv_chi_square(prior_rng, hyper.mu);
  for (Eigen::Index j = 0; j < 8; ++j) {
    s.tau2_vec[j] = draw_inv_chi_square(prior_rng, hyper.mu);
    const bool in = prior_rng.uniform() < 0.5;
    s.gamma[static_cast<std::size_t>(j)] = in;
    s.beta[j] = in ? std::sqrt(model == Model::I ? s.tau2 : s.tau2_vec[j]) * prior_rng.normal() : 0.0;
  }

  const std::size_t T = 200000;
  std::vector<double> sig;
  std::vector<double> tau;
  std::vector<double> inc;
  Rng noise(101);
  for (std::size_t t = 0; t < T; ++t) {
    for (Eigen::Index i = 0; i < 16; ++i) y[i] = std::sqrt(s.sigma2) * noise.normal();
    y += X.dense() * s.beta;
    const GibbsSampler sampler(X, y, log_odds, hyper);
    sampler.refresh_residual(s);
    sampler.step(s);
    sig.push_back(s.sigma2);
    tau.push_back(model == Model::I ? s.tau2 : s.tau2_vec[5]);
    inc.push_back(static_cast<double>(s.included()) / 8.0);
  }
  // IG(4, 1/2): mean 1/6.
  const double prior_mean = 1.0 / (hyper.nu - 2.0);
  EXPECT_LT(std::abs(mean_of(sig) - prior_mean), 3.0 * oracle::batch_means_se(sig, 50));
  EXPECT_LT(std::abs(mean_of(tau) - prior_mean), 3.0 * oracle::batch_means_se(tau, 50));
  EXPECT_LT(std::abs(mean_of(inc) - 0.5), 3.0 * oracle::batch_means_se(inc, 50));
}

INSTANTIATE_TEST_SUITE_P(BothModels, GewekeCheck, ::testing::Values(Model::I, Model::II),
                         [](const auto& info) { return info.param == Model::I ? "ModelI" : "ModelII"; });

}  // namespace
