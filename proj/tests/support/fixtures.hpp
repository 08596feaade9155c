#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <ostream>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "wavebvs/gibbs.hpp"
#include "wavebvs/grid.hpp"
#include "wavebvs/haar.hpp"

namespace wavebvs {

// Readable names for value-parameterized tests.
inline void PrintTo(Model m, std::ostream* os) { *os << (m == Model::I ? "ModelI" : "ModelII"); }

}  // namespace wavebvs

namespace fixtures {

inline wavebvs::Grid random_grid(std::size_t side, std::uint64_t seed, double sd = 1.0) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> z(0.0, sd);
  std::vector<double> v(side * side);
  for (double& e : v) e = z(eng);
  return {side, std::move(v)};
}

inline std::vector<double> random_vector(std::size_t n, std::uint64_t seed, double sd = 1.0) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> z(0.0, sd);
  std::vector<double> v(n);
  for (double& e : v) e = z(eng);
  return v;
}

/// n = 16, m = 8 problem at J = 0 with random covariate, response, prior
/// odds and a state with a mix of included and excluded coordinates.
struct Toy {
  wavebvs::LatticeSpec lattice{0};
  std::unique_ptr<wavebvs::DesignMatrix> X;
  Eigen::VectorXd y;
  std::vector<double> theta;
  std::vector<double> log_odds;
  wavebvs::Hyperparams hyper;

  Eigen::VectorXd beta;
  std::vector<int> gamma;
  double sigma2 = 0.7;
  std::vector<double> tau2;

  oracle::JointModel joint() const { return {y, X->dense(), theta, hyper.nu, hyper.mu}; }

  wavebvs::ChainState state(const wavebvs::GibbsSampler& sampler) const {
    wavebvs::ChainState s = sampler.init_chain(0.0, 1);
    s.beta = beta;
    for (std::size_t j = 0; j < gamma.size(); ++j) s.gamma[j] = static_cast<std::uint8_t>(gamma[j]);
    s.sigma2 = sigma2;
    if (hyper.model == wavebvs::Model::I) {
      s.tau2 = tau2[0];
    } else {
      s.tau2_vec = Eigen::Map<const Eigen::VectorXd>(tau2.data(), static_cast<Eigen::Index>(tau2.size()));
    }
    sampler.refresh_residual(s);
    return s;
  }
};

inline Toy make_toy(wavebvs::Model model, std::uint64_t seed) {
  Toy t;
  t.hyper = {6.0, 6.0, model};
  const wavebvs::Grid x = random_grid(t.lattice.side(), seed);
  t.X = std::make_unique<wavebvs::DesignMatrix>(wavebvs::build_design(t.lattice, x));
  const auto m = static_cast<std::size_t>(t.X->cols());
  const auto yv = random_vector(t.lattice.size(), seed + 1, 1.5);
  t.y = Eigen::Map<const Eigen::VectorXd>(yv.data(), static_cast<Eigen::Index>(yv.size()));

  std::mt19937_64 eng(seed + 2);
  std::uniform_real_distribution<double> u(0.15, 0.85);
  std::normal_distribution<double> z(0.0, 1.0);
  t.beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
  for (std::size_t j = 0; j < m; ++j) {
    t.theta.push_back(u(eng));
    t.log_odds.push_back(std::log((1.0 - t.theta.back()) / t.theta.back()));
    t.gamma.push_back(j % 3 == 1 ? 0 : 1);
    if (t.gamma.back()) t.beta[static_cast<Eigen::Index>(j)] = z(eng);
  }
  if (model == wavebvs::Model::I) {
    t.tau2 = {1.3};
  } else {
    for (std::size_t j = 0; j < m; ++j) t.tau2.push_back(0.2 + 2.0 * u(eng));
  }
  return t;
}

}  // namespace fixtures
