#pragma once

#include <cstdint>
#include <random>

namespace wavebvs {

/// Seeded pseudo-random stream owned by one chain.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::mt19937_64& engine() noexcept { return engine_; }

  /// Uniform on [0, 1).
  double uniform() { return uniform_(engine_); }
  double normal() { return normal_(engine_); }
  /// Gamma(shape, scale = 1).
  double gamma(double shape);
  double chi_square(double df);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Draw from IG(shape, scale) with density proportional to x^(-shape-1) exp(-scale/x).
double draw_inverse_gamma(Rng& rng, double shape, double scale);

/// Draw 1/X with X ~ chi2(df).
double draw_inv_chi_square(Rng& rng, double df);

/// Stable stream id from a master seed: splitmix64(master ^ splitmix64(stream)).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept;

}  // namespace wavebvs
