#include "wavebvs/random.hpp"

#include <stdexcept>

namespace wavebvs {
namespace {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

double Rng::gamma(double shape) {
  if (!(shape > 0.0)) throw std::domain_error("gamma shape must be positive");
  return std::gamma_distribution<double>(shape, 1.0)(engine_);
}

double Rng::chi_square(double df) {
  if (!(df > 0.0)) throw std::domain_error("chi-square df must be positive");
  return std::chi_squared_distribution<double>(df)(engine_);
}

double draw_inverse_gamma(Rng& rng, double shape, double scale) {
  if (!(scale > 0.0)) throw std::domain_error("inverse-gamma scale must be positive");
  return scale / rng.gamma(shape);
}

double draw_inv_chi_square(Rng& rng, double df) { return 1.0 / rng.chi_square(df); }

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept {
  return splitmix64(master ^ splitmix64(stream));
}

}  // namespace wavebvs
