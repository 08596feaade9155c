#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "wavebvs/grid.hpp"

namespace wavebvs {

enum class TruthCase { CaseI, CaseII };
enum class CovariateKind { Xa, Xb, Xc };

/// Four-quadrant step intercept: 1, 4, 7, 10.
double truth_a(Location s) noexcept;

/// Case I: step slope 1/3/5/7 with the lower-half break at s1 = 0.47.
/// Case II: 4 sin(2 pi s1) cos(2 pi s2).
double truth_b(TruthCase c, Location s) noexcept;

/// x_a = 4 sin(4 pi (s1 + s2)), x_b uses 10 pi, x_c uses 15 pi.
double covariate_value(CovariateKind kind, Location s) noexcept;

inline Grid truth_a_grid(std::size_t side) { return Grid::from_function(side, truth_a); }
inline Grid truth_b_grid(TruthCase c, std::size_t side) {
  return Grid::from_function(side, [c](Location s) { return truth_b(c, s); });
}
inline Grid gen_covariate(CovariateKind kind, std::size_t side) {
  return Grid::from_function(side, [kind](Location s) { return covariate_value(kind, s); });
}
inline Grid gen_covariate(CovariateKind kind, const LatticeSpec& lattice) { return gen_covariate(kind, lattice.side()); }

struct SimulatedData {
  Grid y;
  std::uint64_t seed = 0;
  double sigma = 1.0;
};

/// y = A + x o B + eps with eps iid N(0, sigma^2), seeded.
SimulatedData simulate_data(const Grid& a, const Grid& b, const Grid& x, double sigma, std::uint64_t seed);

TruthCase parse_truth_case(std::string_view text);
CovariateKind parse_covariate_kind(std::string_view text);
std::string to_string(TruthCase c);
std::string to_string(CovariateKind k);

}  // namespace wavebvs
