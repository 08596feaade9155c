#include "wavebvs/experiment.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "wavebvs/random.hpp"

namespace wavebvs {

double truth_a(Location s) noexcept {
  const bool right = s.s1 >= 0.5;
  const bool top = s.s2 >= 0.5;
  if (!top) return right ? 4.0 : 1.0;
  return right ? 10.0 : 7.0;
}

double truth_b(TruthCase c, Location s) noexcept {
  if (c == TruthCase::CaseII) {
    return 4.0 * std::sin(2.0 * std::numbers::pi * s.s1) * std::cos(2.0 * std::numbers::pi * s.s2);
  }
  // The lower half breaks at 0.47, not 0.5; kept verbatim and never snapped.
  if (s.s2 < 0.5) return s.s1 < 0.47 ? 1.0 : 3.0;
  return s.s1 < 0.5 ? 5.0 : 7.0;
}

double covariate_value(CovariateKind kind, Location s) noexcept {
  double freq = 4.0;
  if (kind == CovariateKind::Xb) freq = 10.0;
  if (kind == CovariateKind::Xc) freq = 15.0;
  return 4.0 * std::sin(freq * std::numbers::pi * (s.s1 + s.s2));
}

SimulatedData simulate_data(const Grid& a, const Grid& b, const Grid& x, double sigma, std::uint64_t seed) {
  require_same_shape(a, b, "simulate_data");
  require_same_shape(a, x, "simulate_data");
  if (!(sigma > 0.0)) throw std::invalid_argument("simulation noise sd must be positive");
  Rng rng(seed);
  std::vector<double> y(a.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = a[i] + x[i] * b[i] + sigma * rng.normal();
  return {Grid(a.side(), std::move(y)), seed, sigma};
}

TruthCase parse_truth_case(std::string_view text) {
  if (text == "case1" || text == "I" || text == "1") return TruthCase::CaseI;
  if (text == "case2" || text == "II" || text == "2") return TruthCase::CaseII;
  throw std::invalid_argument("unknown truth case '" + std::string(text) + "' (expected case1|case2)");
}

CovariateKind parse_covariate_kind(std::string_view text) {
  if (text == "xa") return CovariateKind::Xa;
  if (text == "xb") return CovariateKind::Xb;
  if (text == "xc") return CovariateKind::Xc;
  throw std::invalid_argument("unknown covariate '" + std::string(text) + "' (expected xa|xb|xc)");
}

std::string to_string(TruthCase c) { return c == TruthCase::CaseI ? "case1" : "case2"; }

std::string to_string(CovariateKind k) {
  switch (k) {
    case CovariateKind::Xa: return "xa";
    case CovariateKind::Xb: return "xb";
    case CovariateKind::Xc: return "xc";
  }
  return "xa";
}

}  // namespace wavebvs
