#include "wavebvs/grid.hpp"

#include <bit>
#include <cmath>
#include <numeric>

namespace wavebvs {

LatticeSpec::LatticeSpec(int level) : level_(level) {
  if (level < 0 || level > 12) {
    throw GridError("lattice level must lie in [0, 12], got " + std::to_string(level));
  }
  side_ = std::size_t{1} << (level + 2);
}

std::optional<LatticeSpec> LatticeSpec::from_side(std::size_t side) {
  if (side < 4 || !std::has_single_bit(side)) return std::nullopt;
  return LatticeSpec(std::countr_zero(side) - 2);
}

Location LatticeSpec::location(std::size_t i) const noexcept { return Grid::location_on(side_, i); }

Grid::Grid(std::size_t side, std::vector<double> values) : side_(side), values_(std::move(values)) {
  if (values_.size() != side_ * side_) {
    throw GridError("grid of side " + std::to_string(side_) + " needs " + std::to_string(side_ * side_) +
                    " values, got " + std::to_string(values_.size()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw GridError("non-finite grid value at row " + std::to_string(i / side_) + ", column " +
                      std::to_string(i % side_));
    }
  }
}

Grid::Grid(const LatticeSpec& spec, std::vector<double> values) : Grid(spec.side(), std::move(values)) {}

void require_same_shape(const Grid& a, const Grid& b, std::string_view what) {
  if (a.side() != b.side()) {
    throw GridError(std::string(what) + ": grid sides differ (" + std::to_string(a.side()) + " vs " +
                    std::to_string(b.side()) + ")");
  }
}

StandardizedGrid standardize(const Grid& g) {
  const auto v = g.values();
  if (v.size() < 2) throw GridError("standardize: need at least two values");
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  if (!(sd > 0.0)) throw GridError("standardize: zero-variance grid");
  return {standardize_with(g, mean, sd), mean, sd};
}

Grid standardize_with(const Grid& g, double mean, double sd) {
  if (!(sd > 0.0)) throw GridError("standardize: scale must be positive");
  std::vector<double> out(g.values().begin(), g.values().end());
  for (double& x : out) x = (x - mean) / sd;
  return Grid(g.side(), std::move(out));
}

}  // namespace wavebvs
