#include "wavebvs/prior.hpp"

#include <cmath>

namespace wavebvs {

void Hyperparams::validate() const {
  if (!(std::isfinite(nu) && nu > 0.0)) throw PriorError("hyper.nu must be finite and positive");
  if (!(std::isfinite(mu) && mu > 0.0)) throw PriorError("hyper.mu must be finite and positive");
}

PriorSchedule PriorSchedule::builtin(PriorKind kind, double phi) {
  if (kind == PriorKind::Custom) throw PriorError("use PriorSchedule::custom for tabulated priors");
  if (!(phi > 0.0 && phi <= 1.0)) throw PriorError("prior.phi must lie in (0, 1], got " + std::to_string(phi));
  return {kind, phi};
}

PriorSchedule PriorSchedule::custom(std::vector<double> theta_a, std::vector<double> theta_b) {
  if (theta_a.size() != theta_b.size()) throw PriorError("custom prior tables must have equal length");
  for (const auto* table : {&theta_a, &theta_b}) {
    for (double t : *table) {
      if (!(t >= 0.0 && t <= 1.0)) throw PriorError("custom inclusion probability outside [0, 1]");
    }
  }
  PriorSchedule s(PriorKind::Custom, 1.0);
  s.theta_a_ = std::move(theta_a);
  s.theta_b_ = std::move(theta_b);
  return s;
}

double PriorSchedule::inclusion_prob(Block block, const WaveletIndex& idx, const WaveletBasis& basis) const {
  if (kind_ == PriorKind::Custom) {
    const auto& table = block == Block::A ? theta_a_ : theta_b_;
    if (table.size() != basis.size()) throw PriorError("custom prior table does not match basis size");
    return table[basis.flatten(idx)];
  }
  return inclusion_prob(block, idx);
}

double PriorSchedule::inclusion_prob(Block block, const WaveletIndex& idx) const {
  if (kind_ == PriorKind::Custom) {
    throw PriorError("custom schedules need the basis to locate a table entry");
  }
  if (idx.is_scaling()) return 0.5;
  const double j = static_cast<double>(idx.j);
  switch (kind_) {
    case PriorKind::Prior1:
      return 0.5 * std::pow(phi_, j);
    case PriorKind::Prior2:
      return block == Block::A ? 0.5 * std::pow(phi_, j) : 0.5;
    case PriorKind::Prior3:
      return block == Block::A ? 0.5 * std::pow(phi_, 8.0 * j) : 0.5;
    case PriorKind::Custom:
      break;
  }
  return 0.5;
}

double inclusion_prob(const PriorSchedule& sched, Block block, const WaveletIndex& idx) {
  return sched.inclusion_prob(block, idx);
}

double prior_odds_ratio(double theta) {
  if (!(theta > 0.0 && theta < 1.0)) {
    throw PriorError("inclusion probability " + std::to_string(theta) +
                     " is degenerate; prior odds need theta in (0, 1)");
  }
  return (1.0 - theta) / theta;
}

double prior_odds_ratio(const PriorSchedule& sched, Block block, const WaveletIndex& idx) {
  return prior_odds_ratio(inclusion_prob(sched, block, idx));
}

std::vector<double> log_prior_odds(const PriorSchedule& sched, const WaveletBasis& basis) {
  const std::size_t d = basis.size();
  std::vector<double> out(2 * d);
  for (std::size_t f = 0; f < d; ++f) {
    const WaveletIndex idx = basis.unflatten(f);
    out[f] = std::log(prior_odds_ratio(sched.inclusion_prob(Block::A, idx, basis)));
    out[d + f] = std::log(prior_odds_ratio(sched.inclusion_prob(Block::B, idx, basis)));
  }
  return out;
}

std::string to_string(PriorKind kind) {
  switch (kind) {
    case PriorKind::Prior1: return "prior1";
    case PriorKind::Prior2: return "prior2";
    case PriorKind::Prior3: return "prior3";
    case PriorKind::Custom: return "custom";
  }
  return "custom";
}

std::string to_string(Model model) { return model == Model::I ? "I" : "II"; }

PriorKind parse_prior_kind(std::string_view text) {
  if (text == "1" || text == "prior1") return PriorKind::Prior1;
  if (text == "2" || text == "prior2") return PriorKind::Prior2;
  if (text == "3" || text == "prior3") return PriorKind::Prior3;
  if (text == "custom") return PriorKind::Custom;
  throw PriorError("unknown prior kind '" + std::string(text) + "' (expected prior1|prior2|prior3)");
}

Model parse_model(std::string_view text) {
  if (text == "I" || text == "1" || text == "model1") return Model::I;
  if (text == "II" || text == "2" || text == "model2") return Model::II;
  throw PriorError("unknown model '" + std::string(text) + "' (expected I or II)");
}

}  // namespace wavebvs
