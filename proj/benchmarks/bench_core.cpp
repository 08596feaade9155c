#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "wavebvs/experiment.hpp"
#include "wavebvs/gibbs.hpp"
#include "wavebvs/haar.hpp"
#include "wavebvs/prior.hpp"

namespace {

using namespace wavebvs;

Grid noise_grid(std::size_t side, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> z;
  std::vector<double> v(side * side);
  for (double& e : v) e = z(eng);
  return {side, std::move(v)};
}

void BM_ForwardDwt(benchmark::State& state) {
  const int J = static_cast<int>(state.range(0));
  const LatticeSpec l(J);
  const Grid g = noise_grid(l.side(), 1);
  for (auto _ : state) benchmark::DoNotOptimize(forward_dwt(g, J));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(l.size()));
}
BENCHMARK(BM_ForwardDwt)->DenseRange(1, 5);

void BM_BuildDesign(benchmark::State& state) {
  const LatticeSpec l(static_cast<int>(state.range(0)));
  const Grid x = gen_covariate(CovariateKind::Xc, l);
  for (auto _ : state) benchmark::DoNotOptimize(build_design(l, x, BasisScale::Function));
}
BENCHMARK(BM_BuildDesign)->DenseRange(1, 4);

// One Gibbs step (coordinate sweep plus variance draws); m = 2 * 4^(J+1).
void BM_GibbsStep(benchmark::State& state) {
  const int J = static_cast<int>(state.range(0));
  const Model model = state.range(1) == 1 ? Model::I : Model::II;
  const LatticeSpec l(J);
  const DesignMatrix X = build_design(l, gen_covariate(CovariateKind::Xa, l), BasisScale::Function);
  const SimulatedData d =
      simulate_data(truth_a_grid(l.side()), truth_b_grid(TruthCase::CaseI, l.side()), gen_covariate(CovariateKind::Xa, l), 1.0, 2);
  const Eigen::VectorXd y =
      Eigen::Map<const Eigen::VectorXd>(d.y.values().data(), static_cast<Eigen::Index>(d.y.size()));
  const GibbsSampler sampler(X, y, PriorSchedule::builtin(PriorKind::Prior1, 0.8), Hyperparams{6, 6, model});
  ChainState s = sampler.init_chain(1e-4, 3);
  for (auto _ : state) sampler.step(s);
  state.counters["m"] = static_cast<double>(X.cols());
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(X.cols()));
}
BENCHMARK(BM_GibbsStep)->ArgsProduct({{1, 2, 3, 4}, {1, 2}})->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
