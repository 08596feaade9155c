#include "wavebvs/pipeline.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "text_util.hpp"
#include "wavebvs/experiment.hpp"
#include "wavebvs/haar.hpp"

namespace wavebvs {
namespace {

using detail::format_double;

constexpr double kRhatWarn = 1.1;

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << text;
}

Grid load_on_lattice(const std::string& path, const LatticeSpec& lattice, std::string_view what) {
  Grid g = load_grid(path);
  if (g.side() != lattice.side()) {
    throw ConfigError(std::string(what) + " '" + path + "' is " + std::to_string(g.side()) + "x" +
                      std::to_string(g.side()) + " but the lattice is " + std::to_string(lattice.side()) + "x" +
                      std::to_string(lattice.side()));
  }
  return g;
}

Grid covariate_on(const ExperimentConfig& cfg, const LatticeSpec& lattice) {
  if (cfg.covariate == "file") return load_on_lattice(cfg.covariate_file, lattice, "covariate.file");
  return gen_covariate(parse_covariate_kind(cfg.covariate), lattice);
}

bool standardize_x(const ExperimentConfig& cfg) {
  return cfg.standardize_x == "on" || (cfg.standardize_x == "auto" && cfg.uses_response_file());
}

std::string standardize_y_mode(const ExperimentConfig& cfg) {
  if (cfg.standardize_y == "auto") return cfg.uses_response_file() ? "own" : "off";
  return cfg.standardize_y;
}

std::size_t eval_side_for(const ExperimentConfig& cfg, const ProblemData& data) {
  return cfg.truth == "files" ? data.lattice.side() : cfg.eval_side;
}

std::vector<double> log_posterior_trace(const ChainOutput& c) { return c.log_posterior; }
std::vector<double> sigma2_trace(const ChainOutput& c) { return c.sigma2_draws; }
std::vector<double> tau2_trace(const ChainOutput& c) { return c.tau2_draws; }

SurfaceEstimate training_estimate(const PosteriorSummary& s, const LatticeSpec& lattice, BasisScale scale) {
  const double norm = basis_norm(lattice, scale);
  return {synthesize(s.a_mean, lattice.side(), norm), synthesize(s.b_mean, lattice.side(), norm)};
}

// MSE_y on the observation lattice, where y was drawn, unless the
// evaluation grid is requested.
bool response_on_training(const ExperimentConfig& cfg) { return cfg.response_grid == "training"; }

FitResult fit_prepared(const ExperimentConfig& c, ProblemData data, std::size_t workers) {
  FitResult r;
  const DesignMatrix X = build_design(data.lattice, data.x, c.basis_scale);
  Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(data.y.values().data(),
                                                        static_cast<Eigen::Index>(data.y.size()));
  SamplerOptions opts;
  opts.scan = c.scan;
  const GibbsSampler sampler(X, std::move(y), c.prior(), c.hyperparams(), opts);
  RunSettings settings = c.run_settings();
  // tau^2 starts at the unit-column prior mean, expressed on the design's scale.
  const double ratio = lattice_norm(data.lattice) / basis_norm(data.lattice, c.basis_scale);
  settings.init_tau2_scale = ratio * ratio;
  r.chains = run_chains(sampler, settings, derive_seed(c.seed, kChainStream), c.chains, workers);
  r.summary = summarize(std::span<const ChainOutput>(r.chains), SummaryContext{data.lattice, data.x, eval_side_for(c, data), c.basis_scale});

  if (r.chains.size() >= 2) {
    const std::pair<const char*, std::vector<double> (*)(const ChainOutput&)> monitored[] = {
        {"sigma2", sigma2_trace}, {"tau2", tau2_trace}, {"log_posterior", log_posterior_trace}};
    for (const auto& [name, trace] : monitored) {
      std::vector<std::vector<double>> traces;
      for (const auto& chain : r.chains) traces.push_back(trace(chain));
      const GelmanRubin g = gelman_rubin(traces);
      if (g.degenerate) {
        r.warnings.push_back(std::string(name) + ": chains are constant, R-hat undefined");
      } else if (g.rhat >= kRhatWarn) {
        r.warnings.push_back(std::string(name) + ": R-hat " + format_double(g.rhat) + " >= 1.1");
      }
      r.rhat.push_back({name, g});
    }
  }
  if (sampler.ridge_fallback()) r.warnings.push_back("X'X is singular; least-squares start used a 1e-8 ridge");
  for (std::size_t i = 0; i < r.chains.size(); ++i) {
    if (r.chains[i].meta.tau_clamps > 0) {
      r.warnings.push_back("chain " + std::to_string(i) + ": tau^2 clamped " +
                           std::to_string(r.chains[i].meta.tau_clamps) + " times");
    }
  }

  if (c.delta) {
    r.delta = c.delta;
  } else if (c.delta_max_abs_frac) {
    r.delta = delta_from_max_abs(r.summary.b_hat, *c.delta_max_abs_frac);
  }
  if (r.delta) r.classmap = classify(r.summary, *r.delta);

  if (const auto truth = eval_truth(c, data)) {
    const SurfaceEstimate est{r.summary.a_hat, r.summary.b_hat};
    r.metrics = sim_metrics(truth->a, truth->b, truth->x, std::span<const SurfaceEstimate>(&est, 1));
    if (response_on_training(c)) {
      const SurfaceEstimate train = training_estimate(r.summary, data.lattice, c.basis_scale);
      r.metrics->mse_y = response_mse(*data.truth_a, *data.truth_b, data.x, std::span<const SurfaceEstimate>(&train, 1));
    }
  }
  r.data = std::move(data);
  return r;
}

std::string coefficients_csv(const PosteriorSummary& s) {
  const WaveletBasis basis(s.a_mean.level());
  const std::size_t d = basis.size();
  std::string out = "block,flat,kind,r,j,k1,k2,mean,gamma_freq\n";
  for (int b = 0; b < 2; ++b) {
    const CoeffVector& mean = b == 0 ? s.a_mean : s.b_mean;
    for (std::size_t k = 0; k < d; ++k) {
      const WaveletIndex idx = basis.unflatten(k);
      // Scaling rows leave the detail fields empty.
      const std::string fields =
          idx.is_scaling() ? std::string("scaling,,,,")
                           : "detail," + std::to_string(static_cast<int>(idx.r)) + ',' + std::to_string(idx.j) +
                                 ',' + std::to_string(idx.k1) + ',' + std::to_string(idx.k2);
      out += (b == 0 ? "A," : "B,") + std::to_string(k) + ',' + fields + ',' + format_double(mean[k]) + ',' +
             format_double(s.gamma_freq[b * d + k]) + '\n';
    }
  }
  return out;
}

template <class F>
void parallel_for(std::size_t count, std::size_t workers, F&& body) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
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
}

}  // namespace

std::size_t worker_count() {
  if (const char* env = std::getenv("WAVEBVS_WORKERS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

Grid resample_nearest(const Grid& g, std::size_t side) {
  if (g.side() == 0 || side == 0) throw GridError("resample_nearest: empty grid");
  std::vector<double> v(side * side);
  for (std::size_t r = 0; r < side; ++r) {
    const std::size_t sr = r * g.side() / side;
    for (std::size_t c = 0; c < side; ++c) v[r * side + c] = g.at(sr, c * g.side() / side);
  }
  return Grid(side, std::move(v));
}

ProblemData prepare_data(const ExperimentConfig& cfg, std::uint64_t data_seed) {
  cfg.validate();
  ProblemData data;
  if (cfg.uses_response_file()) {
    Grid y = load_grid(cfg.response_file);
    const auto lattice = y.lattice();
    if (!lattice) throw ConfigError("response.file side " + std::to_string(y.side()) + " is not 2^(J+2)");
    if (lattice->level() != cfg.level) {
      throw ConfigError("response.file is a level-" + std::to_string(lattice->level()) + " lattice but J = " +
                        std::to_string(cfg.level));
    }
    data.lattice = *lattice;
    Grid x = covariate_on(cfg, data.lattice);
    std::optional<StandardizedGrid> sx;
    if (standardize_x(cfg) || standardize_y_mode(cfg) == "covariate") sx = standardize(x);
    if (standardize_x(cfg)) {
      data.x_scaling = std::pair{sx->mean, sx->sd};
      x = sx->grid;
    }
    const std::string ymode = standardize_y_mode(cfg);
    if (ymode == "own") {
      StandardizedGrid sy = standardize(y);
      data.y_scaling = std::pair{sy.mean, sy.sd};
      y = std::move(sy.grid);
    } else if (ymode == "covariate") {
      data.y_scaling = std::pair{sx->mean, sx->sd};
      y = standardize_with(y, sx->mean, sx->sd);
    }
    data.y = std::move(y);
    data.x = std::move(x);
    return data;
  }

  data.lattice = LatticeSpec(cfg.level);
  data.x = covariate_on(cfg, data.lattice);
  if (cfg.truth == "files") {
    data.truth_a = load_on_lattice(cfg.truth_a_file, data.lattice, "truth.a_file");
    data.truth_b = load_on_lattice(cfg.truth_b_file, data.lattice, "truth.b_file");
  } else {
    data.truth_a = truth_a_grid(data.lattice.side());
    data.truth_b = truth_b_grid(parse_truth_case(cfg.truth), data.lattice.side());
  }
  data.y = simulate_data(*data.truth_a, *data.truth_b, data.x, cfg.sigma, data_seed).y;
  return data;
}

std::optional<EvalTruth> eval_truth(const ExperimentConfig& cfg, const ProblemData& data) {
  if (!cfg.has_truth()) return std::nullopt;
  if (cfg.truth == "files") return EvalTruth{*data.truth_a, *data.truth_b, data.x};
  const std::size_t side = cfg.eval_side;
  const TruthCase tc = parse_truth_case(cfg.truth);
  Grid x = cfg.covariate == "file" ? resample_nearest(data.x, side)
                                   : gen_covariate(parse_covariate_kind(cfg.covariate), side);
  return EvalTruth{truth_a_grid(side), truth_b_grid(tc, side), std::move(x)};
}

FitResult fit_experiment(const ExperimentConfig& cfg, std::size_t workers) {
  const ExperimentConfig c = cfg.effective();
  c.validate();
  return fit_prepared(c, prepare_data(c, derive_seed(c.seed, kDataStream)), workers);
}

std::string format_diagnostics(const FitResult& r) {
  std::string out;
  out += "chains = " + std::to_string(r.chains.size()) + '\n';
  out += "kept_per_chain = " + std::to_string(r.chains.empty() ? 0 : r.chains.front().kept()) + '\n';
  if (r.rhat.empty()) {
    out += "rhat = unavailable (needs at least 2 chains)\n";
  }
  for (const auto& m : r.rhat) {
    out += "rhat." + m.name + " = ";
    if (m.value.degenerate) {
      out += "undefined (constant chains)\n";
    } else {
      out += format_double(m.value.rhat) + (m.value.rhat >= kRhatWarn ? " warning\n" : " ok\n");
    }
  }
  for (std::size_t i = 0; i < r.chains.size(); ++i) {
    const auto& meta = r.chains[i].meta;
    out += "chain." + std::to_string(i) + ".seed = " + std::to_string(meta.seed) + '\n';
    out += "chain." + std::to_string(i) + ".tau_clamps = " + std::to_string(meta.tau_clamps) + '\n';
  }
  for (const auto& w : r.warnings) out += "warning = " + w + '\n';
  return out;
}

std::string format_summary_json(const FitResult& r, const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  j["J"] = r.data.lattice.level();
  j["n"] = r.data.lattice.size();
  j["m"] = 2 * basis_size(r.data.lattice.level());
  j["model"] = to_string(cfg.model);
  j["prior"] = {{"kind", to_string(cfg.prior_kind)}, {"phi", cfg.phi}};
  j["hyper"] = {{"nu", cfg.nu}, {"mu", cfg.mu}};
  j["seed"] = cfg.seed;
  j["chains"] = r.chains.size();
  j["kept_draws"] = r.summary.draws;

  double s2 = 0.0;
  double t2 = 0.0;
  std::size_t count = 0;
  for (const auto& c : r.chains) {
    for (std::size_t t = 0; t < c.sigma2_draws.size(); ++t) {
      s2 += c.sigma2_draws[t];
      t2 += c.tau2_draws[t];
      ++count;
    }
  }
  j["posterior_mean"] = {{"sigma2", s2 / static_cast<double>(count)}, {"tau2", t2 / static_cast<double>(count)}};
  const std::size_t d = basis_size(r.data.lattice.level());
  std::size_t incl_a = 0;
  std::size_t incl_b = 0;
  for (std::size_t k = 0; k < d; ++k) {
    incl_a += r.summary.gamma_freq[k] > 0.5;
    incl_b += r.summary.gamma_freq[d + k] > 0.5;
  }
  j["median_model_size"] = {{"A", incl_a}, {"B", incl_b}};

  auto rhat = nlohmann::ordered_json::object();
  for (const auto& m : r.rhat) {
    rhat[m.name] = m.value.degenerate ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(m.value.rhat);
  }
  j["rhat"] = rhat;
  if (r.data.y_scaling) j["y_scaling"] = {{"mean", r.data.y_scaling->first}, {"sd", r.data.y_scaling->second}};
  if (r.data.x_scaling) j["x_scaling"] = {{"mean", r.data.x_scaling->first}, {"sd", r.data.x_scaling->second}};

  if (r.classmap) {
    std::array<std::array<std::size_t, 3>, 4> counts{};
    for (std::size_t i = 0; i < r.classmap->category.size(); ++i) {
      ++counts[static_cast<std::size_t>(r.classmap->category[i])][static_cast<std::size_t>(r.classmap->evidence[i])];
    }
    auto cls = nlohmann::ordered_json::object();
    cls["delta"] = *r.delta;
    for (std::size_t c = 0; c < 4; ++c) {
      auto row = nlohmann::ordered_json::object();
      for (std::size_t e = 0; e < 3; ++e) row[to_string(static_cast<Evidence>(e))] = counts[c][e];
      cls[to_string(static_cast<Category>(c))] = row;
    }
    j["classification"] = cls;
  }
  if (r.metrics) {
    const SimMetrics& m = *r.metrics;
    j["metrics"] = {{"bias2_a", m.bias2_a}, {"bias2_b", m.bias2_b}, {"var_a", m.var_a}, {"var_b", m.var_b},
                    {"mse_a", m.mse_a},     {"mse_b", m.mse_b},     {"mse_y", m.mse_y}};
  }
  j["warnings"] = r.warnings;
  return j.dump(2) + '\n';
}

void write_fit_outputs(const FitResult& r, const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  save_grid_csv(r.summary.a_hat, dir / "A_hat.csv");
  save_grid_csv(r.summary.b_hat, dir / "B_hat.csv");
  save_grid_csv(r.summary.psd_b, dir / "psd_B.csv");
  save_grid_csv(r.summary.y_hat, dir / "y_hat.csv");
  write_text(dir / "coefficients.csv", coefficients_csv(r.summary));
  if (r.classmap) {
    write_classmap_csv(*r.classmap, r.summary.b_hat, r.summary.psd_b, dir / "classmap.csv");
    write_classmap_ppm(*r.classmap, dir / "classmap.ppm");
  }
  if (r.metrics) write_text(dir / "metrics.csv", metrics_csv_header() + '\n' + metrics_csv_row(*r.metrics) + '\n');
  write_text(dir / "diagnostics.txt", format_diagnostics(r));
  write_text(dir / "summary.json", format_summary_json(r, cfg));
  write_text(dir / "config.txt", serialize_config(cfg));
  for (std::size_t i = 0; i < r.chains.size(); ++i) {
    write_chain_output(r.chains[i], dir / "chains" / ("chain_" + std::to_string(i)));
  }
}

FitResult cmd_fit(const ExperimentConfig& cfg) {
  if (!cfg.delta && !cfg.delta_max_abs_frac) {
    throw ConfigError("fit needs a classification threshold: set delta or delta.max_abs_frac");
  }
  FitResult r = fit_experiment(cfg, worker_count());
  write_fit_outputs(r, cfg.effective(), cfg.out);
  return r;
}

ReplicateResult replicate_experiment(const ExperimentConfig& cfg, std::size_t workers, const EstimateHook& hook) {
  const ExperimentConfig c = cfg.effective();
  c.validate();
  if (!c.has_truth()) throw ConfigError("replicate needs a known truth");

  const std::size_t L = c.replications;
  ReplicateResult out;
  std::vector<SurfaceEstimate> estimates(L);
  std::vector<SurfaceEstimate> train_estimates(L);
  std::vector<std::vector<std::string>> warnings(L);
  std::optional<EvalTruth> truth;
  out.seeds.resize(L);
  for (std::size_t l = 0; l < L; ++l) out.seeds[l] = derive_seed(c.seed, l);

  parallel_for(L, workers, [&](std::size_t l) {
    ExperimentConfig sub = c;
    sub.seed = out.seeds[l];
    ProblemData data = prepare_data(sub, derive_seed(sub.seed, kDataStream));
    const EvalTruth t = *eval_truth(sub, data);
    if (hook) {
      if (auto forced = hook(l, t, data)) {
        estimates[l] = std::move(forced->eval);
        train_estimates[l] = std::move(forced->training);
        return;
      }
    }
    const LatticeSpec lattice = data.lattice;
    FitResult r = fit_prepared(sub, std::move(data), 1);
    train_estimates[l] = training_estimate(r.summary, lattice, sub.basis_scale);
    estimates[l] = SurfaceEstimate{std::move(r.summary.a_hat), std::move(r.summary.b_hat)};
    warnings[l] = std::move(r.warnings);
  });

  // The evaluation truth depends on the configuration only, not the seed.
  const ProblemData data = prepare_data(c, derive_seed(out.seeds.front(), kDataStream));
  truth = eval_truth(c, data);
  out.metrics = sim_metrics(truth->a, truth->b, truth->x, estimates);
  if (response_on_training(c)) {
    out.metrics.mse_y = response_mse(*data.truth_a, *data.truth_b, data.x, train_estimates);
  }
  for (std::size_t l = 0; l < L; ++l) {
    for (auto& w : warnings[l]) out.warnings.push_back("replication " + std::to_string(l) + ": " + w);
  }
  return out;
}

ReplicateResult cmd_replicate(const ExperimentConfig& cfg, const EstimateHook& hook) {
  ReplicateResult r = replicate_experiment(cfg, worker_count(), hook);
  const std::filesystem::path dir = cfg.out;
  std::filesystem::create_directories(dir);
  write_text(dir / "metrics.csv", metrics_csv_header() + '\n' + metrics_csv_row(r.metrics) + '\n');
  std::string info = "replications = " + std::to_string(r.seeds.size()) + '\n';
  for (std::size_t l = 0; l < r.seeds.size(); ++l) {
    info += "seed." + std::to_string(l) + " = " + std::to_string(r.seeds[l]) + '\n';
  }
  for (const auto& w : r.warnings) info += "warning = " + w + '\n';
  write_text(dir / "replicate.txt", info);
  write_text(dir / "config.txt", serialize_config(cfg.effective()));
  return r;
}

void cmd_simulate(const ExperimentConfig& cfg) {
  const ExperimentConfig c = cfg.effective();
  c.validate();
  if (!c.has_truth()) throw ConfigError("simulate needs a truth (case1, case2 or files)");
  const std::uint64_t data_seed = derive_seed(c.seed, kDataStream);
  const ProblemData data = prepare_data(c, data_seed);
  const std::filesystem::path dir = c.out;
  std::filesystem::create_directories(dir);
  save_grid_csv(data.y, dir / "y.csv");
  save_grid_csv(data.x, dir / "x.csv");
  save_grid_csv(*data.truth_a, dir / "A.csv");
  save_grid_csv(*data.truth_b, dir / "B.csv");
  std::string prov;
  prov += "J = " + std::to_string(c.level) + '\n';
  prov += "truth = " + c.truth + '\n';
  prov += "covariate = " + c.covariate + '\n';
  prov += "sigma = " + format_double(c.sigma) + '\n';
  prov += "seed = " + std::to_string(c.seed) + '\n';
  prov += "data_seed = " + std::to_string(data_seed) + '\n';
  write_text(dir / "provenance.txt", prov);
}

}  // namespace wavebvs
