#include "wavebvs/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "text_util.hpp"

namespace wavebvs {
namespace {

using detail::format_double;
using detail::trim;

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
  throw ConfigError("invalid value '" + std::string(value) + "' for " + std::string(key) + " (expected " +
                    std::string(expected) + ")");
}

double to_double(std::string_view key, std::string_view value) {
  const auto v = detail::parse_double(value);
  if (!v) bad_value(key, value, "a number");
  return *v;
}

template <class T>
T to_unsigned(std::string_view key, std::string_view value) {
  value = trim(value);
  T v{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (value.empty() || ec != std::errc() || ptr != value.data() + value.size()) {
    bad_value(key, value, "a non-negative integer");
  }
  return v;
}

bool to_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "on" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "off" || value == "no") return false;
  bad_value(key, value, "true|false");
}

std::string one_of(std::string_view key, std::string_view value, std::initializer_list<std::string_view> allowed) {
  std::string list;
  for (auto a : allowed) {
    if (value == a) return std::string(value);
    list += list.empty() ? std::string(a) : "|" + std::string(a);
  }
  bad_value(key, value, list);
}

std::string prior_name(PriorKind k) {
  switch (k) {
    case PriorKind::Prior1: return "1";
    case PriorKind::Prior2: return "2";
    case PriorKind::Prior3: return "3";
    case PriorKind::Custom: break;
  }
  return "custom";
}

std::string optional_double(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

}  // namespace

void ExperimentConfig::validate() const {
  if (level < 0 || level > 8) throw ConfigError("J must be in [0, 8], got " + std::to_string(level));
  if (!(phi > 0.0 && phi <= 1.0)) throw ConfigError("prior.phi must be in (0, 1]");
  if (!(nu > 0.0) || !(mu > 0.0)) throw ConfigError("hyper.nu and hyper.mu must be positive");
  if (sweeps == 0 || thin == 0 || chains == 0 || replications == 0 || eval_side == 0) {
    throw ConfigError("sweeps, thin, chains, replications and eval.side must be positive");
  }
  if (burn_in >= sweeps) throw ConfigError("burn_in must be smaller than sweeps");
  if (!(init_sigma2 >= 0.0)) throw ConfigError("init.sigma2 must be non-negative");
  if (!(sigma > 0.0)) throw ConfigError("sigma must be positive");
  if (covariate == "file" && covariate_file.empty()) throw ConfigError("covariate = file needs covariate.file");
  if (truth == "files" && (truth_a_file.empty() || truth_b_file.empty())) {
    throw ConfigError("truth = files needs truth.a_file and truth.b_file");
  }
  if (uses_response_file() && truth != "none") {
    throw ConfigError("response.file is real-data mode; set truth = none");
  }
  if (!uses_response_file() && truth == "none") {
    throw ConfigError("truth = none needs response.file");
  }
  if (has_truth() && (standardize_x == "on" || standardize_y == "own" || standardize_y == "covariate")) {
    throw ConfigError("standardization is only supported for response.file input");
  }
  if (delta && !(*delta > 0.0)) throw ConfigError("delta must be positive");
  if (delta_max_abs_frac && !(*delta_max_abs_frac > 0.0)) throw ConfigError("delta.max_abs_frac must be positive");
}

ExperimentConfig ExperimentConfig::effective() const {
  ExperimentConfig c = *this;
  if (paper_scale) {
    c.replications = 50;
    c.sweeps = 5000;
    c.burn_in = 2500;
  }
  return c;
}

void apply_setting(ExperimentConfig& c, std::string_view key, std::string_view raw) {
  const std::string_view value = trim(raw);
  if (key == "J") {
    c.level = static_cast<int>(to_unsigned<unsigned>(key, value));
  } else if (key == "model") {
    try {
      c.model = parse_model(value);
    } catch (const std::exception&) {
      bad_value(key, value, "I|II");
    }
  } else if (key == "prior.kind") {
    try {
      c.prior_kind = parse_prior_kind(value);
    } catch (const std::exception&) {
      bad_value(key, value, "1|2|3");
    }
    if (c.prior_kind == PriorKind::Custom) bad_value(key, value, "1|2|3");
  } else if (key == "prior.phi") {
    c.phi = to_double(key, value);
  } else if (key == "hyper.nu") {
    c.nu = to_double(key, value);
  } else if (key == "hyper.mu") {
    c.mu = to_double(key, value);
  } else if (key == "sweeps") {
    c.sweeps = to_unsigned<std::size_t>(key, value);
  } else if (key == "burn_in") {
    c.burn_in = to_unsigned<std::size_t>(key, value);
  } else if (key == "thin") {
    c.thin = to_unsigned<std::size_t>(key, value);
  } else if (key == "chains") {
    c.chains = to_unsigned<std::size_t>(key, value);
  } else if (key == "init.sigma2") {
    c.init_sigma2 = to_double(key, value);
  } else if (key == "scan") {
    c.scan = one_of(key, value, {"fixed", "random"}) == "fixed" ? ScanOrder::Fixed : ScanOrder::Random;
  } else if (key == "basis.scale") {
    c.basis_scale = one_of(key, value, {"function", "unit"}) == "unit" ? BasisScale::Unit : BasisScale::Function;
  } else if (key == "replications") {
    c.replications = to_unsigned<std::size_t>(key, value);
  } else if (key == "sigma") {
    c.sigma = to_double(key, value);
  } else if (key == "covariate") {
    c.covariate = one_of(key, value, {"xa", "xb", "xc", "file"});
  } else if (key == "covariate.file") {
    c.covariate_file = value;
  } else if (key == "truth") {
    c.truth = one_of(key, value, {"case1", "case2", "files", "none"});
  } else if (key == "truth.a_file") {
    c.truth_a_file = value;
  } else if (key == "truth.b_file") {
    c.truth_b_file = value;
  } else if (key == "response.file") {
    c.response_file = value;
  } else if (key == "standardize.x") {
    c.standardize_x = one_of(key, value, {"auto", "on", "off"});
  } else if (key == "standardize.y") {
    c.standardize_y = one_of(key, value, {"auto", "own", "covariate", "off"});
  } else if (key == "seed") {
    c.seed = to_unsigned<std::uint64_t>(key, value);
  } else if (key == "out") {
    c.out = value;
  } else if (key == "delta") {
    c.delta = value.empty() ? std::nullopt : std::optional<double>(to_double(key, value));
  } else if (key == "delta.max_abs_frac") {
    c.delta_max_abs_frac = value.empty() ? std::nullopt : std::optional<double>(to_double(key, value));
  } else if (key == "eval.side") {
    c.eval_side = to_unsigned<std::size_t>(key, value);
  } else if (key == "metrics.response_grid") {
    c.response_grid = one_of(key, value, {"training", "eval"});
  } else if (key == "paper_scale") {
    c.paper_scale = to_bool(key, value);
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

void apply_override(ExperimentConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("override '" + std::string(assignment) + "' is not key=value");
  }
  apply_setting(cfg, trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

ExperimentConfig parse_config(std::string_view text, std::string_view source) {
  ExperimentConfig cfg;
  std::size_t line_no = 0;
  for (std::string_view line : detail::split(text, '\n')) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') continue;  // section headers carry no meaning
    try {
      apply_override(cfg, line);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(source) + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

std::string serialize_config(const ExperimentConfig& c) {
  const auto line = [](std::string_view k, const std::string& v) { return std::string(k) + " = " + v + '\n'; };
  std::string out;
  out += line("J", std::to_string(c.level));
  out += line("model", to_string(c.model));
  out += line("prior.kind", prior_name(c.prior_kind));
  out += line("prior.phi", format_double(c.phi));
  out += line("hyper.nu", format_double(c.nu));
  out += line("hyper.mu", format_double(c.mu));
  out += line("sweeps", std::to_string(c.sweeps));
  out += line("burn_in", std::to_string(c.burn_in));
  out += line("thin", std::to_string(c.thin));
  out += line("chains", std::to_string(c.chains));
  out += line("init.sigma2", format_double(c.init_sigma2));
  out += line("scan", c.scan == ScanOrder::Fixed ? "fixed" : "random");
  out += line("basis.scale", c.basis_scale == BasisScale::Unit ? "unit" : "function");
  out += line("replications", std::to_string(c.replications));
  out += line("sigma", format_double(c.sigma));
  out += line("covariate", c.covariate);
  out += line("covariate.file", c.covariate_file);
  out += line("truth", c.truth);
  out += line("truth.a_file", c.truth_a_file);
  out += line("truth.b_file", c.truth_b_file);
  out += line("response.file", c.response_file);
  out += line("standardize.x", c.standardize_x);
  out += line("standardize.y", c.standardize_y);
  out += line("seed", std::to_string(c.seed));
  out += line("out", c.out);
  out += line("delta", optional_double(c.delta));
  out += line("delta.max_abs_frac", optional_double(c.delta_max_abs_frac));
  out += line("eval.side", std::to_string(c.eval_side));
  out += line("metrics.response_grid", c.response_grid);
  out += line("paper_scale", c.paper_scale ? "true" : "false");
  return out;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  const std::string text = serialize_config(ExperimentConfig{});
  for (std::string_view line : detail::split(text, '\n')) {
    if (!line.empty()) keys.emplace_back(trim(line.substr(0, line.find('='))));
  }
  return keys;
}

}  // namespace wavebvs
