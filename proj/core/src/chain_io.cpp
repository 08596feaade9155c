#include <fstream>
#include <map>
#include <sstream>

#include "text_util.hpp"
#include "wavebvs/gibbs.hpp"

namespace wavebvs {
namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw SamplerError("cannot open '" + path.string() + "' for writing");
  return out;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SamplerError("cannot open '" + path.string() + "' for reading");
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!detail::trim(line).empty()) lines.push_back(line);
  }
  return lines;
}

std::vector<double> parse_row(std::string_view line, const std::filesystem::path& path, std::size_t lineno) {
  std::vector<double> row;
  for (const auto cell : detail::split(line, ',')) {
    const auto v = detail::parse_double(cell);
    if (!v) throw SamplerError(path.string() + ": non-numeric cell on line " + std::to_string(lineno + 1));
    row.push_back(*v);
  }
  return row;
}

}  // namespace

void write_chain_output(const ChainOutput& out, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    auto f = open_out(dir / "beta.csv");
    for (Eigen::Index t = 0; t < out.beta_draws.rows(); ++t) {
      for (Eigen::Index j = 0; j < out.beta_draws.cols(); ++j) {
        if (j) f << ',';
        f << detail::format_double(out.beta_draws(t, j));
      }
      f << '\n';
    }
  }
  {
    auto f = open_out(dir / "scalars.csv");
    f << "sigma2,tau2,log_posterior\n";
    for (std::size_t t = 0; t < out.sigma2_draws.size(); ++t) {
      f << detail::format_double(out.sigma2_draws[t]) << ',' << detail::format_double(out.tau2_draws[t]) << ','
        << detail::format_double(out.log_posterior[t]) << '\n';
    }
  }
  {
    auto f = open_out(dir / "gamma_freq.csv");
    for (double g : out.gamma_freq) f << detail::format_double(g) << '\n';
  }
  {
    auto f = open_out(dir / "meta.txt");
    const auto& m = out.meta;
    f << "seed = " << m.seed << '\n'
      << "model = " << to_string(m.model) << '\n'
      << "sweeps = " << m.sweeps << '\n'
      << "burn_in = " << m.burn_in << '\n'
      << "thin = " << m.thin << '\n'
      << "kept = " << out.kept() << '\n'
      << "wall_seconds = " << detail::format_double(m.wall_seconds) << '\n'
      << "ridge_fallback = " << (m.ridge_fallback ? "true" : "false") << '\n'
      << "tau_clamps = " << m.tau_clamps << '\n';
  }
}

ChainOutput read_chain_output(const std::filesystem::path& dir) {
  ChainOutput out;
  const auto beta_path = dir / "beta.csv";
  const auto beta_lines = read_lines(beta_path);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < beta_lines.size(); ++i) rows.push_back(parse_row(beta_lines[i], beta_path, i));
  const Eigen::Index m = rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size());
  out.beta_draws.resize(static_cast<Eigen::Index>(rows.size()), m);
  for (std::size_t t = 0; t < rows.size(); ++t) {
    if (static_cast<Eigen::Index>(rows[t].size()) != m) throw SamplerError(beta_path.string() + ": ragged rows");
    for (Eigen::Index j = 0; j < m; ++j) out.beta_draws(static_cast<Eigen::Index>(t), j) = rows[t][j];
  }

  const auto scalar_path = dir / "scalars.csv";
  const auto scalar_lines = read_lines(scalar_path);
  for (std::size_t i = 1; i < scalar_lines.size(); ++i) {
    const auto row = parse_row(scalar_lines[i], scalar_path, i);
    if (row.size() != 3) throw SamplerError(scalar_path.string() + ": expected 3 columns");
    out.sigma2_draws.push_back(row[0]);
    out.tau2_draws.push_back(row[1]);
    out.log_posterior.push_back(row[2]);
  }

  const auto gamma_path = dir / "gamma_freq.csv";
  const auto gamma_lines = read_lines(gamma_path);
  for (std::size_t i = 0; i < gamma_lines.size(); ++i) out.gamma_freq.push_back(parse_row(gamma_lines[i], gamma_path, i).at(0));

  std::map<std::string, std::string, std::less<>> kv;
  for (const auto& line : read_lines(dir / "meta.txt")) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    kv.emplace(std::string(detail::trim(std::string_view(line).substr(0, eq))),
               std::string(detail::trim(std::string_view(line).substr(eq + 1))));
  }
  auto get = [&](const char* key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) throw SamplerError("meta.txt missing key '" + std::string(key) + "'");
    return it->second;
  };
  out.meta.seed = std::stoull(get("seed"));
  out.meta.model = parse_model(get("model"));
  out.meta.sweeps = std::stoull(get("sweeps"));
  out.meta.burn_in = std::stoull(get("burn_in"));
  out.meta.thin = std::stoull(get("thin"));
  out.meta.wall_seconds = detail::parse_double(get("wall_seconds")).value_or(0.0);
  out.meta.ridge_fallback = get("ridge_fallback") == "true";
  out.meta.tau_clamps = std::stoull(get("tau_clamps"));
  return out;
}

}  // namespace wavebvs
