#include "wavebvs/haar.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace wavebvs {
namespace {

void require_level(const Grid& g, int level) {
  const auto lattice = g.lattice();
  if (!lattice || lattice->level() != level) {
    throw GridError("grid side " + std::to_string(g.side()) + " does not match level " + std::to_string(level) +
                    " (expected side " + std::to_string(std::size_t{1} << (level + 2)) + ")");
  }
}

}  // namespace

CoeffVector::CoeffVector(int level, std::vector<double> values) : level_(level), values_(std::move(values)) {
  if (level < 0 || values_.size() != basis_size(level)) {
    throw std::invalid_argument("coefficient vector for level " + std::to_string(level) + " needs " +
                                std::to_string(basis_size(level)) + " entries, got " +
                                std::to_string(values_.size()));
  }
}

double lattice_norm(const LatticeSpec& lattice) noexcept {
  return 1.0 / std::sqrt(static_cast<double>(lattice.size()));
}

double basis_norm(const LatticeSpec& lattice, BasisScale scale) noexcept {
  return scale == BasisScale::Unit ? lattice_norm(lattice) : 1.0;
}

void basis_terms(Location s, int level, double norm, std::vector<BasisTerm>& out) {
  out.resize(terms_per_row(level));
  out[0] = {0, norm};
  std::size_t t = 1;
  for (int j = 0; j < level + 1; ++j) {
    const double scale = std::ldexp(1.0, j);
    const double t1 = s.s1 * scale;
    const double t2 = s.s2 * scale;
    const double k1 = std::floor(t1);
    const double k2 = std::floor(t2);
    const double sign1 = (t1 - k1) < 0.5 ? 1.0 : -1.0;
    const double sign2 = (t2 - k2) < 0.5 ? 1.0 : -1.0;
    const std::size_t per_level = std::size_t{1} << (2 * j);
    const std::size_t k = static_cast<std::size_t>(k1) * (std::size_t{1} << j) + static_cast<std::size_t>(k2);
    const double amp = norm * scale;
    out[t++] = {1 * per_level + k, amp * sign2};
    out[t++] = {2 * per_level + k, amp * sign1};
    out[t++] = {3 * per_level + k, amp * sign1 * sign2};
  }
}

std::vector<double> basis_row(Location s, int level, double norm) {
  if (!(s.s1 >= 0.0 && s.s1 < 1.0 && s.s2 >= 0.0 && s.s2 < 1.0)) {
    throw std::domain_error("basis_row: location (" + std::to_string(s.s1) + ", " + std::to_string(s.s2) +
                            ") outside [0,1)^2");
  }
  std::vector<BasisTerm> terms;
  basis_terms(s, level, norm, terms);
  std::vector<double> row(basis_size(level), 0.0);
  for (const auto& term : terms) row[term.flat] = term.value;
  return row;
}

std::size_t finest_cell(Location s, int level) noexcept {
  const double scale = std::ldexp(1.0, level + 1);
  const auto c1 = static_cast<std::size_t>(std::floor(s.s1 * scale));
  const auto c2 = static_cast<std::size_t>(std::floor(s.s2 * scale));
  return c1 * (std::size_t{1} << (level + 1)) + c2;
}

CoeffVector forward_dwt(const Grid& g, int level) {
  require_level(g, level);
  const double norm = lattice_norm(LatticeSpec(level));
  std::vector<double> c(basis_size(level), 0.0);
  std::vector<BasisTerm> terms;
  for (std::size_t i = 0; i < g.size(); ++i) {
    basis_terms(g.location(i), level, norm, terms);
    for (const auto& term : terms) c[term.flat] += term.value * g[i];
  }
  return {level, std::move(c)};
}

Grid inverse_dwt(const CoeffVector& c, const LatticeSpec& lattice) {
  if (c.level() != lattice.level()) {
    throw GridError("inverse_dwt: coefficient level " + std::to_string(c.level()) + " does not match lattice level " +
                    std::to_string(lattice.level()));
  }
  return synthesize(c, lattice.side(), lattice_norm(lattice));
}

Grid synthesize(const CoeffVector& c, std::size_t side, double norm) {
  std::vector<double> v(side * side, 0.0);
  std::vector<BasisTerm> terms;
  for (std::size_t i = 0; i < v.size(); ++i) {
    basis_terms(Grid::location_on(side, i), c.level(), norm, terms);
    double sum = 0.0;
    for (const auto& term : terms) sum += term.value * c[term.flat];
    v[i] = sum;
  }
  return Grid(side, std::move(v));
}

Eigen::MatrixXd analysis_matrix(const LatticeSpec& lattice) {
  const int level = lattice.level();
  const double norm = lattice_norm(lattice);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(lattice.size()),
                                            static_cast<Eigen::Index>(basis_size(level)));
  std::vector<BasisTerm> terms;
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    basis_terms(lattice.location(i), level, norm, terms);
    for (const auto& term : terms) w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(term.flat)) = term.value;
  }
  return w;
}

DesignMatrix::DesignMatrix(Eigen::MatrixXd dense) : dense_(std::move(dense)) {
  const auto m = static_cast<std::size_t>(dense_.cols());
  col_sqnorms_.resize(m);
  sparse_.resize(m);
  for (Eigen::Index j = 0; j < dense_.cols(); ++j) {
    auto& col = sparse_[static_cast<std::size_t>(j)];
    double ss = 0.0;
    for (Eigen::Index i = 0; i < dense_.rows(); ++i) {
      const double v = dense_(i, j);
      if (v != 0.0) {
        col.rows.push_back(static_cast<std::uint32_t>(i));
        col.values.push_back(v);
        ss += v * v;
      }
    }
    col_sqnorms_[static_cast<std::size_t>(j)] = ss;
  }
}

DesignMatrix build_design(const LatticeSpec& lattice, const Grid& x, BasisScale scale) {
  if (x.side() != lattice.side()) {
    throw GridError("build_design: covariate side " + std::to_string(x.side()) + " does not match lattice side " +
                    std::to_string(lattice.side()));
  }
  Eigen::MatrixXd w = analysis_matrix(lattice);
  if (scale == BasisScale::Function) w *= basis_norm(lattice, scale) / lattice_norm(lattice);
  const Eigen::Index d = w.cols();
  Eigen::MatrixXd dense(w.rows(), 2 * d);
  dense.leftCols(d) = w;
  const Eigen::Map<const Eigen::VectorXd> xv(x.values().data(), static_cast<Eigen::Index>(x.size()));
  dense.rightCols(d) = xv.asDiagonal() * w;
  return DesignMatrix(std::move(dense));
}

}  // namespace wavebvs
