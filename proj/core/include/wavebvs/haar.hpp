#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "wavebvs/grid.hpp"
#include "wavebvs/wavelet_index.hpp"

namespace wavebvs {

/// Haar coefficients of one surface, in WaveletBasis flat order.
class CoeffVector {
 public:
  CoeffVector(int level, std::vector<double> values);
  static CoeffVector zeros(int level) { return {level, std::vector<double>(basis_size(level), 0.0)}; }

  int level() const noexcept { return level_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

 private:
  int level_;
  std::vector<double> values_;
};

/// Nonzero entry of a basis row W(s).
struct BasisTerm {
  std::size_t flat;
  double value;
};

/// Number of nonzero entries in any row W(s): the scaling term plus one
/// function per (r, j).
constexpr std::size_t terms_per_row(int level) noexcept { return 1 + 3 * static_cast<std::size_t>(level + 1); }

/// Scale that makes lattice-stacked rows an orthonormal-column W: 1/sqrt(n).
double lattice_norm(const LatticeSpec& lattice) noexcept;

/// Coefficient scale of a regression design.
///   Unit:     W'W = I, coefficients are sqrt(n) times the function-scale ones.
///   Function: W(s) holds the L2-normalized basis functions themselves
///             (norm 1), so W'W = n I and f(s) = W(s) c with c the continuous
///             Haar coefficients of f.
/// Surfaces are identical; only priors that are not scale invariant (the
/// per-coordinate slab variances) see a difference.
enum class BasisScale { Unit, Function };

double basis_norm(const LatticeSpec& lattice, BasisScale scale) noexcept;

/// Writes the nonzero entries of W(s) into `out` (resized to terms_per_row).
/// Entry (r, j, k) is norm * 2^j * phi^r(2^j s - k); the scaling entry is norm.
void basis_terms(Location s, int level, double norm, std::vector<BasisTerm>& out);

/// Dense row W(s) of length 4^(J+1). Throws std::domain_error outside [0,1)^2.
std::vector<double> basis_row(Location s, int level, double norm);

/// Row-major id of the finest dyadic cell (side 2^-(J+1)) containing s.
/// Locations in the same cell share the same basis row.
std::size_t finest_cell(Location s, int level) noexcept;

/// c = W' vec(g). Requires g.side() == 2^(J+2).
///
/// W has n/4 columns, so inverse_dwt(forward_dwt(g)) is the orthogonal
/// projection of g onto images constant on 2x2 pixel blocks; it reproduces g
/// exactly when g already lies in that range.
CoeffVector forward_dwt(const Grid& g, int level);

/// vec(g) = W c on the level-J lattice.
Grid inverse_dwt(const CoeffVector& c, const LatticeSpec& lattice);

/// Evaluates W(s) c at every pixel of a side x side grid, with the given
/// normalization (use the training lattice norm to transfer coefficients).
Grid synthesize(const CoeffVector& c, std::size_t side, double norm);

/// Dense n x d matrix of stacked lattice rows.
Eigen::MatrixXd analysis_matrix(const LatticeSpec& lattice);

/// n x m regression matrix with cached column norms and row supports.
class DesignMatrix {
 public:
  struct Column {
    std::vector<std::uint32_t> rows;
    std::vector<double> values;
  };

  explicit DesignMatrix(Eigen::MatrixXd dense);

  Eigen::Index rows() const noexcept { return dense_.rows(); }
  Eigen::Index cols() const noexcept { return dense_.cols(); }
  const Eigen::MatrixXd& dense() const noexcept { return dense_; }
  auto column(Eigen::Index j) const { return dense_.col(j); }
  double col_sqnorm(Eigen::Index j) const noexcept { return col_sqnorms_[static_cast<std::size_t>(j)]; }
  std::span<const double> col_sqnorms() const noexcept { return col_sqnorms_; }
  const Column& sparse_column(Eigen::Index j) const noexcept { return sparse_[static_cast<std::size_t>(j)]; }

 private:
  Eigen::MatrixXd dense_;
  std::vector<double> col_sqnorms_;
  std::vector<Column> sparse_;
};

/// X = [W, x o W] on the level-J lattice.
DesignMatrix build_design(const LatticeSpec& lattice, const Grid& x, BasisScale scale = BasisScale::Unit);

}  // namespace wavebvs
