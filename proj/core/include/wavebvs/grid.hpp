#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wavebvs {

/// Raised for malformed raster input and shape mismatches between grids.
class GridError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Point in the unit square. s1 follows the row axis, s2 the column axis.
struct Location {
  double s1 = 0.0;
  double s2 = 0.0;
};

/// Dyadic sampling lattice for maximal decomposition level J.
///
/// The lattice has side 2^(J+2) pixels per axis and n = 4^(J+2) points at
/// (k1, k2) / side. Points are ordered row-major: i = k1 * side + k2.
class LatticeSpec {
 public:
  explicit LatticeSpec(int level);

  /// Lattice whose side equals `side`, if side = 2^(J+2) for some J >= 0.
  static std::optional<LatticeSpec> from_side(std::size_t side);

  int level() const noexcept { return level_; }
  std::size_t side() const noexcept { return side_; }
  std::size_t size() const noexcept { return side_ * side_; }
  Location location(std::size_t i) const noexcept;

  bool operator==(const LatticeSpec&) const = default;

 private:
  int level_;
  std::size_t side_;
};

/// Square raster of finite values, row-major.
///
/// Pixel (row, col) of a side-N grid sits at (row / N, col / N). Grids on a
/// dyadic lattice report it through lattice(); other sides (e.g. a 100x100
/// evaluation grid) are plain grids.
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t side, std::vector<double> values);
  Grid(const LatticeSpec& spec, std::vector<double> values);

  static Grid zeros(std::size_t side) { return Grid(side, std::vector<double>(side * side, 0.0)); }

  template <typename F>
  static Grid from_function(std::size_t side, F&& f) {
    std::vector<double> v(side * side);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(location_on(side, i));
    return Grid(side, std::move(v));
  }

  std::size_t side() const noexcept { return side_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double at(std::size_t row, std::size_t col) const { return values_.at(row * side_ + col); }

  Location location(std::size_t i) const noexcept { return location_on(side_, i); }
  std::optional<LatticeSpec> lattice() const { return LatticeSpec::from_side(side_); }

  static Location location_on(std::size_t side, std::size_t i) noexcept {
    const double n = static_cast<double>(side);
    return {static_cast<double>(i / side) / n, static_cast<double>(i % side) / n};
  }

  bool operator==(const Grid&) const = default;

 private:
  std::size_t side_ = 0;
  std::vector<double> values_;
};

/// Throws GridError unless both grids have the same side.
void require_same_shape(const Grid& a, const Grid& b, std::string_view what);

struct StandardizedGrid {
  Grid grid;
  double mean = 0.0;
  double sd = 1.0;
};

/// Centers and scales to sample mean 0 and sample sd 1 (n - 1 denominator).
/// Throws GridError for zero-variance input.
StandardizedGrid standardize(const Grid& g);

/// Applies the affine map of a previous standardization to another grid.
Grid standardize_with(const Grid& g, double mean, double sd);

// I/O -----------------------------------------------------------------------

enum class GridFormat { Csv, Pgm };

struct GridLoadOptions {
  /// Sampling lattices need dyadic sides; evaluation-grid outputs do not.
  bool require_power_of_two = true;
};

/// Format from file extension (.csv, .pgm); throws GridError otherwise.
GridFormat format_from_path(const std::filesystem::path& path);

/// Loads a square raster whose side is a power of two.
Grid load_grid(const std::filesystem::path& path, GridFormat format, GridLoadOptions options = {});
Grid load_grid(const std::filesystem::path& path, GridLoadOptions options = {});

/// CSV: one raster row per line, comma separated, no header.
Grid parse_csv_grid(std::string_view text, std::string_view source = "<memory>",
                    GridLoadOptions options = {});
/// Binary P5 PGM, maxval up to 65535, rescaled to [0, 1].
Grid parse_pgm_grid(std::string_view bytes, std::string_view source = "<memory>",
                    GridLoadOptions options = {});

/// Shortest round-trip decimal representation of each value.
std::string format_csv_grid(const Grid& g);
void save_grid_csv(const Grid& g, const std::filesystem::path& path);

}  // namespace wavebvs
