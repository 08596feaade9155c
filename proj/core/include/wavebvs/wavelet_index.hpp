#pragma once

#include <cstddef>
#include <string>

namespace wavebvs {

enum class WaveletKind { Scaling, Detail };

/// Orientation of a 2D Haar detail function.
///   Horizontal (r = 1): constant in s1, sign change in s2.
///   Vertical   (r = 2): sign change in s1, constant in s2.
///   Diagonal   (r = 3): sign change in both.
enum class Orientation : int { Horizontal = 1, Vertical = 2, Diagonal = 3 };

/// One element of the Haar basis {f_0} U {(r, j, k)}.
struct WaveletIndex {
  WaveletKind kind = WaveletKind::Scaling;
  Orientation r = Orientation::Horizontal;
  int j = 0;
  int k1 = 0;
  int k2 = 0;

  static WaveletIndex scaling() { return {}; }
  static WaveletIndex detail(Orientation r, int j, int k1, int k2) {
    return {WaveletKind::Detail, r, j, k1, k2};
  }

  bool is_scaling() const noexcept { return kind == WaveletKind::Scaling; }
  bool operator==(const WaveletIndex&) const = default;
};

std::string to_string(const WaveletIndex& idx);

/// Index bookkeeping for a level-J basis of d = 4^(J+1) functions.
///
/// Flat order is: scaling first, then ascending j, then r = 1..3, then
/// row-major k. With that order the flat position of detail (r, j, k) is
/// r * 4^j + k1 * 2^j + k2.
class WaveletBasis {
 public:
  explicit WaveletBasis(int max_level);

  int max_level() const noexcept { return max_level_; }
  std::size_t size() const noexcept { return size_; }

  std::size_t flatten(const WaveletIndex& idx) const;
  WaveletIndex unflatten(std::size_t flat) const;

  bool operator==(const WaveletBasis&) const = default;

 private:
  int max_level_;
  std::size_t size_;
};

/// 4^(J+1).
constexpr std::size_t basis_size(int level) noexcept { return std::size_t{1} << (2 * (level + 1)); }

}  // namespace wavebvs
