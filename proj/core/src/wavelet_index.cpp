#include "wavebvs/wavelet_index.hpp"

#include <stdexcept>

namespace wavebvs {

std::string to_string(const WaveletIndex& idx) {
  if (idx.is_scaling()) return "f0";
  return "(r=" + std::to_string(static_cast<int>(idx.r)) + ",j=" + std::to_string(idx.j) + ",k=" +
         std::to_string(idx.k1) + "," + std::to_string(idx.k2) + ")";
}

WaveletBasis::WaveletBasis(int max_level) : max_level_(max_level) {
  if (max_level < 0 || max_level > 12) {
    throw std::invalid_argument("wavelet level must lie in [0, 12], got " + std::to_string(max_level));
  }
  size_ = basis_size(max_level);
}

std::size_t WaveletBasis::flatten(const WaveletIndex& idx) const {
  if (idx.is_scaling()) return 0;
  const int r = static_cast<int>(idx.r);
  const int extent = 1 << idx.j;
  if (idx.j < 0 || idx.j > max_level_ || r < 1 || r > 3 || idx.k1 < 0 || idx.k1 >= extent ||
      idx.k2 < 0 || idx.k2 >= extent) {
    throw std::out_of_range("wavelet index " + to_string(idx) + " outside level-" +
                            std::to_string(max_level_) + " basis");
  }
  const std::size_t per_level = std::size_t{1} << (2 * idx.j);
  return static_cast<std::size_t>(r) * per_level + static_cast<std::size_t>(idx.k1) * extent +
         static_cast<std::size_t>(idx.k2);
}

WaveletIndex WaveletBasis::unflatten(std::size_t flat) const {
  if (flat >= size_) {
    throw std::out_of_range("flat wavelet position " + std::to_string(flat) + " >= " + std::to_string(size_));
  }
  if (flat == 0) return WaveletIndex::scaling();
  // Level j occupies positions [4^j, 4^(j+1)).
  int j = 0;
  while ((std::size_t{1} << (2 * (j + 1))) <= flat) ++j;
  const std::size_t per_level = std::size_t{1} << (2 * j);
  const auto r = static_cast<int>(flat / per_level);
  const std::size_t k = flat % per_level;
  const int extent = 1 << j;
  return WaveletIndex::detail(static_cast<Orientation>(r), j, static_cast<int>(k / extent),
                              static_cast<int>(k % extent));
}

}  // namespace wavebvs
