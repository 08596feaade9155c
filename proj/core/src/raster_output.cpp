#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>

#include "text_util.hpp"
#include "wavebvs/posterior.hpp"

namespace wavebvs {
namespace {

constexpr std::array<std::array<double, 3>, 4> kHue = {{
    {1.0, 0.0, 0.0},  // GeDelta
    {1.0, 1.0, 0.0},  // ZeroToDelta
    {0.0, 0.8, 0.0},  // NegDeltaToZero
    {0.0, 0.0, 1.0},  // LeNegDelta
}};
constexpr std::array<double, 3> kIntensity = {1.0, 0.65, 0.30};

std::ofstream open_binary(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw GridError("cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace

std::string format_classmap_csv(const ClassMap& map, const Grid& b_hat, const Grid& psd_b) {
  if (b_hat.side() != map.side || psd_b.side() != map.side) {
    throw GridError("classmap and surfaces have different sides");
  }
  using detail::format_double;
  std::string out = "row,col,s1,s2,b_hat,psd,ratio,category,evidence\n";
  for (std::size_t i = 0; i < b_hat.size(); ++i) {
    const Location loc = b_hat.location(i);
    const double ratio = psd_b[i] > 0.0 ? b_hat[i] / psd_b[i] : 0.0;
    out += std::to_string(i / map.side) + ',' + std::to_string(i % map.side) + ',' + format_double(loc.s1) + ',' +
           format_double(loc.s2) + ',' + format_double(b_hat[i]) + ',' + format_double(psd_b[i]) + ',' +
           format_double(ratio) + ',' + to_string(map.category[i]) + ',' + to_string(map.evidence[i]) + '\n';
  }
  return out;
}

void write_classmap_csv(const ClassMap& map, const Grid& b_hat, const Grid& psd_b,
                        const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw GridError("cannot open '" + path.string() + "' for writing");
  out << format_classmap_csv(map, b_hat, psd_b);
}

void write_classmap_ppm(const ClassMap& map, const std::filesystem::path& path, std::size_t pixel_scale) {
  pixel_scale = std::max<std::size_t>(pixel_scale, 1);
  const std::size_t side = map.side * pixel_scale;
  auto out = open_binary(path);
  out << "P6\n" << side << ' ' << side << "\n255\n";
  std::string row(side * 3, '\0');
  for (std::size_t r = 0; r < map.side; ++r) {
    for (std::size_t c = 0; c < map.side; ++c) {
      const std::size_t i = r * map.side + c;
      const auto& hue = kHue[static_cast<std::size_t>(map.category[i])];
      const double k = kIntensity[static_cast<std::size_t>(map.evidence[i])];
      for (std::size_t p = 0; p < pixel_scale; ++p) {
        for (std::size_t ch = 0; ch < 3; ++ch) {
          row[(c * pixel_scale + p) * 3 + ch] = static_cast<char>(std::lround(255.0 * hue[ch] * k));
        }
      }
    }
    for (std::size_t p = 0; p < pixel_scale; ++p) out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
}

void write_grid_pgm(const Grid& g, const std::filesystem::path& path) {
  const auto [lo, hi] = std::minmax_element(g.values().begin(), g.values().end());
  const double span = (g.size() && *hi > *lo) ? *hi - *lo : 1.0;
  auto out = open_binary(path);
  out << "P5\n" << g.side() << ' ' << g.side() << "\n255\n";
  std::string bytes(g.size(), '\0');
  for (std::size_t i = 0; i < g.size(); ++i) {
    bytes[i] = static_cast<char>(std::lround(255.0 * (g[i] - *lo) / span));
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace wavebvs
