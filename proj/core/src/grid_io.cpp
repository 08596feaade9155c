#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <fstream>
#include <iterator>
#include <sstream>

#include "wavebvs/grid.hpp"

namespace wavebvs {
namespace {

std::string read_file(const std::filesystem::path& path, bool binary) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw GridError("cannot open '" + path.string() + "' for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

void check_side(std::size_t side, std::string_view source, const GridLoadOptions& options) {
  if (side == 0) throw GridError(std::string(source) + ": empty raster");
  if (options.require_power_of_two && !std::has_single_bit(side)) {
    throw GridError(std::string(source) + ": side " + std::to_string(side) + " not a power of two");
  }
}

}  // namespace

GridFormat format_from_path(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".csv") return GridFormat::Csv;
  if (ext == ".pgm") return GridFormat::Pgm;
  throw GridError("cannot infer raster format from '" + path.string() + "' (expected .csv or .pgm)");
}

Grid load_grid(const std::filesystem::path& path, GridFormat format, GridLoadOptions options) {
  const std::string name = path.string();
  if (format == GridFormat::Csv) return parse_csv_grid(read_file(path, false), name, options);
  return parse_pgm_grid(read_file(path, true), name, options);
}

Grid load_grid(const std::filesystem::path& path, GridLoadOptions options) {
  return load_grid(path, format_from_path(path), options);
}

Grid parse_csv_grid(std::string_view text, std::string_view source, GridLoadOptions options) {
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t row = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    if (line.empty()) continue;

    std::size_t col = 0;
    std::size_t start = 0;
    while (true) {
      std::size_t comma = line.find(',', start);
      std::string_view cell = trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw GridError(std::string(source) + ": non-numeric cell '" + std::string(cell) + "' at row " +
                        std::to_string(row) + ", column " + std::to_string(col));
      }
      values.push_back(value);
      ++col;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (row == 0) {
      cols = col;
    } else if (col != cols) {
      throw GridError(std::string(source) + ": row " + std::to_string(row) + " has " + std::to_string(col) +
                      " columns, expected " + std::to_string(cols));
    }
    ++row;
  }
  if (row != cols) {
    throw GridError(std::string(source) + ": non-square input (" + std::to_string(row) + " rows, " +
                    std::to_string(cols) + " columns)");
  }
  check_side(row, source, options);
  return Grid(row, std::move(values));
}

Grid parse_pgm_grid(std::string_view bytes, std::string_view source, GridLoadOptions options) {
  const std::string src(source);
  std::size_t pos = 0;
  // Header tokens may be separated by whitespace and '#' comments.
  auto next_token = [&]() -> std::string_view {
    while (pos < bytes.size()) {
      if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else {
        break;
      }
    }
    const std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    return bytes.substr(start, pos - start);
  };
  auto next_int = [&](const char* what) {
    const std::string_view tok = next_token();
    unsigned long v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size()) {
      throw GridError(src + ": bad PGM header field '" + std::string(what) + "'");
    }
    return static_cast<std::size_t>(v);
  };

  if (next_token() != "P5") throw GridError(src + ": not a binary P5 PGM");
  const std::size_t width = next_int("width");
  const std::size_t height = next_int("height");
  const std::size_t maxval = next_int("maxval");
  if (maxval == 0 || maxval > 65535) throw GridError(src + ": PGM maxval must lie in [1, 65535]");
  if (width != height) {
    throw GridError(src + ": non-square input (" + std::to_string(height) + " rows, " + std::to_string(width) +
                    " columns)");
  }
  check_side(width, source, options);
  ++pos;  // single whitespace byte after maxval

  const std::size_t bytes_per = maxval > 255 ? 2 : 1;
  const std::size_t count = width * height;
  if (pos + count * bytes_per > bytes.size()) {
    const std::size_t got = pos < bytes.size() ? (bytes.size() - pos) / bytes_per : 0;
    throw GridError(src + ": truncated PGM raster at row " + std::to_string(got / width) + ", column " +
                    std::to_string(got % width));
  }
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    unsigned v = static_cast<unsigned char>(bytes[pos + i * bytes_per]);
    if (bytes_per == 2) v = (v << 8) | static_cast<unsigned char>(bytes[pos + i * bytes_per + 1]);
    values[i] = static_cast<double>(v) / static_cast<double>(maxval);
  }
  return Grid(width, std::move(values));
}

std::string format_csv_grid(const Grid& g) {
  std::string out;
  out.reserve(g.size() * 12);
  char buf[32];
  for (std::size_t r = 0; r < g.side(); ++r) {
    for (std::size_t c = 0; c < g.side(); ++c) {
      if (c) out.push_back(',');
      const auto res = std::to_chars(buf, buf + sizeof buf, g[r * g.side() + c]);
      out.append(buf, res.ptr);
    }
    out.push_back('\n');
  }
  return out;
}

void save_grid_csv(const Grid& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw GridError("cannot open '" + path.string() + "' for writing");
  out << format_csv_grid(g);
  if (!out) throw GridError("write failed for '" + path.string() + "'");
}

}  // namespace wavebvs
