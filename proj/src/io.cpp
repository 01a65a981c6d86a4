#include "iprox/io.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace iprox {

namespace fs = std::filesystem;

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string trace_csv(const Trace& trace,
                      const std::vector<std::pair<std::string, std::string>>& meta) {
  std::string out;
  for (const auto& [key, value] : meta) out += "# " + key + ": " + value + "\n";
  out += "outer_iter,inner_iters,cum_cost,objective,min_objective_so_far,avg_objective,bound\n";
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : trace.records) {
    best = std::min(best, r.objective);
    out += std::to_string(r.outer_index) + "," + std::to_string(r.inner_used) + "," +
           format_double(r.cum_cost) + "," + format_double(r.objective) + "," +
           format_double(best) + "," + format_double(r.avg_objective) + "," +
           (r.bound_value ? format_double(*r.bound_value) : std::string()) + "\n";
  }
  return out;
}

void write_trace_csv(const fs::path& path, const Trace& trace,
                     const std::vector<std::pair<std::string, std::string>>& meta) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  f << trace_csv(trace, meta);
  if (!f) throw std::runtime_error("write to '" + path.string() + "' failed");
}

namespace {

double parse_field(const std::string& s, const fs::path& path, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    // from_chars rejects "inf"/"nan" spellings on some libraries
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw std::runtime_error(path.string() + ":" + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace

Trace read_trace_csv(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path.string() + "'");
  Trace trace;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() != 7)
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": expected 7 columns");
    TraceRecord r;
    r.outer_index = static_cast<Count>(parse_field(cells[0], path, lineno));
    r.inner_used = static_cast<Count>(parse_field(cells[1], path, lineno));
    r.cum_cost = parse_field(cells[2], path, lineno);
    r.objective = parse_field(cells[3], path, lineno);
    r.avg_objective = parse_field(cells[5], path, lineno);
    if (!cells[6].empty()) r.bound_value = parse_field(cells[6], path, lineno);
    trace.records.push_back(r);
  }
  if (!header_seen) throw std::runtime_error("'" + path.string() + "' has no header row");
  return trace;
}

GrayImage read_pgm(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path.string() + "'");
  auto token = [&]() {
    std::string t;
    char c;
    while (f.get(c)) {
      if (c == '#') {
        std::string skip;
        std::getline(f, skip);
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        if (!t.empty()) break;
        continue;
      }
      t += c;
    }
    return t;
  };
  if (token() != "P5") throw std::runtime_error("'" + path.string() + "' is not a binary PGM (P5)");
  long w = 0, h = 0, maxval = 0;
  try {
    w = std::stol(token());
    h = std::stol(token());
    maxval = std::stol(token());
  } catch (const std::exception&) {
    throw std::runtime_error("'" + path.string() + "': malformed PGM header");
  }
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255)
    throw std::runtime_error("'" + path.string() + "': unsupported PGM (need 8-bit, positive size)");
  GrayImage img;
  img.width = w;
  img.height = h;
  img.pixels.resize(w * h);
  std::vector<unsigned char> raw(static_cast<std::size_t>(w * h));
  f.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (f.gcount() != static_cast<std::streamsize>(raw.size()))
    throw std::runtime_error("'" + path.string() + "': truncated pixel data");
  for (std::size_t i = 0; i < raw.size(); ++i)
    img.pixels[static_cast<Index>(i)] = static_cast<double>(raw[i]) / static_cast<double>(maxval);
  return img;
}

void write_pgm(const fs::path& path, const GrayImage& image) {
  if (image.pixels.size() != image.width * image.height)
    throw std::invalid_argument("write_pgm: pixel count does not match width*height");
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  f << "P5\n" << image.width << " " << image.height << "\n255\n";
  for (Index i = 0; i < image.pixels.size(); ++i) {
    const double v = std::clamp(image.pixels[i], 0.0, 1.0);
    f.put(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0))));
  }
  if (!f) throw std::runtime_error("write to '" + path.string() + "' failed");
}

}  // namespace iprox
