#pragma once

// Trace CSV and binary PGM (P5) input/output.

#include "iprox/core.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace iprox {

// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

// Columns: outer_iter, inner_iters, cum_cost, objective, min_objective_so_far,
// avg_objective, bound. Each (key, value) pair becomes a "# key: value" line
// above the header row.
void write_trace_csv(const std::filesystem::path& path, const Trace& trace,
                     const std::vector<std::pair<std::string, std::string>>& meta);
std::string trace_csv(const Trace& trace,
                      const std::vector<std::pair<std::string, std::string>>& meta);

// Reads back the records of a trace CSV (final points are not stored).
Trace read_trace_csv(const std::filesystem::path& path);

struct GrayImage {
  Index width = 0;
  Index height = 0;
  Vector pixels;  // row-major, values in [0, 1]
};

GrayImage read_pgm(const std::filesystem::path& path);
// Values are clamped to [0, 1] and quantized to 8 bits.
void write_pgm(const std::filesystem::path& path, const GrayImage& image);

}  // namespace iprox
