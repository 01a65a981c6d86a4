#pragma once

// Benchmark instances (TV deblurring, graph prediction, a small lasso),
// strategy sweeps and accuracy summaries.

#include "iprox/core.hpp"
#include "iprox/operators.hpp"
#include "iprox/oracles.hpp"
#include "iprox/solvers.hpp"
#include "iprox/strategies.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace iprox {

struct TvInstance {
  Index image_side = 64;
  int kernel_size = 9;
  double blur_std = 4.0;
  double noise_std = 1e-3;
  double lambda = 1e-4;
  std::uint64_t seed = 1;
};

struct GraphInstance {
  Index d = 100;
  double within_prob = 0.5;
  Index cross_pairs = 4;
  Index s = 10;
  double lambda = 1e-4;
  std::uint64_t seed = 1;
};

struct LassoInstance {
  Index rows = 60;
  Index cols = 30;
  Index nonzeros = 5;
  double noise_std = 0.05;
  double lambda = 0.1;
  std::uint64_t seed = 1;
};

struct BenchProblem {
  std::string preset;
  std::uint64_t seed = 0;
  std::shared_ptr<const CompositeProblem> problem;
  std::shared_ptr<const ProxOracle> oracle;
  // Exact prox for h, when one exists in closed form.
  std::shared_ptr<const ProxOracle> exact;
  Vector x0;
  // Observations y; for the TV problem also the clean source image.
  Vector observed;
  Vector source;
};

// Rectangles and a disk on a dark background, values in [0, 1].
Vector synthetic_image(Index side);

// The source image must be square with values in [0, 1]; when absent the
// synthetic image of side inst.image_side is used.
BenchProblem build_tv_problem(const TvInstance& inst, const std::optional<Vector>& source_image = {});

// Two clusters of d/2 and d - d/2 vertices, vertices 0..d/2-1 labeled +1.
struct ClusterGraph {
  Index d = 0;
  Index first_cluster = 0;
  std::vector<std::pair<Index, Index>> edges;
  std::vector<Index> labeled;
  Vector labels;  // +1 / -1 per vertex
};

ClusterGraph generate_cluster_graph(const GraphInstance& inst);
BenchProblem build_graph_problem(const GraphInstance& inst);

// g = 1/2 ||M x - b||^2, h = lambda ||x||_1 with exact soft-thresholding.
BenchProblem build_lasso_problem(const LassoInstance& inst);

// First cumulative cost at which the objective is <= target.
std::optional<double> cost_to_reach(const Trace& trace, double target);

// Minimum objective over all traces (and the extra reference values).
double reference_optimum(const std::vector<Trace>& traces, const std::vector<double>& extra = {});
double reference_optimum(const std::vector<std::filesystem::path>& trace_files);

// Log-spaced gap levels from first_gap down to last_gap (both included).
std::vector<double> accuracy_levels(double first_gap, double last_gap, int count);

struct StrategyRun {
  std::string name;
  Trace trace;
  std::optional<std::filesystem::path> file;
};

struct SweepOptions {
  // Model inverted by convergent strategies.
  ErrorModel model = ErrorModel::sublinear(1.0, 1.0);
  // Reference optimum; defaults to the minimum over the sweep.
  std::optional<double> f_ref;
  int levels = 12;
  bool parallel = true;
  bool warm_start = false;
};

struct SweepResult {
  std::vector<StrategyRun> runs;
  double f_ref = 0.0;
  std::optional<std::filesystem::path> summary;
};

// Runs every strategy to the cost budget. With an output directory, writes
// <name>.csv per strategy and summary.csv.
SweepResult sweep(const BenchProblem& bench, Scheme scheme, const std::vector<StrategySpec>& strategies,
                  const CostModel& costs, double budget,
                  const std::optional<std::filesystem::path>& out_dir, const SweepOptions& options = {});

// Long accelerated run used as the reference optimum of a benchmark.
Trace reference_run(const BenchProblem& bench, Count inner, double budget, bool warm_start = true);

// File-system friendly strategy name, e.g. "const:5" -> "const_5".
std::string file_stem(const std::string& strategy);

}  // namespace iprox
