#include "iprox/bench.hpp"

#include "iprox/io.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <future>
#include <limits>
#include <random>
#include <set>

namespace iprox {

namespace fs = std::filesystem;

Vector synthetic_image(Index side) {
  if (side < 3) throw std::invalid_argument("synthetic_image: side must be >= 3");
  Vector img = Vector::Constant(side * side, 0.1);
  const double n = static_cast<double>(side);
  auto rect = [&](double r0, double r1, double c0, double c1, double v) {
    for (Index r = 0; r < side; ++r)
      for (Index c = 0; c < side; ++c) {
        const double y = (static_cast<double>(r) + 0.5) / n;
        const double x = (static_cast<double>(c) + 0.5) / n;
        if (y >= r0 && y < r1 && x >= c0 && x < c1) img[r * side + c] = v;
      }
  };
  rect(0.15, 0.55, 0.20, 0.50, 0.8);
  rect(0.60, 0.90, 0.10, 0.40, 0.5);
  for (Index r = 0; r < side; ++r)
    for (Index c = 0; c < side; ++c) {
      const double y = (static_cast<double>(r) + 0.5) / n - 0.65;
      const double x = (static_cast<double>(c) + 0.5) / n - 0.65;
      if (x * x + y * y < 0.2 * 0.2) img[r * side + c] = 0.95;
    }
  return img;
}

BenchProblem build_tv_problem(const TvInstance& inst, const std::optional<Vector>& source_image) {
  Index side = inst.image_side;
  Vector source;
  if (source_image) {
    side = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(source_image->size()))));
    if (side * side != source_image->size())
      throw std::invalid_argument("build_tv_problem: source image must be square");
    source = *source_image;
  }
  if (side < 3) throw std::invalid_argument("build_tv_problem: image side must be >= 3");
  if (!source_image) source = synthetic_image(side);
  if (source.minCoeff() < 0.0 || source.maxCoeff() > 1.0)
    throw std::invalid_argument("build_tv_problem: source image values must lie in [0, 1]");
  if (!(inst.lambda >= 0.0) || !(inst.noise_std >= 0.0))
    throw std::invalid_argument("build_tv_problem: lambda and noise_std must be >= 0");

  auto blur = std::make_shared<GaussianBlur>(side, inst.kernel_size, inst.blur_std);
  Vector y = blur->apply(source);
  std::mt19937_64 rng(inst.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (Index i = 0; i < y.size(); ++i) y[i] += inst.noise_std * noise(rng);

  const double norm_sq =
      power_iteration(side * side, [&](const Vector& v) { return blur->apply(blur->apply(v)); }, 100);
  const double L = 2.0 * norm_sq * 1.01;

  auto tv = std::make_shared<TvDualProx>(side, inst.lambda);
  auto grad = [blur, y](const Vector& x) { return Vector(2.0 * blur->apply_adjoint(blur->apply(x) - y)); };
  auto g = [blur, y](const Vector& x) { return (blur->apply(x) - y).squaredNorm(); };
  auto h = [tv](const Vector& x) { return tv->h(x); };

  BenchProblem out;
  out.preset = "tv";
  out.seed = inst.seed;
  out.problem = std::make_shared<CompositeProblem>(side * side, grad, g, h, L);
  out.oracle = tv;
  out.x0 = Vector::Zero(side * side);
  out.observed = y;
  out.source = source;
  return out;
}

ClusterGraph generate_cluster_graph(const GraphInstance& inst) {
  if (inst.d < 2) throw std::invalid_argument("graph: need d >= 2 vertices");
  if (inst.s < 1 || inst.s > inst.d) throw std::invalid_argument("graph: need 0 < s <= d");
  if (!(inst.within_prob >= 0.0 && inst.within_prob <= 1.0))
    throw std::invalid_argument("graph: within_prob must lie in [0, 1]");
  ClusterGraph g;
  g.d = inst.d;
  g.first_cluster = inst.d / 2;
  const Index n1 = g.first_cluster;
  const Index n2 = inst.d - n1;
  if (inst.cross_pairs < 0 || inst.cross_pairs > n1 * n2)
    throw std::invalid_argument("graph: cross_pairs = " + std::to_string(inst.cross_pairs) +
                                " exceeds the " + std::to_string(n1 * n2) + " available pairs");

  std::mt19937_64 rng(inst.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (Index u = 0; u < inst.d; ++u)
    for (Index v = u + 1; v < inst.d; ++v) {
      const bool same = (u < n1) == (v < n1);
      if (same && unif(rng) < inst.within_prob) g.edges.emplace_back(u, v);
    }
  std::set<std::pair<Index, Index>> cross;
  std::uniform_int_distribution<Index> pick1(0, n1 - 1);
  std::uniform_int_distribution<Index> pick2(n1, inst.d - 1);
  while (static_cast<Index>(cross.size()) < inst.cross_pairs) cross.emplace(pick1(rng), pick2(rng));
  g.edges.insert(g.edges.end(), cross.begin(), cross.end());

  std::vector<Index> vertices(static_cast<std::size_t>(inst.d));
  for (Index i = 0; i < inst.d; ++i) vertices[static_cast<std::size_t>(i)] = i;
  std::shuffle(vertices.begin(), vertices.end(), rng);
  g.labeled.assign(vertices.begin(), vertices.begin() + inst.s);
  std::sort(g.labeled.begin(), g.labeled.end());

  g.labels.resize(inst.d);
  for (Index i = 0; i < inst.d; ++i) g.labels[i] = i < n1 ? 1.0 : -1.0;
  return g;
}

BenchProblem build_graph_problem(const GraphInstance& inst) {
  if (!(inst.lambda >= 0.0)) throw std::invalid_argument("graph: lambda must be >= 0");
  const ClusterGraph graph = generate_cluster_graph(inst);
  const std::vector<Index> labeled = graph.labeled;
  Vector y(static_cast<Index>(labeled.size()));
  for (std::size_t j = 0; j < labeled.size(); ++j) y[static_cast<Index>(j)] = graph.labels[labeled[j]];

  auto oracle = std::make_shared<GraphL1DualProx>(EdgeIncidence(inst.d, graph.edges), inst.lambda);
  auto grad = [labeled, y, d = inst.d](const Vector& x) {
    Vector gr = Vector::Zero(d);
    for (std::size_t j = 0; j < labeled.size(); ++j)
      gr[labeled[j]] = 2.0 * (x[labeled[j]] - y[static_cast<Index>(j)]);
    return gr;
  };
  auto g = [labeled, y](const Vector& x) {
    double s = 0.0;
    for (std::size_t j = 0; j < labeled.size(); ++j) {
      const double r = x[labeled[j]] - y[static_cast<Index>(j)];
      s += r * r;
    }
    return s;
  };
  auto h = [oracle](const Vector& x) { return oracle->h(x); };

  BenchProblem out;
  out.preset = "graph";
  out.seed = inst.seed;
  // A selects rows of the identity, so ||A||^2 = 1.
  out.problem = std::make_shared<CompositeProblem>(inst.d, grad, g, h, 2.0);
  out.oracle = oracle;
  out.x0 = Vector::Zero(inst.d);
  out.observed = y;
  return out;
}

BenchProblem build_lasso_problem(const LassoInstance& inst) {
  if (inst.rows < 1 || inst.cols < 1 || inst.nonzeros < 0 || inst.nonzeros > inst.cols)
    throw std::invalid_argument("lasso: bad dimensions");
  std::mt19937_64 rng(inst.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd M(inst.rows, inst.cols);
  const double scale = 1.0 / std::sqrt(static_cast<double>(inst.rows));
  for (Index j = 0; j < inst.cols; ++j)
    for (Index i = 0; i < inst.rows; ++i) M(i, j) = normal(rng) * scale;
  Vector x_true = Vector::Zero(inst.cols);
  std::vector<Index> idx(static_cast<std::size_t>(inst.cols));
  for (Index i = 0; i < inst.cols; ++i) idx[static_cast<std::size_t>(i)] = i;
  std::shuffle(idx.begin(), idx.end(), rng);
  std::uniform_real_distribution<double> mag(1.0, 2.0);
  for (Index t = 0; t < inst.nonzeros; ++t)
    x_true[idx[static_cast<std::size_t>(t)]] = (rng() & 1U ? 1.0 : -1.0) * mag(rng);
  Vector b = M * x_true;
  for (Index i = 0; i < inst.rows; ++i) b[i] += inst.noise_std * normal(rng);

  const double sigma = Eigen::JacobiSVD<Eigen::MatrixXd>(M).singularValues()(0);
  auto Mp = std::make_shared<const Eigen::MatrixXd>(std::move(M));
  auto oracle = std::make_shared<L1Prox>(inst.lambda);
  auto grad = [Mp, b](const Vector& x) { return Vector(Mp->transpose() * (*Mp * x - b)); };
  auto g = [Mp, b](const Vector& x) { return 0.5 * (*Mp * x - b).squaredNorm(); };
  auto h = [oracle](const Vector& x) { return oracle->h(x); };

  BenchProblem out;
  out.preset = "lasso";
  out.seed = inst.seed;
  out.problem = std::make_shared<CompositeProblem>(inst.cols, grad, g, h, sigma * sigma);
  out.oracle = oracle;
  out.exact = oracle;
  out.x0 = Vector::Zero(inst.cols);
  out.observed = b;
  out.source = x_true;
  return out;
}

std::optional<double> cost_to_reach(const Trace& trace, double target) {
  for (const auto& r : trace.records)
    if (r.objective <= target) return r.cum_cost;
  return std::nullopt;
}

double reference_optimum(const std::vector<Trace>& traces, const std::vector<double>& extra) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& t : traces) best = std::min(best, t.min_objective());
  for (double v : extra) best = std::min(best, v);
  return best;
}

double reference_optimum(const std::vector<fs::path>& trace_files) {
  std::vector<Trace> traces;
  traces.reserve(trace_files.size());
  for (const auto& p : trace_files) traces.push_back(read_trace_csv(p));
  return reference_optimum(traces);
}

std::vector<double> accuracy_levels(double first_gap, double last_gap, int count) {
  if (!(first_gap > 0.0) || !(last_gap > 0.0) || count < 1)
    throw std::invalid_argument("accuracy_levels: gaps must be positive and count >= 1");
  std::vector<double> out;
  if (count == 1) return {first_gap};
  const double a = std::log(first_gap);
  const double b = std::log(last_gap);
  for (int i = 0; i < count; ++i) out.push_back(std::exp(a + (b - a) * i / (count - 1)));
  return out;
}

std::string file_stem(const std::string& strategy) {
  std::string s = strategy;
  for (char& c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_')) c = '_';
  return s;
}

SweepResult sweep(const BenchProblem& bench, Scheme scheme, const std::vector<StrategySpec>& strategies,
                  const CostModel& costs, double budget, const std::optional<fs::path>& out_dir,
                  const SweepOptions& options) {
  if (!(budget > 0.0)) throw std::invalid_argument("sweep: budget must be positive");
  std::set<std::string> names;
  for (const auto& s : strategies)
    if (!names.insert(s.name).second) throw std::invalid_argument("sweep: duplicate strategy '" + s.name + "'");

  SweepResult result;
  if (strategies.empty()) return result;

  auto one = [&](const StrategySpec& spec) {
    auto source = make_source(spec, scheme, options.model);
    try {
      return run(*bench.problem, *bench.oracle, scheme, *source, costs, StopRule::budget(budget),
                 bench.x0, RunOptions{options.warm_start, std::nullopt});
    } catch (const DivergenceError& e) {
      throw std::runtime_error("strategy '" + spec.name + "': " + e.what());
    }
  };
  std::vector<Trace> traces;
  if (options.parallel) {
    std::vector<std::future<Trace>> jobs;
    for (const auto& spec : strategies) jobs.push_back(std::async(std::launch::async, one, std::cref(spec)));
    for (auto& j : jobs) traces.push_back(j.get());
  } else {
    for (const auto& spec : strategies) traces.push_back(one(spec));
  }

  result.f_ref = options.f_ref ? std::min(*options.f_ref, reference_optimum(traces))
                               : reference_optimum(traces);
  for (std::size_t i = 0; i < strategies.size(); ++i)
    result.runs.push_back(StrategyRun{strategies[i].name, std::move(traces[i]), std::nullopt});

  if (!out_dir) return result;
  std::error_code ec;
  fs::create_directories(*out_dir, ec);
  if (ec) throw std::runtime_error("cannot create '" + out_dir->string() + "': " + ec.message());

  for (auto& run_ : result.runs) {
    const fs::path path = *out_dir / (file_stem(run_.name) + ".csv");
    write_trace_csv(path, run_.trace,
                    {{"preset", bench.preset},
                     {"seed", std::to_string(bench.seed)},
                     {"scheme", to_string(scheme)},
                     {"strategy", run_.name},
                     {"budget", format_double(budget)},
                     {"c_in", format_double(costs.c_in)},
                     {"c_out", format_double(costs.c_out)}});
    run_.file = path;
  }

  const double f0 = evaluate_objective(*bench.problem, bench.x0);
  const double first_gap = f0 - result.f_ref;
  double last_gap = std::numeric_limits<double>::infinity();
  for (const auto& r : result.runs) {
    const double gap = r.trace.min_objective() - result.f_ref;
    if (gap > 0.0) last_gap = std::min(last_gap, gap);
  }
  if (!std::isfinite(last_gap)) last_gap = first_gap * 1e-12;

  const fs::path summary = *out_dir / "summary.csv";
  std::string text = "# preset: " + bench.preset + "\n# seed: " + std::to_string(bench.seed) +
                     "\n# scheme: " + to_string(scheme) + "\n# budget: " + format_double(budget) +
                     "\n# f_ref: " + format_double(result.f_ref) + "\n";
  text += "strategy,level,gap,cost_to_reach\n";
  if (first_gap > 0.0) {
    const auto levels = accuracy_levels(first_gap, std::min(last_gap, first_gap), options.levels);
    for (const auto& r : result.runs)
      for (std::size_t i = 0; i < levels.size(); ++i) {
        const auto c = cost_to_reach(r.trace, result.f_ref + levels[i]);
        text += r.name + "," + std::to_string(i) + "," + format_double(levels[i]) + "," +
                (c ? format_double(*c) : std::string()) + "\n";
      }
  }
  std::ofstream f(summary, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + summary.string() + "' for writing");
  f << text;
  if (!f) throw std::runtime_error("write to '" + summary.string() + "' failed");
  result.summary = summary;
  return result;
}

Trace reference_run(const BenchProblem& bench, Count inner, double budget, bool warm_start) {
  ConstantSource source(inner);
  return run(*bench.problem, *bench.oracle, Scheme::Accelerated, source, CostModel{},
             StopRule::budget(budget), bench.x0, RunOptions{warm_start, std::nullopt});
}

}  // namespace iprox
