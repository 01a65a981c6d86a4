// iprox command-line front end: planning, single runs, strategy sweeps and
// the two benchmark presets.

#include "iprox/bench.hpp"
#include "iprox/io.hpp"
#include "iprox/planner.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using namespace iprox;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Turns a JSON object into "--key value" tokens, skipping keys the user
// already passed on the command line.
std::vector<std::string> config_tokens(const fs::path& path, const std::vector<std::string>& given) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config '" + path.string() + "'");
  json cfg;
  try {
    cfg = json::parse(f);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("config '" + path.string() + "': " + e.what());
  }
  if (!cfg.is_object()) throw std::runtime_error("config '" + path.string() + "' must be a JSON object");
  auto scalar = [](const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) return format_double(v.get<double>());
    throw std::runtime_error("config: unsupported value " + v.dump());
  };
  std::vector<std::string> out;
  for (const auto& [key, value] : cfg.items()) {
    const std::string flag = "--" + key;
    bool seen = false;
    for (const auto& g : given)
      if (g == flag || g.rfind(flag + "=", 0) == 0) seen = true;
    if (seen) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) out.push_back(flag);
    } else if (value.is_array()) {
      out.push_back(flag);
      for (const auto& v : value) out.push_back(scalar(v));
    } else {
      out.push_back(flag);
      out.push_back(scalar(value));
    }
  }
  return out;
}

struct ModelFlags {
  double A = 1.0;
  std::optional<double> alpha;
  std::optional<double> gamma;

  ErrorModel model() const {
    if (alpha && gamma) throw std::invalid_argument("give either --alpha or --gamma, not both");
    if (gamma) return ErrorModel::linear(A, *gamma);
    return ErrorModel::sublinear(A, alpha.value_or(1.0));
  }
};

void add_model_flags(CLI::App* app, ModelFlags& m) {
  app->add_option("--A", m.A, "Inner error constant A");
  app->add_option("--alpha", m.alpha, "Sublinear inner rate");
  app->add_option("--gamma", m.gamma, "Linear inner rate");
}

struct PresetFlags {
  std::string preset = "tv";
  std::uint64_t seed = 1;
  std::optional<double> lambda;
  std::optional<Index> side;
  std::string image;
};

void add_preset_flags(CLI::App* app, PresetFlags& p) {
  app->add_option("--preset", p.preset, "Problem: tv, graph or lasso")
      ->check(CLI::IsMember({"tv", "graph", "lasso"}));
  app->add_option("--seed", p.seed, "Random seed");
  app->add_option("--lambda", p.lambda, "Regularization weight");
  app->add_option("--side", p.side, "TV image side (synthetic image)");
  app->add_option("--image", p.image, "TV source image (binary PGM)");
}

BenchProblem make_preset(const PresetFlags& p) {
  if (p.preset == "tv") {
    TvInstance inst;
    inst.seed = p.seed;
    if (p.lambda) inst.lambda = *p.lambda;
    if (p.side) inst.image_side = *p.side;
    std::optional<Vector> img;
    if (!p.image.empty()) {
      GrayImage g = read_pgm(p.image);
      if (g.width != g.height) throw std::invalid_argument("image '" + p.image + "' is not square");
      img = g.pixels;
    }
    return build_tv_problem(inst, img);
  }
  if (p.preset == "graph") {
    GraphInstance inst;
    inst.seed = p.seed;
    if (p.lambda) inst.lambda = *p.lambda;
    return build_graph_problem(inst);
  }
  LassoInstance inst;
  inst.seed = p.seed;
  if (p.lambda) inst.lambda = *p.lambda;
  return build_lasso_problem(inst);
}

json plan_json(const Plan& plan, const PlanRequest& req) {
  json j;
  j["scenario"] = to_string(plan.scenario);
  j["case"] = to_string(plan.plan_case);
  j["rho"] = req.rho;
  j["threshold"] = threshold(req.scenario, req.params);
  j["k_star"] = plan.k_star;
  j["schedule"] = plan.schedule.counts();
  j["predicted_bound"] = plan.predicted_bound;
  j["predicted_cost"] = plan.predicted_cost;
  if (plan.plan_case == PlanCase::Constrained) {
    j["relaxed_k"] = plan.relaxed_k;
    j["relaxed_schedule"] = plan.relaxed_schedule;
  }
  if (plan.constant_k) j["constant"] = {{"k", *plan.constant_k}, {"l", *plan.constant_l}, {"cost", *plan.constant_cost}};
  return j;
}

int run_bench(const std::string& preset, bool desk, const PresetFlags& flags, const fs::path& out_dir,
              const std::vector<std::string>& strategy_names, const ModelFlags& model) {
  PresetFlags p = flags;
  p.preset = preset;
  if (preset == "tv" && !p.side) p.side = desk ? 64 : 256;
  const BenchProblem bench = make_preset(p);
  std::vector<StrategySpec> specs;
  for (const auto& s : strategy_names) specs.push_back(parse_strategy(s));
  SweepOptions opt;
  opt.model = model.model();
  for (Scheme scheme : {Scheme::Basic, Scheme::Accelerated}) {
    const double budget = desk ? 1e5 : (scheme == Scheme::Basic ? 1e6 : 5e4);
    const fs::path dir = out_dir / to_string(scheme);
    const SweepResult r = sweep(bench, scheme, specs, CostModel{}, budget, dir, opt);
    std::cout << to_string(scheme) << ": f_ref = " << format_double(r.f_ref) << "\n";
    for (const auto& run : r.runs)
      std::cout << "  " << run.name << "  min f = " << format_double(run.trace.min_objective())
                << "  outer = " << run.trace.records.size() << "  -> " << run.file->string() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  // --config FILE is expanded in place before parsing
  for (std::size_t i = 1; i < args.size(); ++i) {
    std::string path;
    std::size_t erase = 0;
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      erase = 2;
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      erase = 1;
    }
    if (erase == 0) continue;
    try {
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + erase));
      const auto extra = config_tokens(path, args);
      const std::size_t at = args.size() > 1 ? 2 : 1;
      args.insert(args.begin() + static_cast<std::ptrdiff_t>(at), extra.begin(), extra.end());
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
    break;
  }

  CLI::App app{"Inexact proximal-gradient planning and benchmarks"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");
  // only documented here; expanded above
  std::string config_unused;
  app.add_option("--config", config_unused, "JSON file with flag values (command line wins)");

  // plan
  auto* plan_cmd = app.add_subcommand("plan", "Cost-optimal inner/outer schedule as JSON");
  std::string scenario = "basic-sublinear";
  double rho = 0.0, L = 1.0, R0 = 1.0, c_in = 1.0, c_out = 1.0;
  Count k_max = 1'000'000;
  ModelFlags plan_model;
  plan_cmd->add_option("--scenario", scenario, "basic-sublinear, basic-linear, accel-sublinear, accel-linear or 1..4");
  plan_cmd->add_option("--rho", rho, "Target accuracy")->required();
  plan_cmd->add_option("--L", L, "Lipschitz constant of grad g");
  plan_cmd->add_option("--R0", R0, "Distance ||x0 - x*||");
  plan_cmd->add_option("--c-in", c_in, "Cost of one inner iteration");
  plan_cmd->add_option("--c-out", c_out, "Cost of one outer iteration");
  plan_cmd->add_option("--k-max", k_max, "Search horizon for k");
  add_model_flags(plan_cmd, plan_model);

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "Run one strategy on a preset, CSV trace");
  PresetFlags solve_preset;
  ModelFlags solve_model;
  std::string solve_scheme = "basic", solve_strategy = "const:1", solve_out;
  double solve_budget = 1e4;
  bool solve_warm = false;
  add_preset_flags(solve_cmd, solve_preset);
  add_model_flags(solve_cmd, solve_model);
  solve_cmd->add_option("--scheme", solve_scheme, "basic or accelerated");
  solve_cmd->add_option("--strategy", solve_strategy, "const:L, sip:TOL or conv:DELTA[:SCALE]");
  solve_cmd->add_option("--budget", solve_budget, "Total cost budget");
  solve_cmd->add_option("--out", solve_out, "CSV path (stdout when absent)");
  solve_cmd->add_flag("--warm", solve_warm, "Warm-start the inner solver");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Run several strategies, CSVs plus summary");
  PresetFlags sweep_preset;
  ModelFlags sweep_model;
  std::string sweep_scheme = "basic", sweep_out = "sweep_out";
  std::vector<std::string> sweep_strategies;
  double sweep_budget = 1e4;
  add_preset_flags(sweep_cmd, sweep_preset);
  add_model_flags(sweep_cmd, sweep_model);
  sweep_cmd->add_option("--scheme", sweep_scheme, "basic or accelerated");
  sweep_cmd->add_option("--strategies", sweep_strategies, "Strategy list");
  sweep_cmd->add_option("--budget", sweep_budget, "Total cost budget per strategy");
  sweep_cmd->add_option("--out-dir", sweep_out, "Output directory");

  // bench presets
  const std::vector<std::string> default_strategies{"const:1", "const:5", "const:25", "conv:1", "sip:1e-8"};
  auto* tv_cmd = app.add_subcommand("bench-tv", "TV deblurring benchmark (both schemes)");
  auto* graph_cmd = app.add_subcommand("bench-graph", "Graph prediction benchmark (both schemes)");
  PresetFlags bench_preset;
  ModelFlags bench_model;
  bool desk = false;
  std::string bench_out = "bench_out";
  std::vector<std::string> bench_strategies = default_strategies;
  for (auto* cmd : {tv_cmd, graph_cmd}) {
    cmd->add_flag("--desk", desk, "Desk scale: 64x64 image, budget 1e5 for both schemes");
    cmd->add_option("--seed", bench_preset.seed, "Random seed");
    cmd->add_option("--lambda", bench_preset.lambda, "Regularization weight");
    cmd->add_option("--out-dir", bench_out, "Output directory");
    cmd->add_option("--strategies", bench_strategies, "Strategy list");
    add_model_flags(cmd, bench_model);
  }
  tv_cmd->add_option("--image", bench_preset.image, "Source image (binary PGM)");
  tv_cmd->add_option("--side", bench_preset.side, "Synthetic image side");

  // calibrate
  auto* cal_cmd = app.add_subcommand("calibrate", "Fit an inner error model on a preset");
  PresetFlags cal_preset;
  std::string family = "sublinear";
  double cal_alpha = 1.0;
  int probes = 4;
  Count reference_l = 20000;
  std::vector<Count> l_values{1, 2, 4, 8, 16, 32, 64, 128};
  add_preset_flags(cal_cmd, cal_preset);
  cal_cmd->add_option("--family", family, "sublinear or linear")->check(CLI::IsMember({"sublinear", "linear"}));
  cal_cmd->add_option("--alpha", cal_alpha, "Fixed sublinear rate");
  cal_cmd->add_option("--probes", probes, "Number of probe points");
  cal_cmd->add_option("--reference-l", reference_l, "Inner iterations of the reference prox");
  cal_cmd->add_option("--l-values", l_values, "Inner counts to sample");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*plan_cmd) {
      PlanRequest req;
      req.scenario = scenario_from_string(scenario);
      req.rho = rho;
      req.params = BoundParams(L, R0, plan_model.model());
      req.costs = CostModel(c_in, c_out);
      req.k_search_max = k_max;
      std::cout << plan_json(plan(req), req).dump(2) << "\n";
      return 0;
    }
    if (*solve_cmd) {
      const BenchProblem bench = make_preset(solve_preset);
      const Scheme scheme = scheme_from_string(solve_scheme);
      auto source = make_source(parse_strategy(solve_strategy), scheme, solve_model.model());
      const Trace trace = run(*bench.problem, *bench.oracle, scheme, *source, CostModel{},
                              StopRule::budget(solve_budget), bench.x0, RunOptions{solve_warm, std::nullopt});
      const std::vector<std::pair<std::string, std::string>> meta{
          {"preset", bench.preset}, {"seed", std::to_string(bench.seed)}, {"scheme", to_string(scheme)},
          {"strategy", solve_strategy}, {"budget", format_double(solve_budget)}};
      if (solve_out.empty())
        std::cout << trace_csv(trace, meta);
      else
        write_trace_csv(solve_out, trace, meta);
      return 0;
    }
    if (*sweep_cmd) {
      const BenchProblem bench = make_preset(sweep_preset);
      std::vector<StrategySpec> specs;
      for (const auto& s : sweep_strategies) specs.push_back(parse_strategy(s));
      SweepOptions opt;
      opt.model = sweep_model.model();
      const SweepResult r =
          sweep(bench, scheme_from_string(sweep_scheme), specs, CostModel{}, sweep_budget, fs::path(sweep_out), opt);
      for (const auto& run : r.runs) std::cout << run.file->string() << "\n";
      if (r.summary) std::cout << r.summary->string() << "\n";
      return 0;
    }
    if (*tv_cmd) return run_bench("tv", desk, bench_preset, bench_out, bench_strategies, bench_model);
    if (*graph_cmd) return run_bench("graph", desk, bench_preset, bench_out, bench_strategies, bench_model);
    if (*cal_cmd) {
      if (probes < 2) throw std::invalid_argument("calibrate: need at least 2 probes");
      const BenchProblem bench = make_preset(cal_preset);
      std::shared_ptr<const ProxOracle> exact = bench.exact;
      if (!exact) exact = std::make_shared<LongRunProx>(bench.oracle, reference_l);
      // probes: gradient steps from points along the way to the observations
      std::vector<ProxProbe> pts;
      const CompositeProblem& pb = *bench.problem;
      Vector x = bench.x0;
      for (int i = 0; i < probes; ++i) {
        const Vector z = x - pb.grad_g(x) / pb.lipschitz();
        pts.push_back(ProxProbe{z, pb.lipschitz()});
        x = exact->prox(z, pb.lipschitz(), 1, nullptr).point;
      }
      RateFamily fam{family == "linear" ? ErrorModel::Kind::Linear : ErrorModel::Kind::Sublinear, cal_alpha};
      const ErrorModel m = calibrate_error_model(*bench.oracle, *exact, pts, fam, l_values);
      json j;
      j["family"] = family;
      j["A"] = m.A();
      if (m.kind() == ErrorModel::Kind::Linear)
        j["gamma"] = m.gamma();
      else
        j["alpha"] = m.alpha();
      std::cout << j.dump(2) << "\n";
      return 0;
    }
  } catch (const PlanError& e) {
    std::cerr << "error: " << e.what();
    if (e.interval()) std::cerr << " (interval [" << e.interval()->first << ", " << e.interval()->second << "])";
    std::cerr << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
