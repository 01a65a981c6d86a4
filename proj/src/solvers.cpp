#include "iprox/solvers.hpp"

#include "iprox/bounds.hpp"

#include <cmath>
#include <functional>

namespace iprox {

std::string to_string(Scheme s) { return s == Scheme::Basic ? "basic" : "accelerated"; }

Scheme scheme_from_string(const std::string& name) {
  if (name == "basic") return Scheme::Basic;
  if (name == "accelerated" || name == "accel") return Scheme::Accelerated;
  throw std::invalid_argument("unknown scheme '" + name + "'");
}

double momentum(Scheme scheme, Count k) {
  if (scheme == Scheme::Basic) return 0.0;
  const double kd = static_cast<double>(k);
  return (kd - 1.0) / (kd + 2.0);
}

namespace {

using ProxCall = std::function<ProxResult(const Vector& z, Count k, Count l, const Vector* warm)>;
using BoundCall = std::function<std::optional<double>(Count k)>;

Trace run_loop(const CompositeProblem& problem, const ProxCall& prox, Scheme scheme,
               InnerCountSource& source, const CostModel& costs, const StopRule& stop,
               const Vector& x0, bool warm_start, const BoundCall& bound) {
  if (!stop.max_outer && !stop.cost_budget && !stop.objective_target)
    throw std::invalid_argument("run: stop rule has no finite bound");
  if (x0.size() != problem.dim())
    throw std::invalid_argument("run: x0 has " + std::to_string(x0.size()) +
                                " entries, problem dimension is " + std::to_string(problem.dim()));

  const double L = problem.lipschitz();
  Trace trace;
  Vector x = x0;
  Vector y = x0;
  Vector avg = Vector::Zero(x0.size());
  Vector dual;
  double f_x = evaluate_objective(problem, x0);
  double cost = 0.0;

  for (Count k = 1;; ++k) {
    if (stop.max_outer && k > *stop.max_outer) break;

    const Count l = source.next_l(k, SolverState{k, f_x, cost});
    if (l < 1) throw std::logic_error("run: inner count source returned l < 1");
    const double step_cost = costs.c_in * static_cast<double>(l) + costs.c_out;
    if (stop.cost_budget && cost + step_cost > *stop.cost_budget) break;

    const Vector z = y - problem.grad_g(y) / L;
    const double f_before = scheme == Scheme::Basic ? f_x : evaluate_objective(problem, y);
    ProxResult r = prox(z, k, l, warm_start && dual.size() > 0 ? &dual : nullptr);
    if (warm_start) dual = std::move(r.dual);

    const Vector& x_new = r.point;
    const double f_new = evaluate_objective(problem, x_new);
    cost += step_cost;
    avg += (x_new - avg) / static_cast<double>(k);
    const double f_avg = evaluate_objective(problem, avg);

    trace.records.push_back(TraceRecord{k, l, cost, f_new, f_avg, bound(k)});
    if (!std::isfinite(f_new) || !std::isfinite(f_avg)) {
      trace.final_point = x_new;
      trace.final_average = avg;
      throw DivergenceError("run: non-finite objective at outer iteration " + std::to_string(k),
                            std::move(trace));
    }

    source.observe(k, f_before, f_new);
    y = x_new + momentum(scheme, k) * (x_new - x);
    x = x_new;
    f_x = f_new;

    if (stop.objective_target && f_new <= *stop.objective_target) break;
  }

  trace.final_point = x;
  trace.final_average = avg;
  return trace;
}

class FixedOne final : public InnerCountSource {
public:
  Count next_l(Count, const SolverState&) override { return 1; }
};

}  // namespace

Trace run(const CompositeProblem& problem, const ProxOracle& oracle, Scheme scheme,
          InnerCountSource& source, const CostModel& costs, const StopRule& stop,
          const Vector& x0, const RunOptions& options) {
  const double L = problem.lipschitz();
  ProxCall prox = [&oracle, L](const Vector& z, Count, Count l, const Vector* warm) {
    return oracle.prox(z, L, l, warm);
  };
  BoundCall bound = [&](Count k) -> std::optional<double> {
    if (!options.r0) return std::nullopt;
    const std::vector<double> zeros(static_cast<std::size_t>(k), 0.0);
    return scheme == Scheme::Basic ? rate_bound_basic(zeros, L, *options.r0)
                                   : rate_bound_accelerated(zeros, L, *options.r0);
  };
  return run_loop(problem, prox, scheme, source, costs, stop, x0, options.warm_start, bound);
}

Trace run_with_synthetic_errors(const CompositeProblem& problem, const ProxOracle& exact,
                                Scheme scheme, const std::vector<double>& eps,
                                const CostModel& costs, const Vector& x0,
                                std::optional<double> r0) {
  if (eps.empty()) throw std::invalid_argument("run_with_synthetic_errors: empty eps sequence");
  for (double e : eps)
    if (!(e >= 0.0)) throw std::invalid_argument("run_with_synthetic_errors: negative eps");
  if (!exact.exact()) throw std::invalid_argument("run_with_synthetic_errors: oracle is not exact");

  const double L = problem.lipschitz();
  ProxCall prox = [&](const Vector& z, Count k, Count, const Vector*) {
    return prox_synthetic(z, L, exact, eps[static_cast<std::size_t>(k - 1)]);
  };
  BoundCall bound = [&](Count k) -> std::optional<double> {
    if (!r0) return std::nullopt;
    const std::span<const double> prefix(eps.data(), static_cast<std::size_t>(k));
    return scheme == Scheme::Basic ? rate_bound_basic(prefix, L, *r0)
                                   : rate_bound_accelerated(prefix, L, *r0);
  };
  FixedOne one;
  return run_loop(problem, prox, scheme, one, costs,
                  StopRule::outer(static_cast<Count>(eps.size())), x0, false, bound);
}

}  // namespace iprox
