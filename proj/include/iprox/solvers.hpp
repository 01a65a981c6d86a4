#pragma once

// Outer proximal-gradient loops:
//
//   x_k = prox_{h/L}[ y_{k-1} - grad g(y_{k-1}) / L ]   (approximated by an oracle)
//   y_k = x_k + beta_k (x_k - x_{k-1})
//
// with beta_k = 0 (basic) or beta_k = (k-1)/(k+2) (accelerated). Every outer
// step asks an InnerCountSource for l_k and charges c_in * l_k + c_out.

#include "iprox/core.hpp"
#include "iprox/oracles.hpp"

#include <optional>
#include <stdexcept>

namespace iprox {

enum class Scheme { Basic, Accelerated };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& name);

double momentum(Scheme scheme, Count k);

struct SolverState {
  Count outer_index = 0;  // index of the step about to run
  double objective = 0.0;  // f(x_{k-1})
  double cum_cost = 0.0;
};

class InnerCountSource {
public:
  virtual ~InnerCountSource() = default;

  virtual Count next_l(Count k, const SolverState& state) = 0;

  // f_before = f at the point the gradient step was taken from, f_after = f
  // at the new prox output.
  virtual void observe(Count /*k*/, double /*f_before*/, double /*f_after*/) {}
};

// Stops as soon as any of the set conditions holds. The cost budget is never
// exceeded: a step that would overrun it is not taken.
struct StopRule {
  std::optional<Count> max_outer;
  std::optional<double> cost_budget;
  std::optional<double> objective_target;

  static StopRule outer(Count k) { return StopRule{k, std::nullopt, std::nullopt}; }
  static StopRule budget(double c) { return StopRule{std::nullopt, c, std::nullopt}; }
};

struct RunOptions {
  // Pass the previous dual iterate to the oracle. Off by default: every
  // inner solve starts from zero.
  bool warm_start = false;
  // When set, each record gets the exact-prox rate bound with this R0.
  std::optional<double> r0;
};

class DivergenceError : public std::runtime_error {
public:
  DivergenceError(const std::string& what, Trace partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}

  const Trace& partial_trace() const { return partial_; }

private:
  Trace partial_;
};

Trace run(const CompositeProblem& problem, const ProxOracle& oracle, Scheme scheme,
          InnerCountSource& source, const CostModel& costs, const StopRule& stop,
          const Vector& x0, const RunOptions& options = {});

// Runs eps.size() outer steps where step i uses an exactly eps_i-inexact prox
// point. `exact` must be an exact oracle. When r0 is given, every record
// carries the matching rate bound (basic or accelerated) of the eps prefix.
Trace run_with_synthetic_errors(const CompositeProblem& problem, const ProxOracle& exact,
                                Scheme scheme, const std::vector<double>& eps,
                                const CostModel& costs, const Vector& x0,
                                std::optional<double> r0 = std::nullopt);

}  // namespace iprox
