#pragma once

// Cost-optimal choice of the outer count k and the inner counts l_1..l_k:
//
//   min  c_in sum_i l_i + k c_out   s.t.  B(k, {l_i}) <= rho,
//
// solved through its continuous relaxation in l (closed-form KKT solutions),
// a one-dimensional search over k, and integer recovery.
//
// With kappa = sqrt(L) / (3 sqrt(2A)) the feasibility margins are
//
//   C(k) = kappa (sqrt(2 k rho / L) - R0)         (basic outer scheme)
//   D(k) = kappa (sqrt(rho / (2L)) (k + 1) - R0)  (accelerated outer scheme)
//
// and the relaxed constraints read sum_i l_i^{-alpha/2} <= C(k),
// sum_i (1-gamma)^{l_i/2} <= C(k), sum_i i l_i^{-alpha/2} <= D(k) and
// sum_i i (1-gamma)^{l_i/2} <= D(k) for the four scenarios.

#include "iprox/bounds.hpp"
#include "iprox/core.hpp"

#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>

namespace iprox {

struct PlanRequest {
  Scenario scenario = Scenario::BasicSublinear;
  double rho = 1.0;
  BoundParams params;
  CostModel costs;
  Count k_search_max = 1'000'000;
};

class PlanError : public std::runtime_error {
public:
  explicit PlanError(const std::string& what,
                     std::optional<std::pair<double, double>> interval = std::nullopt)
      : std::runtime_error(what), interval_(interval) {}

  // Case-1 feasibility interval in k, when that is what failed.
  const std::optional<std::pair<double, double>>& interval() const { return interval_; }

private:
  std::optional<std::pair<double, double>> interval_;
};

double c_of_k(double k, const PlanRequest& req);
double d_of_k(double k, const PlanRequest& req);

// Below this accuracy no k admits the all-ones schedule (constrained case).
double threshold(Scenario scenario, const BoundParams& params);

// Real interval of k on which the all-ones schedule meets the bound, if any.
std::optional<std::pair<double, double>> unconstrained_interval(const PlanRequest& req);

struct RelaxedSchedule {
  std::vector<double> l;
  bool feasible = false;
  // Accelerated/linear only: multiplier of the bound constraint and the first
  // index with l_i > 1 (k + 1 when all entries are one).
  double multiplier = 0.0;
  Count breakpoint = 0;
};

RelaxedSchedule relaxed_schedule(Scenario scenario, Count k, const PlanRequest& req);

// Sum of the relaxed inner counts at k, in closed form (+inf when infeasible).
double relaxed_inner_total(Scenario scenario, Count k, const PlanRequest& req);

// The unique n in 1..k with (n-1)(2k+2-n) s <= 2 D < n(2k+1-n) s, s = sqrt(1-gamma).
Count n_of_k(Count k, double D, double gamma);

// Accelerated/linear constraint value as a function of the multiplier:
// F(lambda) = M(M-1)/2 s + (k - M + 1) / (lambda c), with c = ln sqrt(1/(1-gamma))
// and M(lambda) = ceil(1 / (lambda s c)) clamped to 1..k+1.
double accel_linear_constraint(double lambda, Count k, double gamma);
Count accel_linear_breakpoint(double lambda, Count k, double gamma);

struct KSearchResult {
  Count k = 0;
  double k_hat = 0.0;
  bool full_scan = false;
};

// Integer minimizer of a (presumed unimodal) function on [k_min, k_max]:
// golden-section search on the real extension, then the better of floor and
// ceiling. Falls back to an exhaustive scan when a coarse grid finds a
// better value.
KSearchResult minimize_over_k_detailed(const std::function<double(double)>& objective,
                                       Count k_min, Count k_max);
Count minimize_over_k(const std::function<double(double)>& objective, Count k_min, Count k_max);

// Integer recovery: ceil every entry, then floor entries from i = 1 on and
// stop at (and undo) the first one that breaks B <= rho.
Schedule round_schedule(const std::vector<double>& relaxed, const PlanRequest& req);

struct ConstantPlan {
  Count k = 0;
  Count l = 0;
  double cost = 0.0;
};

// Cheapest constant schedule (k, l) meeting the bound, k <= k_search_max.
// Not defined for the accelerated/linear scenario.
std::optional<ConstantPlan> best_constant_schedule(const PlanRequest& req);

Plan plan(const PlanRequest& req);

}  // namespace iprox
