#pragma once

// Convergence bounds of inexact proximal-gradient methods, as functions of the
// prox errors eps_1..eps_k, and their parametrized forms under an ErrorModel.
//
// basic:        f(x_k) - f* <= L/(2k)     (R0 + 2 S1 + sqrt(Q1))^2
// accelerated:  f(x_k) - f* <= 2L/(k+1)^2 (R0 + 2 S2 + sqrt(Q2))^2
//
//   S1 = sum_i sqrt(2 eps_i / L),   Q1 = sum_i 2 eps_i / L
//   S2 = sum_i i sqrt(2 eps_i / L), Q2 = sum_i 2 i^2 eps_i / L
//
// For the basic scheme the bound holds for the average of x_1..x_k. The
// parametric forms replace 2 S + sqrt(Q) by the larger 3 S.

#include "iprox/core.hpp"

#include <span>

namespace iprox {

struct BoundParams {
  double L = 1.0;
  double R0 = 0.0;  // ||x0 - x*||
  ErrorModel model = ErrorModel::sublinear(1.0, 1.0);

  BoundParams() = default;
  BoundParams(double lipschitz, double r0, ErrorModel m);
};

double rate_bound_basic(std::span<const double> eps, double L, double R0);
double rate_bound_accelerated(std::span<const double> eps, double L, double R0);

// Merged three-factor forms, evaluated directly on an error sequence.
double merged_bound_basic(std::span<const double> eps, double L, double R0);
double merged_bound_accelerated(std::span<const double> eps, double L, double R0);

// B_j(k, {l_i}) for the scenario; k must equal schedule.size() and the
// scenario's inner rate must match params.model.
double parametric_bound(Scenario scenario, Count k, const Schedule& schedule,
                        const BoundParams& params);

// Same, for a constant schedule of length k (no allocation).
double parametric_bound_constant(Scenario scenario, Count k, double l, const BoundParams& params);

// Continuous-l version used on relaxed schedules.
double parametric_bound_relaxed(Scenario scenario, std::span<const double> l,
                                const BoundParams& params);

// Throws std::invalid_argument when the scenario and model disagree.
void check_scenario_model(Scenario scenario, const ErrorModel& model);

}  // namespace iprox
