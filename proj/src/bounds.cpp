#include "iprox/bounds.hpp"

#include <cmath>
#include <stdexcept>

namespace iprox {

BoundParams::BoundParams(double lipschitz, double r0, ErrorModel m) : L(lipschitz), R0(r0), model(m) {
  if (!(L > 0.0)) throw std::invalid_argument("BoundParams: L must be positive");
  if (!(R0 >= 0.0)) throw std::invalid_argument("BoundParams: R0 must be >= 0");
}

namespace {

void check_inputs(std::span<const double> eps, double L, double R0) {
  if (eps.empty()) throw std::invalid_argument("rate bound: need at least one error term");
  if (!(L > 0.0)) throw std::invalid_argument("rate bound: L must be positive");
  if (!(R0 >= 0.0)) throw std::invalid_argument("rate bound: R0 must be >= 0");
  for (double e : eps)
    if (!(e >= 0.0)) throw std::invalid_argument("rate bound: errors must be nonnegative");
}

double model_epsilon(const ErrorModel& model, double l) {
  if (model.kind() == ErrorModel::Kind::Sublinear) return model.A() / std::pow(l, model.alpha());
  return model.A() * std::pow(1.0 - model.gamma(), l);
}

}  // namespace

double rate_bound_basic(std::span<const double> eps, double L, double R0) {
  check_inputs(eps, L, R0);
  double s = 0.0;
  double q = 0.0;
  for (double e : eps) {
    s += std::sqrt(2.0 * e / L);
    q += 2.0 * e / L;
  }
  const double k = static_cast<double>(eps.size());
  const double inner = R0 + 2.0 * s + std::sqrt(q);
  return L / (2.0 * k) * inner * inner;
}

double rate_bound_accelerated(std::span<const double> eps, double L, double R0) {
  check_inputs(eps, L, R0);
  double s = 0.0;
  double q = 0.0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const double w = static_cast<double>(i + 1);
    s += w * std::sqrt(2.0 * eps[i] / L);
    q += 2.0 * w * w * eps[i] / L;
  }
  const double k = static_cast<double>(eps.size());
  const double inner = R0 + 2.0 * s + std::sqrt(q);
  return 2.0 * L / ((k + 1.0) * (k + 1.0)) * inner * inner;
}

// Sums run in extended precision so that a constant schedule evaluates the
// same as the closed form below, also on the boundary B = rho.
double merged_bound_basic(std::span<const double> eps, double L, double R0) {
  check_inputs(eps, L, R0);
  long double s = 0.0L;
  for (double e : eps) s += std::sqrt(2.0L * e / L);
  const long double k = static_cast<long double>(eps.size());
  const long double inner = R0 + 3.0L * s;
  return static_cast<double>(L / (2.0L * k) * inner * inner);
}

double merged_bound_accelerated(std::span<const double> eps, double L, double R0) {
  check_inputs(eps, L, R0);
  long double s = 0.0L;
  for (std::size_t i = 0; i < eps.size(); ++i)
    s += static_cast<long double>(i + 1) * std::sqrt(2.0L * eps[i] / L);
  const long double k = static_cast<long double>(eps.size());
  const long double inner = R0 + 3.0L * s;
  return static_cast<double>(2.0L * L / ((k + 1.0L) * (k + 1.0L)) * inner * inner);
}

void check_scenario_model(Scenario scenario, const ErrorModel& model) {
  const bool linear_model = model.kind() == ErrorModel::Kind::Linear;
  if (is_linear(scenario) != linear_model)
    throw std::invalid_argument("scenario " + to_string(scenario) + " does not match a " +
                                (linear_model ? "linear" : "sublinear") + " error model");
}

double parametric_bound(Scenario scenario, Count k, const Schedule& schedule,
                        const BoundParams& params) {
  check_scenario_model(scenario, params.model);
  if (k < 1 || static_cast<std::size_t>(k) != schedule.size())
    throw std::invalid_argument("parametric_bound: schedule length must equal k");
  std::vector<double> eps(schedule.size());
  for (std::size_t i = 0; i < schedule.size(); ++i) eps[i] = epsilon_of_l(params.model, schedule[i]);
  return is_accelerated(scenario) ? merged_bound_accelerated(eps, params.L, params.R0)
                                  : merged_bound_basic(eps, params.L, params.R0);
}

double parametric_bound_constant(Scenario scenario, Count k, double l, const BoundParams& params) {
  check_scenario_model(scenario, params.model);
  if (k < 1) throw std::invalid_argument("parametric_bound_constant: k must be >= 1");
  const long double kd = static_cast<long double>(k);
  const long double e = 3.0L * std::sqrt(2.0L * model_epsilon(params.model, l) / params.L);
  if (is_accelerated(scenario)) {
    const long double inner = params.R0 + e * (kd * (kd + 1.0L) / 2.0L);
    return static_cast<double>(2.0L * params.L / ((kd + 1.0L) * (kd + 1.0L)) * inner * inner);
  }
  const long double inner = params.R0 + e * kd;
  return static_cast<double>(params.L / (2.0L * kd) * inner * inner);
}

double parametric_bound_relaxed(Scenario scenario, std::span<const double> l,
                                const BoundParams& params) {
  check_scenario_model(scenario, params.model);
  std::vector<double> eps(l.size());
  for (std::size_t i = 0; i < l.size(); ++i) eps[i] = model_epsilon(params.model, l[i]);
  return is_accelerated(scenario) ? merged_bound_accelerated(eps, params.L, params.R0)
                                  : merged_bound_basic(eps, params.L, params.R0);
}

}  // namespace iprox
