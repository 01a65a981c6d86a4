#include "iprox/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace iprox {

CompositeProblem::CompositeProblem(Index dim, GradientFn grad_g, ValueFn eval_g,
                                   ValueFn eval_h, double lipschitz)
    : dim_(dim),
      grad_g_(std::move(grad_g)),
      eval_g_(std::move(eval_g)),
      eval_h_(std::move(eval_h)),
      lipschitz_(lipschitz) {
  if (dim_ <= 0) throw std::invalid_argument("CompositeProblem: dim must be positive");
  if (!(lipschitz_ > 0.0) || !std::isfinite(lipschitz_))
    throw std::invalid_argument("CompositeProblem: Lipschitz constant must be positive");
  if (!grad_g_ || !eval_g_ || !eval_h_)
    throw std::invalid_argument("CompositeProblem: missing evaluator");
}

double evaluate_objective(const CompositeProblem& problem, const Vector& x) {
  if (x.size() != problem.dim())
    throw std::invalid_argument("evaluate_objective: dimension mismatch (got " +
                                std::to_string(x.size()) + ", expected " +
                                std::to_string(problem.dim()) + ")");
  return problem.eval_g(x) + problem.eval_h(x);
}

CostModel::CostModel(double in, double out) : c_in(in), c_out(out) {
  if (!(c_in >= 0.0) || !(c_out >= 0.0))
    throw std::invalid_argument("CostModel: unit costs must be nonnegative");
  if (c_in == 0.0 && c_out == 0.0)
    throw std::invalid_argument("CostModel: c_in and c_out cannot both be zero");
}

ErrorModel ErrorModel::sublinear(double A, double alpha) {
  if (!(A > 0.0)) throw std::invalid_argument("ErrorModel: A must be positive");
  if (!(alpha > 0.0)) throw std::invalid_argument("ErrorModel: alpha must be positive");
  return ErrorModel(Kind::Sublinear, A, alpha);
}

ErrorModel ErrorModel::linear(double A, double gamma) {
  if (!(A > 0.0)) throw std::invalid_argument("ErrorModel: A must be positive");
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("ErrorModel: gamma must lie in (0, 1)");
  return ErrorModel(Kind::Linear, A, gamma);
}

double ErrorModel::alpha() const {
  if (kind_ != Kind::Sublinear) throw std::logic_error("ErrorModel: not a sublinear model");
  return rate_;
}

double ErrorModel::gamma() const {
  if (kind_ != Kind::Linear) throw std::logic_error("ErrorModel: not a linear model");
  return rate_;
}

double epsilon_of_l(const ErrorModel& model, Count l) {
  if (l < 1) throw std::invalid_argument("epsilon_of_l: l must be >= 1");
  const double ld = static_cast<double>(l);
  if (model.kind() == ErrorModel::Kind::Sublinear) return model.A() / std::pow(ld, model.alpha());
  return model.A() * std::pow(1.0 - model.gamma(), ld);
}

Count l_of_epsilon(const ErrorModel& model, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("l_of_epsilon: eps must be positive");
  if (eps >= model.A()) return 1;

  double guess;
  if (model.kind() == ErrorModel::Kind::Sublinear)
    guess = std::pow(model.A() / eps, 1.0 / model.alpha());
  else
    guess = std::log(eps / model.A()) / std::log1p(-model.gamma());

  constexpr double kMax = 4.0e18;
  if (!std::isfinite(guess) || guess > kMax)
    throw std::overflow_error("l_of_epsilon: required inner count overflows");

  Count l = std::max<Count>(1, static_cast<Count>(std::ceil(guess)));
  // The closed-form inverse can be off by one ulp-driven step either way.
  while (l > 1 && epsilon_of_l(model, l - 1) <= eps) --l;
  while (epsilon_of_l(model, l) > eps) ++l;
  return l;
}

Schedule::Schedule(std::vector<Count> inner_counts) : counts_(std::move(inner_counts)) {
  if (counts_.empty()) throw std::invalid_argument("Schedule: must contain at least one entry");
  for (Count l : counts_)
    if (l < 1) throw std::invalid_argument("Schedule: inner counts must be >= 1");
}

Schedule Schedule::constant(Count k, Count l) {
  if (k < 1) throw std::invalid_argument("Schedule::constant: k must be >= 1");
  return Schedule(std::vector<Count>(static_cast<std::size_t>(k), l));
}

Count Schedule::total_inner() const {
  return std::accumulate(counts_.begin(), counts_.end(), Count{0});
}

double schedule_cost(const Schedule& schedule, const CostModel& costs) {
  return costs.c_in * static_cast<double>(schedule.total_inner()) +
         static_cast<double>(schedule.size()) * costs.c_out;
}

Schedule Trace::realized_schedule() const {
  std::vector<Count> counts;
  counts.reserve(records.size());
  for (const auto& r : records) counts.push_back(r.inner_used);
  return Schedule(std::move(counts));
}

double Trace::min_objective() const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : records) best = std::min(best, r.objective);
  return best;
}

bool is_accelerated(Scenario s) {
  return s == Scenario::AccelSublinear || s == Scenario::AccelLinear;
}

bool is_linear(Scenario s) { return s == Scenario::BasicLinear || s == Scenario::AccelLinear; }

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::BasicSublinear: return "basic-sublinear";
    case Scenario::BasicLinear: return "basic-linear";
    case Scenario::AccelSublinear: return "accelerated-sublinear";
    case Scenario::AccelLinear: return "accelerated-linear";
  }
  return "unknown";
}

Scenario scenario_from_string(const std::string& name) {
  for (Scenario s : {Scenario::BasicSublinear, Scenario::BasicLinear, Scenario::AccelSublinear,
                     Scenario::AccelLinear})
    if (to_string(s) == name) return s;
  if (name == "accel-sublinear") return Scenario::AccelSublinear;
  if (name == "accel-linear") return Scenario::AccelLinear;
  if (name == "1") return Scenario::BasicSublinear;
  if (name == "2") return Scenario::BasicLinear;
  if (name == "3") return Scenario::AccelSublinear;
  if (name == "4") return Scenario::AccelLinear;
  throw std::invalid_argument("unknown scenario '" + name + "'");
}

std::string to_string(PlanCase c) {
  return c == PlanCase::Constrained ? "constrained" : "unconstrained";
}

}  // namespace iprox
