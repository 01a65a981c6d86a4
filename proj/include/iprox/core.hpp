#pragma once

// Shared domain types for inexact proximal-gradient optimization with
// computational-cost accounting.
//
// The composite problem is
//
//        min_x f(x) = g(x) + h(x)
//
// with g smooth (L-Lipschitz gradient) and h convex, possibly nonsmooth.
// The proximity operator of h is computed by an inner solver; each outer
// iteration i runs l_i inner iterations, and a run of k outer iterations costs
//
//        C_glob = c_in * sum_i l_i + k * c_out.

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace iprox {

using Vector = Eigen::VectorXd;
using Index = Eigen::Index;
using Count = std::int64_t;

class CompositeProblem {
public:
  using GradientFn = std::function<Vector(const Vector&)>;
  using ValueFn = std::function<double(const Vector&)>;

  CompositeProblem(Index dim, GradientFn grad_g, ValueFn eval_g, ValueFn eval_h,
                   double lipschitz);

  Index dim() const { return dim_; }
  double lipschitz() const { return lipschitz_; }

  Vector grad_g(const Vector& x) const { return grad_g_(x); }
  double eval_g(const Vector& x) const { return eval_g_(x); }
  double eval_h(const Vector& x) const { return eval_h_(x); }

private:
  Index dim_;
  GradientFn grad_g_;
  ValueFn eval_g_;
  ValueFn eval_h_;
  double lipschitz_;
};

// f(x) = g(x) + h(x). Non-finite values are returned as-is.
double evaluate_objective(const CompositeProblem& problem, const Vector& x);

struct CostModel {
  double c_in = 1.0;
  double c_out = 1.0;

  CostModel() = default;
  CostModel(double in, double out);
};

// Inner-solver error model: eps(l) = A / l^alpha or eps(l) = A (1 - gamma)^l.
class ErrorModel {
public:
  enum class Kind { Sublinear, Linear };

  static ErrorModel sublinear(double A, double alpha);
  static ErrorModel linear(double A, double gamma);

  Kind kind() const { return kind_; }
  double A() const { return A_; }
  // alpha for Sublinear, gamma for Linear.
  double rate() const { return rate_; }
  double alpha() const;
  double gamma() const;

private:
  ErrorModel(Kind kind, double A, double rate) : kind_(kind), A_(A), rate_(rate) {}

  Kind kind_;
  double A_;
  double rate_;
};

double epsilon_of_l(const ErrorModel& model, Count l);

// Smallest l >= 1 with epsilon_of_l(model, l) <= eps.
Count l_of_epsilon(const ErrorModel& model, double eps);

class Schedule {
public:
  Schedule() = default;
  explicit Schedule(std::vector<Count> inner_counts);

  static Schedule constant(Count k, Count l);

  std::size_t size() const { return counts_.size(); }
  Count operator[](std::size_t i) const { return counts_[i]; }
  const std::vector<Count>& counts() const { return counts_; }
  Count total_inner() const;

  auto begin() const { return counts_.begin(); }
  auto end() const { return counts_.end(); }

  friend bool operator==(const Schedule&, const Schedule&) = default;

private:
  std::vector<Count> counts_;
};

double schedule_cost(const Schedule& schedule, const CostModel& costs);

struct TraceRecord {
  Count outer_index = 0;
  Count inner_used = 0;
  double cum_cost = 0.0;
  double objective = 0.0;
  // Objective at the running average of the iterates x_1..x_k.
  double avg_objective = 0.0;
  std::optional<double> bound_value;
};

struct Trace {
  std::vector<TraceRecord> records;
  Vector final_point;
  Vector final_average;

  Schedule realized_schedule() const;
  // Smallest objective seen over the whole trace (+inf when empty).
  double min_objective() const;
};

enum class Scenario { BasicSublinear, BasicLinear, AccelSublinear, AccelLinear };

bool is_accelerated(Scenario s);
bool is_linear(Scenario s);
std::string to_string(Scenario s);
Scenario scenario_from_string(const std::string& name);

// Unconstrained: the all-ones schedule is optimal (large target accuracy).
// Constrained: the bound constraint is active and the closed forms apply.
enum class PlanCase { Constrained, Unconstrained };

std::string to_string(PlanCase c);

struct Plan {
  Scenario scenario = Scenario::BasicSublinear;
  PlanCase plan_case = PlanCase::Constrained;
  Count k_star = 0;
  Schedule schedule;
  double predicted_bound = 0.0;
  double predicted_cost = 0.0;

  // Continuous solution the integer schedule was recovered from. Empty for
  // the unconstrained case.
  double relaxed_k = 0.0;
  std::vector<double> relaxed_schedule;

  // Best schedule with a constant inner count, when the scenario admits one
  // (basic/sublinear, basic/linear, accelerated/sublinear).
  std::optional<Count> constant_k;
  std::optional<Count> constant_l;
  std::optional<double> constant_cost;
};

}  // namespace iprox
