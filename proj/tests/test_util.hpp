#pragma once

#include "iprox/bench.hpp"
#include "iprox/core.hpp"
#include "iprox/solvers.hpp"
#include "iprox/strategies.hpp"

#include "iprox/planner.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>

namespace testutil {

using iprox::Count;
using iprox::Vector;

inline Vector random_vector(std::mt19937_64& rng, iprox::Index n, double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  Vector v(n);
  for (iprox::Index i = 0; i < n; ++i) v[i] = d(rng);
  return v;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

inline bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

// Soft thresholding written out per coordinate, independent of the library.
inline Vector soft(const Vector& z, double t) {
  Vector x(z.size());
  for (iprox::Index i = 0; i < z.size(); ++i) {
    const double a = std::abs(z[i]) - t;
    x[i] = a > 0.0 ? (z[i] > 0.0 ? a : -a) : 0.0;
  }
  return x;
}

struct Reference {
  Vector x_star;
  double f_star = 0.0;
};

// Long exact-prox accelerated run on the lasso desk instance.
inline Reference lasso_reference(const iprox::BenchProblem& bench, Count iterations = 100000) {
  iprox::ConstantSource one(1);
  const iprox::Trace t = iprox::run(*bench.problem, *bench.oracle, iprox::Scheme::Accelerated, one,
                                    iprox::CostModel{}, iprox::StopRule::outer(iterations), bench.x0);
  Reference r;
  r.x_star = t.final_point;
  r.f_star = std::min(t.min_objective(), iprox::evaluate_objective(*bench.problem, t.final_point));
  return r;
}

// Straight transcriptions of the two rate bounds.
inline double basic_rhs(const std::vector<double>& eps, std::size_t k, double L, double R0) {
  double a = 0.0, b = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    a += std::sqrt(2.0 * eps[i] / L);
    b += 2.0 * eps[i] / L;
  }
  const double t = R0 + 2.0 * a + std::sqrt(b);
  return L / (2.0 * static_cast<double>(k)) * t * t;
}

inline double accel_rhs(const std::vector<double>& eps, std::size_t k, double L, double R0) {
  double a = 0.0, b = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double w = static_cast<double>(i + 1);
    a += w * std::sqrt(2.0 * eps[i] / L);
    b += 2.0 * w * w * eps[i] / L;
  }
  const double t = R0 + 2.0 * a + std::sqrt(b);
  const double kp = static_cast<double>(k) + 1.0;
  return 2.0 * L / (kp * kp) * t * t;
}

// Numeric minimizer of sum_i l_i subject to sum_i w_i phi(l_i) <= budget,
// l_i >= 1, with phi convex and decreasing. Each l_i minimizes
// l + lambda w_i phi(l) on [1, inf) (bisection on the derivative) and lambda
// is bisected in log scale until the constraint is active.
struct RelaxedProblem {
  std::vector<double> w;
  std::function<double(double)> phi;
  std::function<double(double)> dphi;
  double budget = 0.0;
};

inline double argmin_coordinate(const RelaxedProblem& p, double w, double lambda) {
  auto d = [&](double l) { return 1.0 + lambda * w * p.dphi(l); };
  if (d(1.0) >= 0.0) return 1.0;
  double lo = 1.0, hi = 2.0;
  while (d(hi) < 0.0) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (d(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline std::vector<double> solve_relaxed_numeric(const RelaxedProblem& p) {
  auto at = [&](double lambda) {
    std::vector<double> l(p.w.size());
    for (std::size_t i = 0; i < l.size(); ++i) l[i] = argmin_coordinate(p, p.w[i], lambda);
    return l;
  };
  auto load = [&](const std::vector<double>& l) {
    double s = 0.0;
    for (std::size_t i = 0; i < l.size(); ++i) s += p.w[i] * p.phi(l[i]);
    return s;
  };
  if (load(at(0.0)) <= p.budget) return at(0.0);
  double lo = -50.0, hi = 1.0;
  while (load(at(std::exp(hi))) > p.budget) hi += 5.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (load(at(std::exp(mid))) > p.budget ? lo : hi) = mid;
  }
  return at(std::exp(hi));
}

// The relaxed problem the planner solves at k, written out from the bound.
inline RelaxedProblem relaxed_problem(iprox::Scenario s, Count k, const iprox::PlanRequest& req) {
  const auto& p = req.params;
  RelaxedProblem out;
  const double kd = static_cast<double>(k);
  const double kappa = std::sqrt(p.L) / (3.0 * std::sqrt(2.0 * p.model.A()));
  const bool acc = iprox::is_accelerated(s);
  out.budget = acc ? kappa * (std::sqrt(req.rho / (2.0 * p.L)) * (kd + 1.0) - p.R0)
                   : kappa * (std::sqrt(2.0 * kd * req.rho / p.L) - p.R0);
  for (Count i = 1; i <= k; ++i) out.w.push_back(acc ? static_cast<double>(i) : 1.0);
  if (iprox::is_linear(s)) {
    const double c = -0.5 * std::log(1.0 - p.model.gamma());
    out.phi = [c](double l) { return std::exp(-c * l); };
    out.dphi = [c](double l) { return -c * std::exp(-c * l); };
  } else {
    const double h = 0.5 * p.model.alpha();
    out.phi = [h](double l) { return std::pow(l, -h); };
    out.dphi = [h](double l) { return -h * std::pow(l, -h - 1.0); };
  }
  return out;
}

// The bound written out from the 3-factor form, independent of the library.
inline double bound_direct(iprox::Scenario s, const std::vector<Count>& l, const iprox::BoundParams& p) {
  const double k = static_cast<double>(l.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < l.size(); ++i) {
    const double li = static_cast<double>(l[i]);
    const double eps = iprox::is_linear(s) ? p.model.A() * std::pow(1.0 - p.model.gamma(), li)
                                           : p.model.A() / std::pow(li, p.model.alpha());
    const double w = iprox::is_accelerated(s) ? static_cast<double>(i + 1) : 1.0;
    acc += w * std::sqrt(2.0 * eps / p.L);
  }
  const double t = p.R0 + 3.0 * acc;
  return iprox::is_accelerated(s) ? 2.0 * p.L / ((k + 1.0) * (k + 1.0)) * t * t : p.L / (2.0 * k) * t * t;
}

// Same bound for a constant schedule, with the weight sums in closed form.
inline double bound_direct_constant(iprox::Scenario s, Count k, Count l, const iprox::BoundParams& p) {
  const double kd = static_cast<double>(k);
  const double li = static_cast<double>(l);
  const double eps = iprox::is_linear(s) ? p.model.A() * std::pow(1.0 - p.model.gamma(), li)
                                         : p.model.A() / std::pow(li, p.model.alpha());
  const double w = iprox::is_accelerated(s) ? kd * (kd + 1.0) / 2.0 : kd;
  const double t = p.R0 + 3.0 * w * std::sqrt(2.0 * eps / p.L);
  return iprox::is_accelerated(s) ? 2.0 * p.L / ((kd + 1.0) * (kd + 1.0)) * t * t : p.L / (2.0 * kd) * t * t;
}

struct BruteForce {
  Count k = 0;
  Count l = 0;
  double cost = std::numeric_limits<double>::infinity();
};

// Exhaustive search over constant schedules with k <= k_max, l <= l_max.
inline BruteForce brute_force_constant(const iprox::PlanRequest& req, Count k_max, Count l_max) {
  BruteForce best;
  for (Count l = 1; l <= l_max; ++l)
    for (Count k = 1; k <= k_max; ++k) {
      const double cost = static_cast<double>(k) * (req.costs.c_in * static_cast<double>(l) + req.costs.c_out);
      if (cost >= best.cost) break;
      if (bound_direct_constant(req.scenario, k, l, req.params) <= req.rho)
        best = BruteForce{k, l, cost};
    }
  return best;
}

// Dynamic program over per-step inner counts for the accelerated/linear
// scenario: for each k <= k_max, the least total inner count whose weighted
// error sum fits under the bound, with every l_i in 1..l_max.
struct DpResult {
  std::vector<Count> schedule;
  double cost = std::numeric_limits<double>::infinity();
};

inline DpResult dp_accel_linear(const iprox::PlanRequest& req, Count k_max, Count l_max) {
  const auto& p = req.params;
  const double s = std::sqrt(1.0 - p.model.gamma());
  DpResult best;
  const std::size_t T = static_cast<std::size_t>(k_max * l_max);
  const double inf = std::numeric_limits<double>::infinity();
  // load[j][t]: least sum_{i<=j} i s^{l_i} with sum l_i = t
  std::vector<std::vector<double>> load(static_cast<std::size_t>(k_max) + 1, std::vector<double>(T + 1, inf));
  std::vector<std::vector<Count>> pick(load.size(), std::vector<Count>(T + 1, 0));
  load[0][0] = 0.0;
  for (Count j = 1; j <= k_max; ++j) {
    const auto J = static_cast<std::size_t>(j);
    for (std::size_t t = 0; t <= T; ++t) {
      for (Count l = 1; l <= l_max && static_cast<std::size_t>(l) <= t; ++l) {
        const double prev = load[J - 1][t - static_cast<std::size_t>(l)];
        if (prev == inf) continue;
        const double v = prev + static_cast<double>(j) * std::pow(s, static_cast<double>(l));
        if (v < load[J][t]) {
          load[J][t] = v;
          pick[J][t] = l;
        }
      }
    }
    for (std::size_t t = 0; t <= T; ++t) {
      if (load[J][t] == inf) continue;
      const double cost = req.costs.c_in * static_cast<double>(t) + req.costs.c_out * static_cast<double>(j);
      if (cost >= best.cost) continue;
      std::vector<Count> sched(J);
      std::size_t rest = t;
      for (std::size_t i = J; i >= 1; --i) {
        sched[i - 1] = pick[i][rest];
        rest -= static_cast<std::size_t>(sched[i - 1]);
      }
      if (bound_direct(iprox::Scenario::AccelLinear, sched, p) <= req.rho) {
        best.schedule = std::move(sched);
        best.cost = cost;
      }
    }
  }
  return best;
}

}  // namespace testutil
