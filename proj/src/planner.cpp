#include "iprox/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <string>

namespace iprox {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate(const PlanRequest& req) {
  if (!(req.rho > 0.0) || !std::isfinite(req.rho))
    throw std::invalid_argument("plan: rho must be positive and finite");
  if (req.k_search_max < 1) throw std::invalid_argument("plan: k_search_max must be >= 1");
  check_scenario_model(req.scenario, req.params.model);
}

double kappa(const BoundParams& p) { return std::sqrt(p.L) / (3.0 * std::sqrt(2.0 * p.model.A())); }

// sqrt(1 - gamma) and c = ln sqrt(1/(1-gamma)) for the linear model.
double root_decay(double gamma) { return std::sqrt(1.0 - gamma); }
double log_rate(double gamma) { return -0.5 * std::log1p(-gamma); }

// A with the linear-model (1 - gamma) factor folded in, as it enters the
// Case-1 conditions C(k) >= k sqrt(1-gamma) and D(k) >= k(k+1)/2 sqrt(1-gamma).
double effective_A(Scenario s, const ErrorModel& m) {
  return is_linear(s) ? m.A() * (1.0 - m.gamma()) : m.A();
}

// Relaxed constant inner count for scenarios 1-3 given the per-term budget r
// (C/k or 2D/(k(k+1))), clamped to >= 1.
double constant_relaxed_l(Scenario s, double r, const ErrorModel& m) {
  double l;
  if (is_linear(s))
    l = 2.0 * std::log(r) / std::log1p(-m.gamma());
  else
    l = std::pow(r, -2.0 / m.alpha());
  return std::max(1.0, l);
}

// Minimal k for which the error-free bound meets rho.
Count exact_min_k(Scenario s, const PlanRequest& req) {
  const double L = req.params.L;
  const double R0 = req.params.R0;
  double est = is_accelerated(s) ? std::sqrt(2.0 * L / req.rho) * R0 - 1.0
                                 : L * R0 * R0 / (2.0 * req.rho);
  Count k = std::max<Count>(1, static_cast<Count>(std::ceil(est)));
  auto ok = [&](Count kk) {
    const double kd = static_cast<double>(kk);
    const double b = is_accelerated(s) ? 2.0 * L * R0 * R0 / ((kd + 1.0) * (kd + 1.0))
                                       : L * R0 * R0 / (2.0 * kd);
    return b <= req.rho;
  };
  while (k > 1 && ok(k - 1)) --k;
  while (!ok(k)) ++k;
  return k;
}

// Smallest k in the Case-2 domain (positive C(k) or D(k)).
Count min_positive_margin_k(const PlanRequest& req) {
  const double L = req.params.L;
  const double R0 = req.params.R0;
  const bool acc = is_accelerated(req.scenario);
  double est = acc ? std::sqrt(2.0 * L / req.rho) * R0 - 1.0 : L * R0 * R0 / (2.0 * req.rho);
  Count k = std::max<Count>(1, static_cast<Count>(std::floor(est)));
  auto margin = [&](Count kk) {
    return acc ? d_of_k(static_cast<double>(kk), req) : c_of_k(static_cast<double>(kk), req);
  };
  while (k > 1 && margin(k - 1) > 0.0) --k;
  while (!(margin(k) > 0.0)) ++k;
  return k;
}

double relaxed_cost(Scenario s, Count k, const PlanRequest& req) {
  const double total = relaxed_inner_total(s, k, req);
  if (!std::isfinite(total)) return kInf;
  return req.costs.c_in * total + req.costs.c_out * static_cast<double>(k);
}

bool meets(const Schedule& sched, const PlanRequest& req) {
  return parametric_bound(req.scenario, static_cast<Count>(sched.size()), sched, req.params) <=
         req.rho;
}



// Integer allocation at fixed k by marginal analysis: from all ones (or,
// for very large totals, from just below the relaxed solution), repeatedly add the inner iteration with the
// largest drop in the weighted error sum until the bound holds. The error
// terms are convex in l, so each step stays on the optimal path.
Schedule allocate(const std::vector<double>& relaxed, const PlanRequest& req) {
  const BoundParams& p = req.params;
  const bool acc = is_accelerated(req.scenario);
  const double kd = static_cast<double>(relaxed.size());
  const double room = acc ? (kd + 1.0) * std::sqrt(req.rho / (2.0 * p.L)) : std::sqrt(2.0 * kd * req.rho / p.L);
  auto term = [&](std::size_t i, Count li) {
    const double w = acc ? static_cast<double>(i + 1) : 1.0;
    return w * std::sqrt(2.0 * epsilon_of_l(p.model, li) / p.L);
  };
  std::vector<Count> l(relaxed.size());
  double S = 0.0;
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item> heap;
  constexpr double kFromOnes = 4e6;
  const bool from_ones = std::accumulate(relaxed.begin(), relaxed.end(), 0.0) <= kFromOnes;
  for (std::size_t i = 0; i < l.size(); ++i) {
    l[i] = from_ones ? 1 : std::max<Count>(1, static_cast<Count>(std::floor(relaxed[i])) - 1);
    S += term(i, l[i]);
    heap.emplace(term(i, l[i]) - term(i, l[i] + 1), i);
  }
  for (;;) {
    if (p.R0 + 3.0 * S <= room && meets(Schedule(l), req)) return Schedule(std::move(l));
    const auto [gain, i] = heap.top();
    heap.pop();
    S -= gain;
    ++l[i];
    heap.emplace(term(i, l[i]) - term(i, l[i] + 1), i);
  }
}

}  // namespace

double c_of_k(double k, const PlanRequest& req) {
  const BoundParams& p = req.params;
  return kappa(p) * (std::sqrt(2.0 * k * req.rho / p.L) - p.R0);
}

double d_of_k(double k, const PlanRequest& req) {
  const BoundParams& p = req.params;
  return kappa(p) * (std::sqrt(req.rho / (2.0 * p.L)) * (k + 1.0) - p.R0);
}

double threshold(Scenario scenario, const BoundParams& params) {
  check_scenario_model(scenario, params.model);
  const double A = effective_A(scenario, params.model);
  const double root = std::sqrt(2.0 * params.L * A);
  if (!is_accelerated(scenario)) return 6.0 * root * params.R0;
  const double t = std::max(0.0, std::sqrt(12.0 * root * params.R0) - 3.0 * std::sqrt(A));
  return t * t;
}

std::optional<std::pair<double, double>> unconstrained_interval(const PlanRequest& req) {
  validate(req);
  const BoundParams& p = req.params;
  const double A = effective_A(req.scenario, p.model);
  if (!is_accelerated(req.scenario)) {
    const double a = std::sqrt(req.rho) / (6.0 * std::sqrt(A));
    const double disc = req.rho / (36.0 * A) - std::sqrt(p.L) * p.R0 / (3.0 * std::sqrt(2.0 * A));
    if (disc < 0.0) return std::nullopt;
    const double b = std::sqrt(disc);
    return std::make_pair((a - b) * (a - b), (a + b) * (a + b));
  }
  const double u = std::sqrt(req.rho) / (3.0 * std::sqrt(A));
  const double K = 0.25 * (1.0 + u) * (1.0 + u) - std::sqrt(2.0 * p.L) * p.R0 / (3.0 * std::sqrt(A));
  if (K < 0.0) return std::nullopt;
  const double mid = 0.5 * (u - 1.0);
  return std::make_pair(mid - std::sqrt(K), mid + std::sqrt(K));
}

Count n_of_k(Count k, double D, double gamma) {
  if (k < 1) throw std::invalid_argument("n_of_k: k must be >= 1");
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("n_of_k: gamma must lie in (0,1)");
  const double s = root_decay(gamma);
  auto T = [&](Count n) {
    const double nd = static_cast<double>(n);
    return nd * (2.0 * static_cast<double>(k) + 1.0 - nd) / 2.0 * s;
  };
  if (!(D > 0.0) || !(D < T(k)))
    throw std::invalid_argument("n_of_k: D = " + std::to_string(D) + " outside (0, " +
                                std::to_string(T(k)) + ")");
  // smallest n with D < T(n); T is increasing on 0..k
  Count lo = 1;
  Count hi = k;
  while (lo < hi) {
    const Count mid = lo + (hi - lo) / 2;
    if (D < T(mid))
      hi = mid;
    else
      lo = mid + 1;
  }
  return lo;
}

Count accel_linear_breakpoint(double lambda, Count k, double gamma) {
  if (!(lambda > 0.0)) throw std::invalid_argument("accel_linear_breakpoint: lambda must be positive");
  const double x = std::ceil(1.0 / (lambda * root_decay(gamma) * log_rate(gamma)));
  if (!(x < static_cast<double>(k + 1))) return k + 1;
  return std::max<Count>(1, static_cast<Count>(x));
}

double accel_linear_constraint(double lambda, Count k, double gamma) {
  const Count M = accel_linear_breakpoint(lambda, k, gamma);
  const double Md = static_cast<double>(M);
  return Md * (Md - 1.0) / 2.0 * root_decay(gamma) +
         static_cast<double>(k - M + 1) / (lambda * log_rate(gamma));
}

RelaxedSchedule relaxed_schedule(Scenario scenario, Count k, const PlanRequest& req) {
  validate(req);
  if (req.scenario != scenario)
    throw std::invalid_argument("relaxed_schedule: scenario differs from the request");
  if (k < 1) throw std::invalid_argument("relaxed_schedule: k must be >= 1");
  RelaxedSchedule out;
  const double kd = static_cast<double>(k);
  const ErrorModel& m = req.params.model;

  if (scenario != Scenario::AccelLinear) {
    const double margin = is_accelerated(scenario) ? d_of_k(kd, req) : c_of_k(kd, req);
    if (!(margin > 0.0)) return out;
    const double r = is_accelerated(scenario) ? 2.0 * margin / (kd * (kd + 1.0)) : margin / kd;
    out.l.assign(static_cast<std::size_t>(k), constant_relaxed_l(scenario, r, m));
    out.feasible = true;
    return out;
  }

  const double D = d_of_k(kd, req);
  if (!(D > 0.0)) return out;
  const double gamma = m.gamma();
  const double s = root_decay(gamma);
  const double c = log_rate(gamma);
  out.feasible = true;
  if (D >= kd * (kd + 1.0) / 2.0 * s) {
    out.l.assign(static_cast<std::size_t>(k), 1.0);
    out.breakpoint = k + 1;
    return out;
  }
  const Count n = n_of_k(k, D, gamma);
  const double nd = static_cast<double>(n);
  const double lc = (kd + 1.0 - nd) / (D - nd * (nd - 1.0) / 2.0 * s);
  out.multiplier = lc / c;
  out.breakpoint = n;
  out.l.resize(static_cast<std::size_t>(k));
  for (Count i = 1; i <= k; ++i) {
    const double li = i < n ? 1.0 : std::log(static_cast<double>(i) * lc) / c;
    out.l[static_cast<std::size_t>(i - 1)] = std::max(1.0, li);
  }
  return out;
}

double relaxed_inner_total(Scenario scenario, Count k, const PlanRequest& req) {
  validate(req);
  if (k < 1) throw std::invalid_argument("relaxed_inner_total: k must be >= 1");
  const double kd = static_cast<double>(k);
  const ErrorModel& m = req.params.model;

  if (scenario != Scenario::AccelLinear) {
    const double margin = is_accelerated(scenario) ? d_of_k(kd, req) : c_of_k(kd, req);
    if (!(margin > 0.0)) return kInf;
    const double r = is_accelerated(scenario) ? 2.0 * margin / (kd * (kd + 1.0)) : margin / kd;
    return kd * constant_relaxed_l(scenario, r, m);
  }

  const double D = d_of_k(kd, req);
  if (!(D > 0.0)) return kInf;
  const double s = root_decay(m.gamma());
  const double c = log_rate(m.gamma());
  if (D >= kd * (kd + 1.0) / 2.0 * s) return kd;
  const Count n = n_of_k(k, D, m.gamma());
  const double nd = static_cast<double>(n);
  const double lc = (kd + 1.0 - nd) / (D - nd * (nd - 1.0) / 2.0 * s);
  return (nd - 1.0) +
         ((kd - nd + 1.0) * std::log(lc) + std::lgamma(kd + 1.0) - std::lgamma(nd)) / c;
}

KSearchResult minimize_over_k_detailed(const std::function<double(double)>& objective,
                                       Count k_min, Count k_max) {
  if (k_min > k_max)
    throw std::invalid_argument("minimize_over_k: empty range [" + std::to_string(k_min) + ", " +
                                std::to_string(k_max) + "]");
  auto at = [&](Count k) { return objective(static_cast<double>(k)); };
  KSearchResult res;

  if (k_max - k_min <= 2) {
    res.k = k_min;
    for (Count k = k_min + 1; k <= k_max; ++k)
      if (at(k) < at(res.k)) res.k = k;
    res.k_hat = static_cast<double>(res.k);
    res.full_scan = true;
    return res;
  }

  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = static_cast<double>(k_min);
  double b = static_cast<double>(k_max);
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = objective(c);
  double fd = objective(d);
  for (int it = 0; it < 300 && b - a > 1e-9 * std::max(1.0, a); ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = objective(d);
    }
  }
  res.k_hat = 0.5 * (a + b);
  const Count kf = std::clamp(static_cast<Count>(std::floor(res.k_hat)), k_min, k_max);
  const Count kc = std::clamp(static_cast<Count>(std::ceil(res.k_hat)), k_min, k_max);
  res.k = at(kc) < at(kf) ? kc : kf;

  // unimodality check on a coarse grid (linear and geometric spacing)
  double best = at(res.k);
  const double tol = 1e-12 * std::abs(best);
  bool suspicious = false;
  const Count span = k_max - k_min;
  constexpr int kGrid = 512;
  for (int j = 0; j <= kGrid && !suspicious; ++j) {
    const Count lin = k_min + static_cast<Count>(static_cast<double>(span) * j / kGrid);
    const double frac = static_cast<double>(j) / kGrid;
    const Count geo = std::clamp(
        static_cast<Count>(std::llround(static_cast<double>(k_min) *
                                        std::pow(static_cast<double>(k_max) / static_cast<double>(k_min), frac))),
        k_min, k_max);
    if (at(lin) < best - tol || at(geo) < best - tol) suspicious = true;
  }
  if (suspicious) {
    res.full_scan = true;
    for (Count k = k_min; k <= k_max; ++k) {
      const double v = at(k);
      if (v < best) {
        best = v;
        res.k = k;
      }
    }
  }
  return res;
}

Count minimize_over_k(const std::function<double(double)>& objective, Count k_min, Count k_max) {
  return minimize_over_k_detailed(objective, k_min, k_max).k;
}

Schedule round_schedule(const std::vector<double>& relaxed, const PlanRequest& req) {
  validate(req);
  if (relaxed.empty()) throw std::invalid_argument("round_schedule: empty relaxed schedule");
  std::vector<Count> ceil_l(relaxed.size());
  for (std::size_t i = 0; i < relaxed.size(); ++i) {
    if (!(relaxed[i] >= 1.0) || !std::isfinite(relaxed[i]))
      throw std::invalid_argument("round_schedule: relaxed entries must be finite and >= 1");
    ceil_l[i] = static_cast<Count>(std::ceil(relaxed[i]));
  }
  // the relaxed point sits on the constraint; guard against roundoff in ceil
  Schedule current(ceil_l);
  for (int bump = 0; !meets(current, req); ++bump) {
    if (bump == 8) throw std::logic_error("round_schedule: ceiling of the relaxed schedule is infeasible");
    for (auto& l : ceil_l) ++l;
    current = Schedule(ceil_l);
  }
  std::vector<Count> out = current.counts();
  for (std::size_t i = 0; i < relaxed.size(); ++i) {
    const Count fl = std::max<Count>(1, static_cast<Count>(std::floor(relaxed[i])));
    if (fl >= out[i]) continue;
    const Count keep = out[i];
    out[i] = fl;
    if (!meets(Schedule(out), req)) {
      out[i] = keep;
      break;
    }
  }
  return Schedule(std::move(out));
}

std::optional<ConstantPlan> best_constant_schedule(const PlanRequest& req) {
  validate(req);
  const Scenario s = req.scenario;
  if (s == Scenario::AccelLinear)
    throw std::invalid_argument("best_constant_schedule: not defined for " + to_string(s));
  const BoundParams& p = req.params;
  const Count k0 = exact_min_k(s, req);
  if (k0 > req.k_search_max) return std::nullopt;

  auto feasible = [&](Count k, Count l) {
    return parametric_bound_constant(s, k, static_cast<double>(l), p) <= req.rho;
  };
  // smallest k in [k0, k_search_max] meeting the bound with constant l
  auto k_lower = [&](Count l) -> std::optional<Count> {
    const double e = 3.0 * std::sqrt(2.0 * epsilon_of_l(p.model, l) / p.L);
    double est;
    if (!is_accelerated(s)) {
      // e t^2 - sqrt(2 rho / L) t + R0 <= 0 in t = sqrt(k)
      const double q = std::sqrt(2.0 * req.rho / p.L);
      const double disc = q * q - 4.0 * e * p.R0;
      if (disc < 0.0) return std::nullopt;
      const double t = 2.0 * p.R0 / (q + std::sqrt(disc));
      est = t * t;
    } else {
      // (e/2) k^2 + (e/2 - c) k + (R0 - c) <= 0, c = sqrt(rho / (2L))
      const double c = std::sqrt(req.rho / (2.0 * p.L));
      const double qa = 0.5 * e;
      const double qb = 0.5 * e - c;
      const double qc = p.R0 - c;
      const double disc = qb * qb - 4.0 * qa * qc;
      if (disc < 0.0) return std::nullopt;
      const double sq = std::sqrt(disc);
      // smaller root without cancellation
      est = qb < 0.0 ? 2.0 * qc / (-qb + sq) : (-qb - sq) / (2.0 * qa);
    }
    if (!std::isfinite(est)) return std::nullopt;
    Count k = std::clamp<Count>(static_cast<Count>(std::ceil(std::max(est, 1.0))) - 2, k0,
                                req.k_search_max);
    for (int step = 0; step < 6 && k <= req.k_search_max; ++step, ++k)
      if (feasible(k, l)) {
        while (k > k0 && feasible(k - 1, l)) --k;
        return k;
      }
    return std::nullopt;
  };

  const double cin = req.costs.c_in;
  const double cout = req.costs.c_out;
  std::optional<ConstantPlan> best;
  constexpr Count kMaxL = 10'000'000;
  for (Count l = 1; l <= kMaxL; ++l) {
    const double lower = static_cast<double>(k0) * (cin * static_cast<double>(l) + cout);
    if (best && cin > 0.0 && lower > best->cost) break;
    const auto k = k_lower(l);
    if (!k) continue;
    const double cost = static_cast<double>(*k) * (cin * static_cast<double>(l) + cout);
    if (!best || cost < best->cost) best = ConstantPlan{*k, l, cost};
    if (cin == 0.0 && *k == k0) break;
  }
  return best;
}

Plan plan(const PlanRequest& req) {
  validate(req);
  const Scenario s = req.scenario;
  Plan out;
  out.scenario = s;

  std::optional<ConstantPlan> constant;
  if (s != Scenario::AccelLinear) constant = best_constant_schedule(req);
  if (constant) {
    out.constant_k = constant->k;
    out.constant_l = constant->l;
    out.constant_cost = constant->cost;
  }

  std::optional<std::pair<double, double>> interval;
  if (req.rho >= threshold(s, req.params)) {
    interval = unconstrained_interval(req);
    if (interval) {
      const Count lo = std::max<Count>(1, static_cast<Count>(std::ceil(interval->first)));
      const Count hi = std::min<Count>(req.k_search_max, static_cast<Count>(std::floor(interval->second)));
      for (Count k = lo; k <= hi && k <= lo + 2; ++k) {
        const Schedule ones = Schedule::constant(k, 1);
        if (!meets(ones, req)) continue;
        out.plan_case = PlanCase::Unconstrained;
        out.k_star = k;
        out.schedule = ones;
        out.predicted_bound = parametric_bound(s, k, ones, req.params);
        out.predicted_cost = schedule_cost(ones, req.costs);
        return out;
      }
    }
    // no integer k carries the all-ones schedule; every k is constrained
  }

  const Count k_min = min_positive_margin_k(req);
  if (k_min > req.k_search_max)
    throw PlanError("plan: no feasible k <= " + std::to_string(req.k_search_max) + " for rho = " +
                        std::to_string(req.rho),
                    interval);

  std::function<double(double)> objective;
  if (s == Scenario::AccelLinear) {
    objective = [&](double k) {
      const Count lo = static_cast<Count>(std::floor(k));
      const double flo = relaxed_cost(s, lo, req);
      if (static_cast<double>(lo) == k) return flo;
      const double fhi = relaxed_cost(s, lo + 1, req);
      const double w = k - static_cast<double>(lo);
      return (1.0 - w) * flo + w * fhi;
    };
  } else {
    const double kmin_real = static_cast<double>(k_min);
    objective = [&, kmin_real](double k) {
      k = std::max(k, kmin_real);
      const double margin = is_accelerated(s) ? d_of_k(k, req) : c_of_k(k, req);
      if (!(margin > 0.0)) return kInf;
      const double r = is_accelerated(s) ? 2.0 * margin / (k * (k + 1.0)) : margin / k;
      return k * (req.costs.c_in * constant_relaxed_l(s, r, req.params.model) + req.costs.c_out);
    };
  }
  const KSearchResult found = minimize_over_k_detailed(objective, k_min, req.k_search_max);
  const RelaxedSchedule relaxed = relaxed_schedule(s, found.k, req);
  if (!relaxed.feasible) throw std::logic_error("plan: relaxed schedule infeasible at the selected k");

  out.plan_case = PlanCase::Constrained;
  out.relaxed_k = found.k_hat;
  out.relaxed_schedule = relaxed.l;
  Schedule rounded = round_schedule(relaxed.l, req);
  Schedule allocated = allocate(relaxed.l, req);
  if (schedule_cost(allocated, req.costs) < schedule_cost(rounded, req.costs)) rounded = std::move(allocated);
  if (constant && constant->cost <= schedule_cost(rounded, req.costs)) {
    // the summed bound can miss the closed form by roundoff at the boundary
    Schedule flat = Schedule::constant(constant->k, constant->l);
    if (!meets(flat, req))
      flat = allocate(std::vector<double>(static_cast<std::size_t>(constant->k), static_cast<double>(constant->l)), req);
    if (schedule_cost(flat, req.costs) <= schedule_cost(rounded, req.costs)) rounded = std::move(flat);
  }

  out.k_star = static_cast<Count>(rounded.size());
  out.schedule = std::move(rounded);
  out.predicted_bound = parametric_bound(s, out.k_star, out.schedule, req.params);
  out.predicted_cost = schedule_cost(out.schedule, req.costs);
  if (!(out.predicted_bound <= req.rho)) throw std::logic_error("plan: rounded schedule violates the bound");
  return out;
}

}  // namespace iprox
