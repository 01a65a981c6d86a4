#include "iprox/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace iprox {

double prox_objective(const ProxOracle& oracle, const Vector& z, double L, const Vector& x) {
  return 0.5 * L * (x - z).squaredNorm() + oracle.h(x);
}

double prox_gap(const ProxOracle& oracle, const Vector& z, double L, const Vector& x,
                const Vector& p) {
  const Vector d = x - p;
  const double quad = 0.5 * L * (d.squaredNorm() + 2.0 * d.dot(p - z));
  return quad + (oracle.h(x) - oracle.h(p));
}

ProxResult prox_l1_exact(const Vector& z, double L, double lambda) {
  if (!(L > 0.0)) throw std::invalid_argument("prox_l1_exact: L must be positive");
  if (!(lambda >= 0.0)) throw std::invalid_argument("prox_l1_exact: lambda must be >= 0");
  const double thr = lambda / L;
  ProxResult r;
  r.point = z.unaryExpr([thr](double v) {
    if (v > thr) return v - thr;
    if (v < -thr) return v + thr;
    return 0.0;
  });
  r.inner_used = 0;
  r.epsilon_bound = 0.0;
  return r;
}

L1Prox::L1Prox(double lambda) : lambda_(lambda) {
  if (!(lambda_ >= 0.0)) throw std::invalid_argument("L1Prox: lambda must be >= 0");
}

ProxResult L1Prox::prox(const Vector& z, double L, Count, const Vector*) const {
  return prox_l1_exact(z, L, lambda_);
}

double L1Prox::h(const Vector& x) const { return lambda_ * x.lpNorm<1>(); }

namespace {

Index square_side(Index length) {
  const auto side = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(length))));
  if (side < 1 || side * side != length)
    throw std::invalid_argument("TV prox: vector length " + std::to_string(length) +
                                " is not a square image");
  return side;
}

ProxResult tv_dual_iterate(const ImageGradient& grad, const Vector& z, double L, double lambda,
                           Count l, const Vector* warm) {
  if (!(L > 0.0)) throw std::invalid_argument("TV prox: L must be positive");
  if (l < 0) throw std::invalid_argument("TV prox: inner count must be >= 0");
  const Index n2 = grad.pixels();
  if (z.size() != n2) throw std::invalid_argument("TV prox: image size mismatch");

  ProxResult r;
  r.inner_used = l;
  if (lambda == 0.0) {
    r.point = z;
    r.dual = Vector::Zero(2 * n2);
    return r;
  }

  const double t = lambda / L;
  const double step = 1.0 / (8.0 * t);
  Vector p = Vector::Zero(2 * n2);
  if (warm != nullptr) {
    if (warm->size() != 2 * n2) throw std::invalid_argument("TV prox: warm start size mismatch");
    p = *warm;
  }

  for (Count it = 0; it < l; ++it) {
    const Vector x = z + t * grad.divergence(p);
    const Vector g = grad.apply(x);
    for (Index idx = 0; idx < n2; ++idx) {
      const double qx = p[idx] + step * g[idx];
      const double qy = p[n2 + idx] + step * g[n2 + idx];
      const double scale = std::max(1.0, std::hypot(qx, qy));
      p[idx] = qx / scale;
      p[n2 + idx] = qy / scale;
    }
  }
  r.point = z + t * grad.divergence(p);
  r.dual = std::move(p);
  return r;
}

ProxResult graph_dual_iterate(const EdgeIncidence& B, double norm_sq, const Vector& z, double L,
                              double lambda, Count l, const Vector* warm) {
  if (!(L > 0.0)) throw std::invalid_argument("graph prox: L must be positive");
  if (l < 0) throw std::invalid_argument("graph prox: inner count must be >= 0");
  if (z.size() != B.vertices())
    throw std::invalid_argument("graph prox: z has " + std::to_string(z.size()) +
                                " entries but the graph has " + std::to_string(B.vertices()) +
                                " vertices");
  ProxResult r;
  r.inner_used = l;
  if (lambda == 0.0 || B.num_edges() == 0 || norm_sq == 0.0) {
    r.point = z;
    r.dual = Vector::Zero(B.num_edges());
    return r;
  }

  const double t = lambda / L;
  Vector v = Vector::Zero(B.num_edges());
  if (warm != nullptr) {
    if (warm->size() != B.num_edges())
      throw std::invalid_argument("graph prox: warm start size mismatch");
    v = *warm;
  }
  for (Count it = 0; it < l; ++it) {
    const Vector x = z - B.apply_adjoint(v);
    v = (v + B.apply(x) / norm_sq).cwiseMax(-t).cwiseMin(t);
  }
  r.point = z - B.apply_adjoint(v);
  r.dual = std::move(v);
  return r;
}

double incidence_norm_sq(const EdgeIncidence& B) {
  if (B.num_edges() == 0) return 0.0;
  const double est = power_iteration(
      B.vertices(), [&B](const Vector& x) { return B.apply_adjoint(B.apply(x)); }, 50);
  // Power iteration approaches from below; keep the dual step at most 1/||B||^2.
  return 1.01 * est;
}

}  // namespace

ProxResult prox_tv_dual(const Vector& z, double L, double lambda, Count l, const Vector* warm) {
  const ImageGradient grad(square_side(z.size()));
  return tv_dual_iterate(grad, z, L, lambda, l, warm);
}

TvDualProx::TvDualProx(Index side, double lambda) : gradient_(side), lambda_(lambda) {
  if (!(lambda_ >= 0.0)) throw std::invalid_argument("TvDualProx: lambda must be >= 0");
}

ProxResult TvDualProx::prox(const Vector& z, double L, Count l, const Vector* warm) const {
  square_side(z.size());
  return tv_dual_iterate(gradient_, z, L, lambda_, l, warm);
}

double TvDualProx::h(const Vector& x) const { return lambda_ * gradient_.total_variation(x); }

GraphL1DualProx::GraphL1DualProx(EdgeIncidence incidence, double lambda)
    : incidence_(std::move(incidence)), lambda_(lambda), norm_sq_(incidence_norm_sq(incidence_)) {
  if (!(lambda_ >= 0.0)) throw std::invalid_argument("GraphL1DualProx: lambda must be >= 0");
}

ProxResult GraphL1DualProx::prox(const Vector& z, double L, Count l, const Vector* warm) const {
  return graph_dual_iterate(incidence_, norm_sq_, z, L, lambda_, l, warm);
}

double GraphL1DualProx::h(const Vector& x) const {
  return lambda_ * incidence_.apply(x).lpNorm<1>();
}

ProxResult prox_graph_l1_dual(const Vector& z, double L, double lambda,
                              const EdgeIncidence& incidence, Count l, const Vector* warm) {
  return graph_dual_iterate(incidence, incidence_norm_sq(incidence), z, L, lambda, l, warm);
}

ProxResult prox_synthetic(const Vector& z, double L, const ProxOracle& exact, double target_eps) {
  if (!(target_eps >= 0.0)) throw std::invalid_argument("prox_synthetic: target_eps must be >= 0");
  if (!exact.exact()) throw std::invalid_argument("prox_synthetic: oracle is not exact");

  const Vector p = exact.prox(z, L, 1, nullptr).point;
  ProxResult r;
  r.inner_used = 0;
  r.epsilon_bound = target_eps;
  if (target_eps == 0.0) {
    r.point = p;
    return r;
  }

  Vector u = z - p;
  const double un = u.norm();
  if (un > 0.0) {
    u /= un;
  } else {
    u = Vector::Zero(z.size());
    u[0] = 1.0;
  }

  // gap(t) is convex in t with gap(0) = 0 and curvature at least L, so it is
  // strictly increasing on t >= 0.
  const double up = u.dot(p - z);
  const double hp = exact.h(p);
  auto gap = [&](double t) {
    return 0.5 * L * t * (t + 2.0 * up) + (exact.h(p + t * u) - hp);
  };

  double lo = 0.0;
  double hi = std::sqrt(2.0 * target_eps / L);
  while (gap(hi) < target_eps) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw std::runtime_error("prox_synthetic: bracketing failed");
  }
  double best_t = hi;
  double best_err = std::abs(gap(hi) - target_eps);
  for (int it = 0; it < 200 && best_err > 1e-14 * target_eps; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double g = gap(mid);
    const double err = std::abs(g - target_eps);
    if (err < best_err) {
      best_err = err;
      best_t = mid;
    }
    if (g < target_eps)
      lo = mid;
    else
      hi = mid;
  }
  r.point = p + best_t * u;
  return r;
}

ModeledSyntheticProx::ModeledSyntheticProx(std::shared_ptr<const ProxOracle> exact, ErrorModel model)
    : exact_(std::move(exact)), model_(model) {
  if (!exact_ || !exact_->exact())
    throw std::invalid_argument("ModeledSyntheticProx: needs an exact oracle");
}

ProxResult ModeledSyntheticProx::prox(const Vector& z, double L, Count l, const Vector*) const {
  ProxResult r = prox_synthetic(z, L, *exact_, epsilon_of_l(model_, std::max<Count>(l, 1)));
  r.inner_used = l;
  return r;
}

LongRunProx::LongRunProx(std::shared_ptr<const ProxOracle> inner, Count iterations)
    : inner_(std::move(inner)), iterations_(iterations) {
  if (!inner_) throw std::invalid_argument("LongRunProx: missing inner oracle");
  if (iterations_ < 1) throw std::invalid_argument("LongRunProx: iterations must be >= 1");
}

ProxResult LongRunProx::prox(const Vector& z, double L, Count, const Vector* warm) const {
  ProxResult r = inner_->prox(z, L, iterations_, warm);
  r.inner_used = 0;
  return r;
}

namespace {

// Nearest-rank percentile: at least `q` of the values are <= the result.
double upper_percentile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size())));
  return values[std::clamp<std::size_t>(rank, 1, values.size()) - 1];
}

}  // namespace

ErrorModel calibrate_error_model(const ProxOracle& oracle, const ProxOracle& exact,
                                 const std::vector<ProxProbe>& probes, RateFamily family,
                                 const std::vector<Count>& l_values) {
  if (probes.size() < 2) throw std::invalid_argument("calibrate_error_model: need >= 2 probes");
  if (l_values.empty()) throw std::invalid_argument("calibrate_error_model: no inner counts");

  std::vector<double> ls;
  std::vector<double> gaps;
  for (const auto& probe : probes) {
    const Vector p = exact.prox(probe.z, probe.L, 1, nullptr).point;
    for (Count l : l_values) {
      if (l < 1) throw std::invalid_argument("calibrate_error_model: inner counts must be >= 1");
      const Vector x = oracle.prox(probe.z, probe.L, l, nullptr).point;
      const double gap = prox_gap(oracle, probe.z, probe.L, x, p);
      if (gap > 0.0 && std::isfinite(gap)) {
        ls.push_back(static_cast<double>(l));
        gaps.push_back(gap);
      }
    }
  }
  if (gaps.size() < 2)
    throw std::runtime_error("calibrate_error_model: no positive gaps to fit (exact oracle?)");

  const double n = static_cast<double>(ls.size());
  double mean_l = 0.0;
  for (double l : ls) mean_l += l;
  mean_l /= n;
  double var_l = 0.0;
  for (double l : ls) var_l += (l - mean_l) * (l - mean_l);
  if (var_l == 0.0) throw std::runtime_error("calibrate_error_model: inner counts do not vary");

  std::vector<double> scaled(gaps.size());
  if (family.kind == ErrorModel::Kind::Sublinear) {
    if (!(family.alpha > 0.0)) throw std::invalid_argument("calibrate_error_model: alpha <= 0");
    for (std::size_t i = 0; i < gaps.size(); ++i)
      scaled[i] = gaps[i] * std::pow(ls[i], family.alpha);
    return ErrorModel::sublinear(upper_percentile(scaled, 0.95), family.alpha);
  }

  // log gap = a + b l, gamma = 1 - exp(b)
  double mean_y = 0.0;
  for (double g : gaps) mean_y += std::log(g);
  mean_y /= n;
  double cov = 0.0;
  for (std::size_t i = 0; i < gaps.size(); ++i)
    cov += (ls[i] - mean_l) * (std::log(gaps[i]) - mean_y);
  const double slope = cov / var_l;
  if (!(slope < 0.0)) throw std::runtime_error("calibrate_error_model: gaps do not decay with l");
  const double gamma = std::clamp(-std::expm1(slope), 1e-12, 1.0 - 1e-12);
  for (std::size_t i = 0; i < gaps.size(); ++i)
    scaled[i] = gaps[i] / std::pow(1.0 - gamma, ls[i]);
  return ErrorModel::linear(upper_percentile(scaled, 0.95), gamma);
}

}  // namespace iprox
