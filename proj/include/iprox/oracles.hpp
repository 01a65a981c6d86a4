#pragma once

// Proximity-operator oracles. Every oracle approximates
//
//        prox_{h/L}(z) = argmin_x  L/2 ||x - z||^2 + h(x)
//
// and an approximate point x has prox-objective gap
//
//        eps = L/2 ||x - z||^2 + h(x) - min_x { L/2 ||x - z||^2 + h(x) }.

#include "iprox/core.hpp"
#include "iprox/operators.hpp"

#include <memory>
#include <optional>

namespace iprox {

struct ProxResult {
  Vector point;
  Count inner_used = 0;
  // Certified upper bound on the prox-objective gap, when the oracle knows it.
  std::optional<double> epsilon_bound;
  // Final dual iterate for dual solvers; empty otherwise. Pass it back as the
  // warm start of a later call.
  Vector dual;
};

class ProxOracle {
public:
  virtual ~ProxOracle() = default;

  // Approximate prox after l inner iterations. Exact oracles ignore l.
  virtual ProxResult prox(const Vector& z, double L, Count l,
                          const Vector* warm = nullptr) const = 0;

  // The nonsmooth term h.
  virtual double h(const Vector& x) const = 0;

  virtual bool exact() const { return false; }
};

// L/2 ||x - z||^2 + h(x)
double prox_objective(const ProxOracle& oracle, const Vector& z, double L, const Vector& x);

// Gap of x against the reference point p (typically the exact prox point).
// Computed as a difference of increments so that small gaps are not lost to
// cancellation against the full prox objective.
double prox_gap(const ProxOracle& oracle, const Vector& z, double L, const Vector& x,
                const Vector& p);

ProxResult prox_l1_exact(const Vector& z, double L, double lambda);

// h(x) = lambda ||x||_1, closed-form soft thresholding.
class L1Prox final : public ProxOracle {
public:
  explicit L1Prox(double lambda);

  ProxResult prox(const Vector& z, double L, Count l, const Vector* warm) const override;
  double h(const Vector& x) const override;
  bool exact() const override { return true; }

  double lambda() const { return lambda_; }

private:
  double lambda_;
};

// h(x) = lambda * TV(x) on a square image, solved by projected gradient on
// the dual: x = z + t div p, p_ij in the unit ball, t = lambda / L, step 1/(8t).
ProxResult prox_tv_dual(const Vector& z, double L, double lambda, Count l,
                        const Vector* warm = nullptr);

class TvDualProx final : public ProxOracle {
public:
  TvDualProx(Index side, double lambda);

  ProxResult prox(const Vector& z, double L, Count l, const Vector* warm) const override;
  double h(const Vector& x) const override;

  Index side() const { return gradient_.side(); }
  double lambda() const { return lambda_; }

private:
  ImageGradient gradient_;
  double lambda_;
};

// h(x) = lambda ||B x||_1 for an edge-incidence B, solved by projected
// gradient on the dual with the scaled variable v in [-t, t]^E, t = lambda/L:
// x = z - B^T v, v <- clip(v + B x / ||B||^2, -t, t).
class GraphL1DualProx final : public ProxOracle {
public:
  GraphL1DualProx(EdgeIncidence incidence, double lambda);

  ProxResult prox(const Vector& z, double L, Count l, const Vector* warm) const override;
  double h(const Vector& x) const override;

  const EdgeIncidence& incidence() const { return incidence_; }
  double lambda() const { return lambda_; }
  // ||B||^2_op as estimated at construction.
  double operator_norm_sq() const { return norm_sq_; }

private:
  EdgeIncidence incidence_;
  double lambda_;
  double norm_sq_;
};

ProxResult prox_graph_l1_dual(const Vector& z, double L, double lambda,
                              const EdgeIncidence& incidence, Count l,
                              const Vector* warm = nullptr);

// Returns a point whose prox-objective gap is exactly target_eps (to ~1e-12
// relative), found by bisection along a ray from the exact prox point.
// Requires exact.exact().
ProxResult prox_synthetic(const Vector& z, double L, const ProxOracle& exact, double target_eps);

// Delivers eps(l) from an error model through prox_synthetic. Used to drive
// the solvers with exactly known errors.
class ModeledSyntheticProx final : public ProxOracle {
public:
  ModeledSyntheticProx(std::shared_ptr<const ProxOracle> exact, ErrorModel model);

  ProxResult prox(const Vector& z, double L, Count l, const Vector* warm) const override;
  double h(const Vector& x) const override { return exact_->h(x); }

  const ErrorModel& model() const { return model_; }

private:
  std::shared_ptr<const ProxOracle> exact_;
  ErrorModel model_;
};

// Stands in for an exact oracle by running an iterative oracle for a fixed,
// large number of inner iterations.
class LongRunProx final : public ProxOracle {
public:
  LongRunProx(std::shared_ptr<const ProxOracle> inner, Count iterations);

  ProxResult prox(const Vector& z, double L, Count l, const Vector* warm) const override;
  double h(const Vector& x) const override { return inner_->h(x); }
  bool exact() const override { return true; }

private:
  std::shared_ptr<const ProxOracle> inner_;
  Count iterations_;
};

struct ProxProbe {
  Vector z;
  double L = 1.0;
};

struct RateFamily {
  ErrorModel::Kind kind = ErrorModel::Kind::Sublinear;
  // Fixed alpha for the sublinear family; ignored for the linear family.
  double alpha = 1.0;
};

// Fits an ErrorModel to observed prox gaps of `oracle` (against `exact`) over
// the inner counts in `l_values`, then inflates A so that the model bounds at
// least 95% of the observations.
ErrorModel calibrate_error_model(const ProxOracle& oracle, const ProxOracle& exact,
                                 const std::vector<ProxProbe>& probes, RateFamily family,
                                 const std::vector<Count>& l_values);

}  // namespace iprox
