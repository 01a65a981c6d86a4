#pragma once

// Inner-count sources: constant, planned, convergent-rate and the adaptive
// SIP controller.

#include "iprox/solvers.hpp"

#include <memory>

namespace iprox {

class ConstantSource final : public InnerCountSource {
public:
  explicit ConstantSource(Count l);
  Count next_l(Count, const SolverState&) override { return l_; }

private:
  Count l_;
};

// Follows plan.schedule and refuses to go past k*.
class PlannedSource final : public InnerCountSource {
public:
  explicit PlannedSource(Schedule schedule);
  Count next_l(Count k, const SolverState&) override;

private:
  Schedule schedule_;
};

// Targets eps_k = scale / k^(2+delta) (basic) or scale / k^(4+delta)
// (accelerated) and asks for the smallest l reaching it under the model.
class ConvergentSource final : public InnerCountSource {
public:
  ConvergentSource(Scheme scheme, ErrorModel model, double delta, std::optional<double> scale = {});
  Count next_l(Count k, const SolverState&) override;

  double target_epsilon(Count k) const;

private:
  Scheme scheme_;
  ErrorModel model_;
  double delta_;
  double scale_;
};

// Starts at l = 1 and adds one inner iteration whenever an outer step
// decreases f by less than tol * f.
class SipSource final : public InnerCountSource {
public:
  explicit SipSource(double tol);
  Count next_l(Count, const SolverState&) override { return current_l_; }
  void observe(Count k, double f_before, double f_after) override;

  Count current_l() const { return current_l_; }
  double tol() const { return tol_; }

private:
  Count current_l_ = 1;
  double tol_;
};

// Parses "const:L", "sip:TOL", "conv:DELTA" or "conv:DELTA:SCALE".
struct StrategySpec {
  enum class Kind { Constant, Sip, Convergent } kind = Kind::Constant;
  Count l = 1;
  double tol = 0.0;
  double delta = 0.0;
  std::optional<double> scale;
  std::string name;
};

StrategySpec parse_strategy(const std::string& text);

// The convergent strategy needs the error model it inverts.
std::unique_ptr<InnerCountSource> make_source(const StrategySpec& spec, Scheme scheme,
                                              const ErrorModel& model);

}  // namespace iprox
