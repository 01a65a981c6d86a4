#include "iprox/strategies.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace iprox {

ConstantSource::ConstantSource(Count l) : l_(l) {
  if (l < 1) throw std::invalid_argument("ConstantSource: l must be >= 1");
}

PlannedSource::PlannedSource(Schedule schedule) : schedule_(std::move(schedule)) {
  if (schedule_.size() == 0) throw std::invalid_argument("PlannedSource: empty schedule");
}

Count PlannedSource::next_l(Count k, const SolverState&) {
  if (k < 1 || static_cast<std::size_t>(k) > schedule_.size())
    throw std::out_of_range("PlannedSource: plan exhausted at k = " + std::to_string(k) +
                            " (k* = " + std::to_string(schedule_.size()) + ")");
  return schedule_[static_cast<std::size_t>(k - 1)];
}

ConvergentSource::ConvergentSource(Scheme scheme, ErrorModel model, double delta,
                                   std::optional<double> scale)
    : scheme_(scheme), model_(model), delta_(delta), scale_(scale.value_or(model.A())) {
  if (!(delta > 0.0)) throw std::invalid_argument("ConvergentSource: delta must be positive");
  if (!(scale_ > 0.0)) throw std::invalid_argument("ConvergentSource: scale must be positive");
}

double ConvergentSource::target_epsilon(Count k) const {
  const double p = (scheme_ == Scheme::Basic ? 2.0 : 4.0) + delta_;
  return scale_ / std::pow(static_cast<double>(k), p);
}

Count ConvergentSource::next_l(Count k, const SolverState&) {
  const double eps = target_epsilon(k);
  if (!(eps > 0.0)) return std::numeric_limits<Count>::max() / 4;
  return l_of_epsilon(model_, eps);
}

SipSource::SipSource(double tol) : tol_(tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("SipSource: tol must be positive");
}

void SipSource::observe(Count, double f_before, double f_after) {
  const double decrease = f_before - f_after;
  const bool stalled =
      f_before > 0.0 ? decrease < tol_ * f_before : decrease < tol_ * std::abs(f_before) + 1e-30;
  if (stalled) ++current_l_;
}

namespace {

double parse_number(const std::string& text, const std::string& whole) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size())
    throw std::invalid_argument("strategy '" + whole + "': bad number '" + text + "'");
  return v;
}

}  // namespace

StrategySpec parse_strategy(const std::string& text) {
  StrategySpec spec;
  spec.name = text;
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("strategy '" + text + "': expected const:L, sip:TOL or conv:DELTA[:SCALE]");
  const std::string kind = text.substr(0, colon);
  const std::string rest = text.substr(colon + 1);
  if (kind == "const") {
    const double l = parse_number(rest, text);
    if (l < 1.0 || l != std::floor(l))
      throw std::invalid_argument("strategy '" + text + "': l must be an integer >= 1");
    spec.kind = StrategySpec::Kind::Constant;
    spec.l = static_cast<Count>(l);
  } else if (kind == "sip") {
    spec.kind = StrategySpec::Kind::Sip;
    spec.tol = parse_number(rest, text);
    if (!(spec.tol > 0.0)) throw std::invalid_argument("strategy '" + text + "': tol must be positive");
  } else if (kind == "conv") {
    spec.kind = StrategySpec::Kind::Convergent;
    const auto second = rest.find(':');
    spec.delta = parse_number(rest.substr(0, second), text);
    if (second != std::string::npos) spec.scale = parse_number(rest.substr(second + 1), text);
    if (!(spec.delta > 0.0)) throw std::invalid_argument("strategy '" + text + "': delta must be positive");
  } else {
    throw std::invalid_argument("strategy '" + text + "': unknown kind '" + kind + "'");
  }
  return spec;
}

std::unique_ptr<InnerCountSource> make_source(const StrategySpec& spec, Scheme scheme,
                                              const ErrorModel& model) {
  switch (spec.kind) {
    case StrategySpec::Kind::Constant:
      return std::make_unique<ConstantSource>(spec.l);
    case StrategySpec::Kind::Sip:
      return std::make_unique<SipSource>(spec.tol);
    case StrategySpec::Kind::Convergent:
      return std::make_unique<ConvergentSource>(scheme, model, spec.delta, spec.scale);
  }
  throw std::logic_error("make_source: unhandled strategy kind");
}

}  // namespace iprox
