#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "iprox/bench.hpp"
#include "iprox/planner.hpp"
#include "iprox/strategies.hpp"
#include "test_util.hpp"

using namespace iprox;

namespace {

const SolverState& no_state() {
  static const SolverState s{};
  return s;
}

}  // namespace

TEST_CASE("constant source") {
  ConstantSource three(3);
  for (Count k : {1, 2, 50, 100000}) CHECK(three.next_l(k, no_state()) == 3);
  const BenchProblem b = build_lasso_problem(LassoInstance{});
  const Trace t = run(*b.problem, *b.oracle, Scheme::Basic, three, CostModel(1, 1), StopRule::outer(5), b.x0);
  CHECK(t.realized_schedule() == Schedule::constant(5, 3));
  for (std::size_t i = 0; i < t.records.size(); ++i)
    CHECK(t.records[i].cum_cost == static_cast<double>(i + 1) * 4.0);
  const Trace u = run(*b.problem, *b.oracle, Scheme::Accelerated, three, CostModel(0.5, 2), StopRule::outer(7), b.x0);
  CHECK(u.records.back().cum_cost == doctest::Approx(7 * (0.5 * 3 + 2)).epsilon(1e-15));
  CHECK_THROWS_AS(ConstantSource(0), std::invalid_argument);
}

TEST_CASE("planned source follows the plan and stops at k*") {
  PlanRequest r;
  r.scenario = Scenario::BasicSublinear;
  r.params = BoundParams(1.0, 1.0, ErrorModel::sublinear(0.01, 1.0));
  r.rho = 0.05;
  const Plan p = plan(r);
  PlannedSource src(p.schedule);
  for (Count k = 1; k <= p.k_star; ++k) CHECK(src.next_l(k, no_state()) == p.schedule[static_cast<std::size_t>(k - 1)]);
  CHECK_THROWS_AS(src.next_l(p.k_star + 1, no_state()), std::out_of_range);

  PlanRequest r4;
  r4.scenario = Scenario::AccelLinear;
  r4.params = BoundParams(1.0, 1.0, ErrorModel::linear(1e-6, 0.5));
  r4.rho = 0.005;
  const Plan p4 = plan(r4);
  REQUIRE(p4.plan_case == PlanCase::Constrained);
  const auto& l = p4.schedule.counts();
  CHECK(l[0] == 1);
  CHECK(l[1] == 1);
  CHECK(l.back() > 2);
  for (std::size_t i = 1; i < l.size(); ++i) CHECK(l[i] >= l[i - 1]);
}

TEST_CASE("convergent source examples") {
  ConvergentSource basic(Scheme::Basic, ErrorModel::sublinear(1.0, 1.0), 1.0, 1.0);
  for (Count k = 1; k <= 60; ++k) CHECK(basic.next_l(k, no_state()) == k * k * k);
  ConvergentSource acc(Scheme::Accelerated, ErrorModel::linear(1.0, 0.5), 0.1, 1.0);
  for (Count k = 2; k <= 500; ++k) {
    const double want = std::ceil(4.1 * std::log(static_cast<double>(k)) / std::log(2.0));
    CHECK(acc.next_l(k, no_state()) == static_cast<Count>(want));
  }
  for (double A : {0.3, 1.0, 7.0}) {
    ConvergentSource s(Scheme::Basic, ErrorModel::sublinear(A, 1.5), 0.5);
    CHECK(s.next_l(1, no_state()) == 1);
    ConvergentSource big(Scheme::Accelerated, ErrorModel::linear(A, 0.2), 0.5, 2.0 * A);
    CHECK(big.next_l(1, no_state()) == 1);
  }
  CHECK_THROWS_AS(ConvergentSource(Scheme::Basic, ErrorModel::sublinear(1, 1), 0.0), std::invalid_argument);
}

TEST_CASE("convergent targets are summable with the accelerated weights") {
  ConvergentSource fast(Scheme::Accelerated, ErrorModel::sublinear(1.0, 1.0), 3.0, 1.0);
  double s = 0.0, at_half = 0.0;
  for (Count k = 1; k <= 100000; ++k) {
    s += static_cast<double>(k) * std::sqrt(fast.target_epsilon(k));
    if (k == 50000) at_half = s;
  }
  CHECK(s - at_half < 1e-6);
  // delta = 1: tail ~ 2 / sqrt(N); partial sums stay below 1 + 2/delta
  ConvergentSource slow(Scheme::Accelerated, ErrorModel::sublinear(1.0, 1.0), 1.0, 1.0);
  double t = 0.0, prev_gap = std::numeric_limits<double>::infinity(), mark = 0.0;
  for (Count k = 1; k <= 100000; ++k) {
    t += static_cast<double>(k) * std::sqrt(slow.target_epsilon(k));
    if (k % 10000 == 0) {
      if (mark > 0.0) {
        CHECK(t - mark < prev_gap);
        prev_gap = t - mark;
      }
      mark = t;
    }
  }
  CHECK(t < 3.0);
}

TEST_CASE("SIP controller") {
  SipSource sip(1e-3);
  CHECK(sip.current_l() == 1);
  for (Count k = 1; k <= 100; ++k) {
    const double f = std::pow(0.5, static_cast<double>(k));
    sip.observe(k, f, 0.5 * f);
  }
  CHECK(sip.current_l() == 1);
  sip.observe(101, 2.0, 2.0);
  CHECK(sip.current_l() == 2);
  sip.observe(102, 2.0, 3.0);
  CHECK(sip.current_l() == 3);
  // nonpositive objectives use the absolute guard
  SipSource neg(1e-2);
  neg.observe(1, -1.0, -1.5);
  CHECK(neg.current_l() == 1);
  neg.observe(2, -1.0, -1.001);
  CHECK(neg.current_l() == 2);
  neg.observe(3, 0.0, 0.0);
  CHECK(neg.current_l() == 3);
  CHECK_THROWS_AS(SipSource(0.0), std::invalid_argument);
}

TEST_CASE("SIP on the lasso instance") {
  const BenchProblem b = build_lasso_problem(LassoInstance{});
  for (Scheme s : {Scheme::Basic, Scheme::Accelerated}) {
    SipSource sip(1e-8);
    const Trace t = run(*b.problem, *b.oracle, s, sip, CostModel{}, StopRule::budget(20000.0), b.x0);
    const auto l = t.realized_schedule().counts();
    for (std::size_t i = 1; i < l.size(); ++i) CHECK(l[i] >= l[i - 1]);
    CHECK(l.back() >= 2);
  }
}

TEST_CASE("strategy strings") {
  const auto c = parse_strategy("const:25");
  CHECK(c.kind == StrategySpec::Kind::Constant);
  CHECK(c.l == 25);
  CHECK(c.name == "const:25");
  const auto s = parse_strategy("sip:1e-8");
  CHECK(s.kind == StrategySpec::Kind::Sip);
  CHECK(s.tol == 1e-8);
  const auto v = parse_strategy("conv:1");
  CHECK(v.kind == StrategySpec::Kind::Convergent);
  CHECK(v.delta == 1.0);
  CHECK(!v.scale.has_value());
  const auto w = parse_strategy("conv:0.5:2");
  CHECK(w.scale == 2.0);
  for (const char* bad : {"const:0", "const:2.5", "sip:-1", "conv:0", "conv:x", "heavy:3", "const", "const:"})
    CHECK_THROWS_AS(parse_strategy(bad), std::invalid_argument);
  const auto src = make_source(parse_strategy("conv:1:1"), Scheme::Basic, ErrorModel::sublinear(1, 1));
  CHECK(src->next_l(3, no_state()) == 27);
}
