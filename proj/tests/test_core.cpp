#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "iprox/bench.hpp"
#include "iprox/core.hpp"
#include "test_util.hpp"

using namespace iprox;

namespace {

CompositeProblem half_norm_problem(Index n, bool with_l1) {
  auto grad = [](const Vector& x) { return x; };
  auto g = [](const Vector& x) { return 0.5 * x.squaredNorm(); };
  auto h = [with_l1](const Vector& x) { return with_l1 ? x.lpNorm<1>() : 0.0; };
  return CompositeProblem(n, grad, g, h, 1.0);
}

}  // namespace

TEST_CASE("evaluate_objective small cases") {
  CHECK(evaluate_objective(half_norm_problem(2, false), Vector::Zero(2)) == 0.0);
  Vector x(2);
  x << 1.0, -1.0;
  CHECK(evaluate_objective(half_norm_problem(2, true), x) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK_THROWS_AS(evaluate_objective(half_norm_problem(2, true), Vector::Zero(3)), std::invalid_argument);
}

TEST_CASE("evaluate_objective propagates non-finite values") {
  auto grad = [](const Vector& x) { return x; };
  auto g = [](const Vector&) { return 0.0; };
  auto h = [](const Vector& x) { return x[0] < 0.0 ? std::numeric_limits<double>::infinity() : 0.0; };
  CompositeProblem p(1, grad, g, h, 1.0);
  CHECK(std::isinf(evaluate_objective(p, Vector::Constant(1, -1.0))));
}

TEST_CASE("evaluate_objective on the TV instance matches a straight-line evaluator") {
  TvInstance inst;
  inst.image_side = 16;
  const BenchProblem b = build_tv_problem(inst);
  const Index n = 16;
  // blur, residual and TV written out directly
  const int r = 4;
  std::vector<double> w(2 * r + 1);
  double s = 0.0;
  for (int t = -r; t <= r; ++t) s += w[t + r] = std::exp(-0.5 * t * t / 16.0);
  for (double& v : w) v /= s;
  auto refl = [n](Index i) {
    while (i < 0 || i >= n) i = i < 0 ? -i - 1 : 2 * n - i - 1;
    return i;
  };
  auto value = [&](const Vector& x) {
    Vector tmp(n * n), bx(n * n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int t = -r; t <= r; ++t) acc += w[t + r] * x[i * n + refl(j + t)];
        tmp[i * n + j] = acc;
      }
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int t = -r; t <= r; ++t) acc += w[t + r] * tmp[refl(i + t) * n + j];
        bx[i * n + j] = acc;
      }
    double tv = 0.0;
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) {
        const double dx = j + 1 < n ? x[i * n + j + 1] - x[i * n + j] : 0.0;
        const double dy = i + 1 < n ? x[(i + 1) * n + j] - x[i * n + j] : 0.0;
        tv += std::sqrt(dx * dx + dy * dy);
      }
    return (bx - b.observed).squaredNorm() + inst.lambda * tv;
  };
  CHECK(testutil::rel_close(evaluate_objective(*b.problem, b.observed), value(b.observed), 1e-12));
  std::mt19937_64 rng(5);
  const Vector x = testutil::random_vector(rng, n * n);
  CHECK(testutil::rel_close(evaluate_objective(*b.problem, x), value(x), 1e-12));
}

TEST_CASE("evaluate_objective equals g + h on random probes") {
  const BenchProblem b = build_lasso_problem(LassoInstance{});
  std::mt19937_64 rng(11);
  for (int t = 0; t < 100; ++t) {
    const Vector x = testutil::random_vector(rng, b.problem->dim());
    const double direct = b.problem->eval_g(x) + LassoInstance{}.lambda * x.lpNorm<1>();
    CHECK(testutil::rel_close(evaluate_objective(*b.problem, x), direct, 1e-12));
  }
}

TEST_CASE("CompositeProblem invariants on the lasso instance") {
  const BenchProblem b = build_lasso_problem(LassoInstance{});
  const CompositeProblem& p = *b.problem;
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    const Vector x = testutil::random_vector(rng, p.dim());
    const Vector y = testutil::random_vector(rng, p.dim());
    CHECK((p.grad_g(x) - p.grad_g(y)).norm() <= p.lipschitz() * (x - y).norm() * (1.0 + 1e-12));
  }
  for (int t = 0; t < 20; ++t) {
    const Vector x = testutil::random_vector(rng, p.dim());
    const Vector d = testutil::random_vector(rng, p.dim());
    const double hstep = 1e-5;
    const double fd = (p.eval_g(x + hstep * d) - p.eval_g(x - hstep * d)) / (2.0 * hstep);
    CHECK(testutil::rel_close(fd, p.grad_g(x).dot(d), 1e-5));
  }
  auto f = [](const Vector& x) { return x; };
  auto v = [](const Vector&) { return 0.0; };
  CHECK_THROWS_AS(CompositeProblem(2, f, v, v, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(CompositeProblem(2, f, v, v, -1.0), std::invalid_argument);
}

TEST_CASE("schedule_cost arithmetic") {
  CHECK(schedule_cost(Schedule({2, 3}), CostModel(1, 1)) == 7.0);
  CHECK(schedule_cost(Schedule::constant(9, 1), CostModel(0, 2.5)) == 9 * 2.5);
  CHECK(schedule_cost(Schedule({5}), CostModel(2, 3)) == 13.0);
}

TEST_CASE("schedule_cost is additive over concatenation") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<Count> len(1, 20), val(1, 100);
  for (int t = 0; t < 200; ++t) {
    std::vector<Count> a(static_cast<std::size_t>(len(rng))), b(static_cast<std::size_t>(len(rng)));
    for (auto& x : a) x = val(rng);
    for (auto& x : b) x = val(rng);
    std::vector<Count> ab = a;
    ab.insert(ab.end(), b.begin(), b.end());
    const CostModel c(testutil::uniform(rng, 0, 3), testutil::uniform(rng, 0.1, 3));
    CHECK(testutil::rel_close(schedule_cost(Schedule(ab), c),
                              schedule_cost(Schedule(a), c) + schedule_cost(Schedule(b), c), 1e-14));
  }
}

TEST_CASE("type invariants are enforced") {
  CHECK_THROWS_AS(Schedule({1, 0}), std::invalid_argument);
  CHECK_THROWS_AS(Schedule(std::vector<Count>{}), std::invalid_argument);
  CHECK_THROWS_AS(CostModel(-1, 1), std::invalid_argument);
  CHECK_THROWS_AS(CostModel(0, 0), std::invalid_argument);
  CHECK_THROWS_AS(ErrorModel::sublinear(0, 1), std::invalid_argument);
  CHECK_THROWS_AS(ErrorModel::sublinear(1, 0), std::invalid_argument);
  CHECK_THROWS_AS(ErrorModel::linear(1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ErrorModel::linear(1, 0.0), std::invalid_argument);
}

TEST_CASE("epsilon_of_l examples") {
  CHECK(epsilon_of_l(ErrorModel::sublinear(1, 1), 4) == 0.25);
  CHECK(epsilon_of_l(ErrorModel::linear(1, 0.5), 3) == 0.125);
  CHECK(epsilon_of_l(ErrorModel::sublinear(2, 2), 1) == 2.0);
  CHECK_THROWS_AS(epsilon_of_l(ErrorModel::sublinear(1, 1), 0), std::invalid_argument);
}

TEST_CASE("l_of_epsilon examples") {
  CHECK(l_of_epsilon(ErrorModel::sublinear(1, 1), 0.3) == 4);
  CHECK(l_of_epsilon(ErrorModel::linear(1, 0.5), 0.2) == 3);
  CHECK(l_of_epsilon(ErrorModel::sublinear(3, 0.7), 3.0) == 1);
  CHECK(l_of_epsilon(ErrorModel::linear(2, 0.3), 5.0) == 1);
}

TEST_CASE("epsilon_of_l is strictly decreasing and l_of_epsilon inverts it") {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 100; ++t) {
    const bool lin = t % 2 == 0;
    const double A = testutil::log_uniform(rng, 1e-3, 1e3);
    const ErrorModel m = lin ? ErrorModel::linear(A, testutil::uniform(rng, 0.01, 0.9))
                             : ErrorModel::sublinear(A, testutil::uniform(rng, 0.2, 4.0));
    double prev = std::numeric_limits<double>::infinity();
    for (Count l = 1; l <= 300; ++l) {
      const double e = epsilon_of_l(m, l);
      if (e == 0.0) break;  // linear model underflow
      CHECK(e < prev);
      prev = e;
      CHECK(l_of_epsilon(m, e) == l);
    }
  }
}

TEST_CASE("trace helpers") {
  Trace t;
  t.records.push_back(TraceRecord{1, 2, 3.0, 5.0, 5.0, std::nullopt});
  t.records.push_back(TraceRecord{2, 4, 8.0, 4.0, 4.5, std::nullopt});
  t.records.push_back(TraceRecord{3, 4, 13.0, 4.2, 4.3, std::nullopt});
  CHECK(t.realized_schedule() == Schedule({2, 4, 4}));
  CHECK(t.min_objective() == 4.0);
  CHECK(std::isinf(Trace{}.min_objective()));
}

TEST_CASE("scenario names round-trip") {
  for (Scenario s : {Scenario::BasicSublinear, Scenario::BasicLinear, Scenario::AccelSublinear,
                     Scenario::AccelLinear})
    CHECK(scenario_from_string(to_string(s)) == s);
  CHECK(scenario_from_string("3") == Scenario::AccelSublinear);
  CHECK(scenario_from_string("accel-linear") == Scenario::AccelLinear);
  CHECK_THROWS(scenario_from_string("bogus"));
}
