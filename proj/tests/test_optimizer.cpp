#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "agentcoord/bounds.hpp"
#include "agentcoord/error.hpp"
#include "agentcoord/kernels.hpp"
#include "agentcoord/linear_gaussian_task.hpp"
#include "agentcoord/optimizer.hpp"
#include "agentcoord/quadratic_task.hpp"

using namespace agentcoord;

namespace {

GradientMatrix cols(std::vector<std::vector<double>> c) { return GradientMatrix::from_columns(c); }

bool same_bits(std::span<const double> a, std::span<const double> b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

bool same_log(const std::vector<MetricRecord>& a, const std::vector<MetricRecord>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& x = a[i];
    const auto& y = b[i];
    if (x.t != y.t || !same_bits(x.gamma, y.gamma) || !same_bits(x.losses, y.losses)) return false;
    const double xs[] = {x.c_error, x.c_error_time_avg, x.g_error, x.pareto_gap};
    const double ys[] = {y.c_error, y.c_error_time_avg, y.g_error, y.pareto_gap};
    if (std::memcmp(xs, ys, sizeof xs) != 0) return false;
  }
  return true;
}

RunOptions options(std::size_t T, std::uint64_t seed, StepSchedule schedule) {
  RunOptions o;
  o.schedule = schedule;
  o.iterations = T;
  o.seed = seed;
  return o;
}

}  // namespace

TEST_CASE("dynamic weight step examples") {
  const auto J = cols({{1.0}, {-1.0}});
  auto a = dynamic_weight_step(WeightVector::uniform(2), J, J, 0.1, WeightVariant::kMatrix);
  CHECK(a == WeightVector::uniform(2));

  auto b = dynamic_weight_step(WeightVector::vertex(2, 0), J, J, 0.1, WeightVariant::kMatrix);
  CHECK(b[0] == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(b[1] == doctest::Approx(0.1).epsilon(1e-14));

  auto c = dynamic_weight_step(WeightVector::vertex(2, 0), J, J, 0.1,
                               WeightVariant::kLiteralDiagonal);
  CHECK(c[0] == 1.0);
  CHECK(c[1] == 0.0);
}

TEST_CASE("dynamic weight step errors") {
  const auto J = cols({{1.0}, {-1.0}});
  CHECK_THROWS_AS(dynamic_weight_step(WeightVector::uniform(2), J, cols({{1.0, 0.0}, {0.0, 1.0}}),
                                      0.1, WeightVariant::kMatrix),
                  InvalidInput);
  CHECK_THROWS_AS(dynamic_weight_step(WeightVector::uniform(2), J, J, -0.1, WeightVariant::kMatrix),
                  InvalidInput);
  CHECK_THROWS_AS(dynamic_weight_step(WeightVector::uniform(3), J, J, 0.1, WeightVariant::kMatrix),
                  InvalidInput);
}

TEST_CASE("dynamic weight step properties") {
  std::mt19937_64 gen(41);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::vector<double>> c1(3, std::vector<double>(4)), c2 = c1;
    for (auto& col : c1)
      for (double& x : col) x = n(gen);
    for (auto& col : c2)
      for (double& x : col) x = n(gen);
    const auto J1 = cols(c1), J2 = cols(c2);
    const auto g = project_to_simplex(std::vector<double>{u(gen), u(gen), u(gen)});
    for (auto variant : {WeightVariant::kMatrix, WeightVariant::kLiteralDiagonal}) {
      const auto next = dynamic_weight_step(g, J1, J2, 0.05 + 2.0 * (trial % 5), variant);
      double sum = 0;
      for (double x : next.values()) {
        CHECK(x >= 0.0);
        sum += x;
      }
      CHECK(std::abs(sum - 1.0) <= 1e-12);
      CHECK(dynamic_weight_step(g, J1, J2, 0.0, variant) == g);
    }
  }
}

TEST_CASE("matrix variant fixed point") {
  // Columns with equal inner products against J gamma: gamma is unchanged.
  const auto J = cols({{1, 0}, {0, 1}, {0.5, 0.5}});
  const WeightVector g({0.5, 0.5, 0.0});
  // J g = (0.5, 0.5); J^T J g = (0.5, 0.5, 0.5).
  CHECK(dynamic_weight_step(g, J, J, 0.3, WeightVariant::kMatrix) == g);
  const auto ones = cols({{1, 1}, {1, 1}, {1, 1}});
  const WeightVector h({0.2, 0.3, 0.5});
  CHECK(dynamic_weight_step(h, ones, ones, 7.0, WeightVariant::kMatrix) == h);
}

TEST_CASE("model step examples") {
  const JointModel m({0.0, 0.0}, {{"a", 0, 1}, {"b", 1, 1}});
  const auto J = cols({{1, 0}, {0, 1}});
  const auto next = model_step(m, J, WeightVector::uniform(2), 0.2);
  CHECK(next.parameters()[0] == doctest::Approx(-0.1));
  CHECK(next.parameters()[1] == doctest::Approx(-0.1));
  CHECK(next.layout() == m.layout());
  CHECK(model_step(m, J, WeightVector::uniform(2), 0.0) == m);

  const JointModel s = JointModel::flat({1.0, 2.0, 3.0});
  const auto g = cols({{0.5, -1.0, 2.0}});
  const auto sgd = model_step(s, g, WeightVector::uniform(1), 0.1);
  CHECK(sgd.parameters()[0] == 1.0 - 0.1 * 0.5);
  CHECK(sgd.parameters()[1] == 2.0 - 0.1 * -1.0);
  CHECK(sgd.parameters()[2] == 3.0 - 0.1 * 2.0);
  CHECK_THROWS_AS(model_step(s, J, WeightVector::uniform(2), 0.1), InvalidInput);
}

TEST_CASE("step schedules") {
  const auto c = StepSchedule::constant(0.3, 0.02);
  CHECK(c.eta(0) == 0.3);
  CHECK(c.beta(999) == 0.02);
  for (std::size_t T : {1u, 16u, 256u, 10000u}) {
    const auto s = StepSchedule::theory(T, 0.5, 0.1);
    CHECK(s.eta(0) > 0.0);
    CHECK(s.beta(T - 1) > 0.0);
    CHECK(s.eta(0) == doctest::Approx(0.5 * std::pow(double(T), -0.25)));
    CHECK(s.beta(0) / s.eta(0) == doctest::Approx(0.2 / std::sqrt(double(T))));
    CHECK(s.eta(0) == s.eta(T - 1));
  }
  CHECK_THROWS_AS(StepSchedule::theory(0).validate(), InvalidInput);
  CHECK_THROWS_AS(StepSchedule::constant(0.0, 0.1).validate(), InvalidInput);
  CHECK_THROWS_AS(StepSchedule::constant(0.1, -1.0).validate(), InvalidInput);
  CHECK(parse_variant("literal-diagonal") == WeightVariant::kLiteralDiagonal);
  CHECK_THROWS_AS(parse_variant("diag"), ConfigError);
  CHECK(parse_schedule_kind("constant") == ScheduleKind::kConstant);
}

TEST_CASE("runs are bit-reproducible") {
  const auto task = make_conflicting_quadratic_task(0.5, 200, 3);
  for (auto variant : {WeightVariant::kMatrix, WeightVariant::kLiteralDiagonal}) {
    auto o = options(300, 9, StepSchedule::theory(300));
    o.variant = variant;
    const auto a = run_conflict_resolving(task, o);
    const auto b = run_conflict_resolving(task, o);
    CHECK(same_log(a.log, b.log));
    CHECK(a.final_state.model == b.final_state.model);
    CHECK(a.final_state.gamma == b.final_state.gamma);
    CHECK(a.trajectory.size() == 301);
    for (const auto& s : a.trajectory) {
      double sum = 0;
      for (double x : s.gamma.values()) sum += x;
      CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
  }
  auto o = options(50, 9, StepSchedule::theory(50));
  auto o2 = o;
  o2.seed = 10;
  CHECK_FALSE(same_log(run_conflict_resolving(task, o).log, run_conflict_resolving(task, o2).log));
}

TEST_CASE("runs agree across kernel paths") {
  const auto task = make_conflicting_quadratic_task(0.5, 200, 3);
  const auto o = options(200, 4, StepSchedule::theory(200));
  const auto before = kernels::active_isa();
  kernels::set_isa(kernels::Isa::kScalar);
  const auto a = run_conflict_resolving(task, o);
  kernels::set_isa(kernels::Isa::kAvx2);
  const auto b = run_conflict_resolving(task, o);
  kernels::set_isa(before);
  REQUIRE(a.log.size() == b.log.size());
  for (std::size_t i = 0; i < a.log.size(); ++i) {
    CHECK(a.log[i].c_error == doctest::Approx(b.log[i].c_error).epsilon(1e-9).scale(1e-12));
  }
}

TEST_CASE("single-agent runs equal plain stochastic gradient descent") {
  const QuadraticTask task(std::vector<QuadraticAgent>{QuadraticAgent{{2.0, 0.5, 0.5, 1.0}, {1.0, -2.0}}},
                          10.0, 0.7, 50, 12);
  const std::uint64_t seed = 21;
  const std::size_t T = 400;
  const auto schedule = StepSchedule::constant(0.2, 0.05);

  const JointModel start = initial_model(task, seed);
  std::vector<double> omega(start.parameters().begin(), start.parameters().end());
  std::vector<std::vector<double>> reference{omega};
  for (std::size_t t = 0; t < T; ++t) {
    const auto g = task.sample_gradient(0, omega, seed, t, SampleSlot::kThird);
    for (std::size_t k = 0; k < omega.size(); ++k) omega[k] = omega[k] - schedule.beta(t) * g[k];
    task.confine(omega);
    reference.push_back(omega);
  }

  const auto dyn = run_conflict_resolving(task, options(T, seed, schedule));
  const auto fixed = run_static_baseline(task, WeightVector::uniform(1), options(T, seed, schedule));
  REQUIRE(dyn.trajectory.size() == T + 1);
  for (std::size_t t = 0; t <= T; ++t) {
    CHECK(same_bits(dyn.trajectory[t].model.parameters(), reference[t]));
    CHECK(same_bits(fixed.trajectory[t].model.parameters(), reference[t]));
    CHECK(dyn.trajectory[t].gamma.vector() == std::vector<double>{1.0});
  }
}

TEST_CASE("identical objectives have zero conflicting error") {
  const auto task = make_identical_quadratic_task(3, 0.5, 300, 8);
  const auto o = options(500, 5, StepSchedule::theory(500));
  const auto dyn = run_conflict_resolving(task, o);
  for (const auto& r : dyn.log) CHECK(r.c_error <= 1e-12);
  for (std::size_t t = 0; t < 20; ++t) {
    const auto J = sample_gradients(task, dyn.trajectory[t].model.parameters(), 5, t, SampleSlot::kFirst);
    CHECK(J.column(0)[0] == J.column(2)[0]);
  }
  const auto fixed = run_static_baseline(task, WeightVector::uniform(3), o);
  CHECK(same_log(dyn.log, fixed.log));
  CHECK(dyn.final_state.model == fixed.final_state.model);
}

TEST_CASE("opposing scalar quadratics settle in the Pareto set") {
  const auto task = make_opposing_scalar_task();
  auto o = options(3000, 1, StepSchedule::constant(0.05, 0.05));
  o.initial_model = JointModel::flat({0.0});
  const auto r = run_conflict_resolving(task, o);
  const double x = r.final_state.model.parameters()[0];
  CHECK(std::abs(x) <= 1e-9);
  CHECK(r.log.back().c_error <= 1e-9);
  CHECK(r.log.back().pareto_gap <= 1e-9);

  o.initial_model = JointModel::flat({0.6});
  const auto s = run_conflict_resolving(task, o);
  const double y = s.final_state.model.parameters()[0];
  CHECK(y >= -1.0);
  CHECK(y <= 1.0);
  CHECK(s.log.back().c_error <= 1e-6);
  CHECK(s.log.back().c_error < s.log.front().c_error);
}

TEST_CASE("dynamic weighting beats equal weights on the conflicting task") {
  const auto task = make_conflicting_quadratic_task(0.5, 1000, 2);
  const auto o = options(2000, 2, StepSchedule::theory(2000));
  const double dyn = run_conflict_resolving(task, o).time_averaged_c_error();
  const double fixed = run_static_baseline(task, WeightVector::uniform(3), o).time_averaged_c_error();
  CHECK(dyn < fixed);
}

TEST_CASE("time averages and metric records") {
  const auto task = make_conflicting_quadratic_task(0.5, 100, 1);
  auto o = options(40, 3, StepSchedule::theory(40));
  o.g_error_stride = 7;
  const auto r = run_conflict_resolving(task, o);
  REQUIRE(r.log.size() == 40);
  double sum = 0;
  for (std::size_t t = 0; t < r.log.size(); ++t) {
    CHECK(r.log[t].t == t);
    sum += r.log[t].c_error;
    CHECK(r.log[t].c_error_time_avg == doctest::Approx(sum / double(t + 1)).epsilon(1e-12));
    CHECK(std::isfinite(r.log[t].g_error));
  }
  // Between strides the latest evaluation is repeated.
  CHECK(r.log[8].g_error == r.log[7].g_error);
  CHECK(r.time_averaged_c_error(9) == r.log[9].c_error_time_avg);

  std::ostringstream os;
  write_trajectory_jsonl(os, r.log);
  std::istringstream is(os.str());
  std::string line;
  std::size_t lines = 0;
  while (std::getline(is, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.at("t").get<std::size_t>() == lines);
    CHECK(j.at("gamma").size() == 3);
    CHECK(j.contains("c_error"));
    CHECK(j.contains("g_error"));
    CHECK(j.contains("pareto_gap"));
    ++lines;
  }
  CHECK(lines == 40);
}

TEST_CASE("run configuration errors") {
  const auto task = make_opposing_scalar_task();
  CHECK_THROWS_AS(run_conflict_resolving(task, options(0, 1, StepSchedule::theory(1))), ConfigError);
  CHECK_THROWS_AS(run_static_baseline(task, WeightVector::uniform(3), options(5, 1, StepSchedule::theory(5))),
                  InvalidInput);
  CHECK_THROWS_AS(QuadraticTask({}, 1.0), ConfigError);
  struct NoAgents : StochasticTask {
    std::size_t agents() const override { return 0; }
    std::size_t dim() const override { return 1; }
    std::vector<double> sample_gradient(std::size_t, std::span<const double>, std::uint64_t,
                                        std::uint64_t, SampleSlot) const override {
      return {0.0};
    }
    FullBatch full_batch(std::span<const double>) const override { return {}; }
  } none;
  CHECK_THROWS_AS(run_conflict_resolving(none, options(5, 1, StepSchedule::theory(5))), ConfigError);
}

TEST_CASE("conflict error bound examples") {
  BoundInputs b{1.0, 1.0, 1.0, 10, 100, 0.1, 0.01};
  CHECK(conflict_error_bound(b) == doctest::Approx(0.4 + 6 * std::sqrt(0.3) + 0.3).epsilon(1e-12));
  CHECK(conflict_error_bound(b) == doctest::Approx(3.9863).epsilon(1e-4));

  // Large-T limit keeps only the last two terms.
  b.T = 1000000000000ull;
  CHECK(conflict_error_bound(b) == doctest::Approx(6 * std::sqrt(0.3) + 0.3).epsilon(1e-10));

  b = {1.0, 1.0, 1.0, 10, 100, 0.1, 0.01};
  double last = conflict_error_bound(b);
  for (std::size_t T : {200u, 400u, 1000u, 5000u}) {
    b.T = T;
    const double v = conflict_error_bound(b);
    CHECK(v < last);
    last = v;
  }
  b.T = 100;
  last = conflict_error_bound(b);
  for (double beta : {0.02, 0.05, 0.1, 1.0}) {
    b.beta = beta;
    const double v = conflict_error_bound(b);
    CHECK(v > last);
    last = v;
  }
  for (int field = 0; field < 7; ++field) {
    BoundInputs bad{1.0, 1.0, 1.0, 10, 100, 0.1, 0.01};
    switch (field) {
      case 0: bad.lf = 0; break;
      case 1: bad.lfp = -1; break;
      case 2: bad.U = 0; break;
      case 3: bad.D = 0; break;
      case 4: bad.T = 0; break;
      case 5: bad.eta = 0; break;
      default: bad.beta = 0; break;
    }
    CHECK_THROWS_AS(conflict_error_bound(bad), InvalidInput);
  }
}

TEST_CASE("scaling fit examples") {
  std::vector<ScalingPoint> pts;
  for (std::size_t D : {100u, 400u, 1600u}) pts.push_back({500, D, 3.0 / std::sqrt(double(D))});
  const auto fit = fit_g_error_scaling(pts);
  REQUIRE(fit.slope_vs_d);
  CHECK(*fit.slope_vs_d == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK_FALSE(fit.slope_vs_t);

  for (auto& p : pts) p.g_error = 0.7;
  CHECK(*fit_g_error_scaling(pts).slope_vs_d == doctest::Approx(0.0).scale(1e-12));

  CHECK_THROWS_AS(fit_g_error_scaling({pts[0], pts[1]}), InvalidInput);
  pts[1].g_error = 0.0;
  CHECK_THROWS_AS(fit_g_error_scaling(pts), InvalidInput);
  CHECK(least_squares_slope({1, 2, 3}, {2, 4, 6}) == doctest::Approx(2.0));
}

TEST_CASE("linear-Gaussian generalization error shrinks with the sample count") {
  std::vector<ScalingPoint> pts;
  for (std::size_t D : {100u, 1000u, 10000u}) {
    double mean = 0;
    for (std::uint64_t s = 0; s < 5; ++s) {
      const auto task = make_linear_gaussian_task(D, 100 + s);
      auto o = options(2000, 100 + s, StepSchedule::theory(2000, 0.5, 0.1));
      o.g_error_stride = 2000;
      o.keep_trajectory = false;
      mean += run_conflict_resolving(task, o).log.back().g_error / 5.0;
    }
    pts.push_back({2000, D, mean});
  }
  const auto fit = fit_g_error_scaling(pts);
  REQUIRE(fit.slope_vs_d);
  CHECK(*fit.slope_vs_d >= -0.65);
  CHECK(*fit.slope_vs_d <= -0.35);
}
