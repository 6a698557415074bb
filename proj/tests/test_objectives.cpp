#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "agentcoord/error.hpp"
#include "agentcoord/fd_check.hpp"
#include "agentcoord/linear_gaussian_task.hpp"
#include "agentcoord/losses.hpp"
#include "agentcoord/min_norm.hpp"
#include "agentcoord/predictor.hpp"
#include "agentcoord/quadratic_task.hpp"

using namespace agentcoord;

TEST_CASE("loss examples") {
  const auto mse = loss_and_gradient(LossKind::kMse, 0.3, 0.3);
  CHECK(mse.loss == 0.0);
  CHECK(mse.gradient == 0.0);
  const auto l1 = loss_and_gradient(LossKind::kL1, 1.0, 0.0);
  CHECK(l1.loss == 1.0);
  CHECK(l1.gradient == 1.0);
  const auto lc = loss_and_gradient(LossKind::kLogCosh, 1.5, 0.5);
  CHECK(lc.loss == doctest::Approx(0.43378).epsilon(1e-5));
  CHECK(lc.gradient == doctest::Approx(0.76159).epsilon(1e-5));
  CHECK(lc.loss == doctest::Approx(std::log(std::cosh(1.0))).epsilon(1e-14));
  CHECK(lc.gradient == doctest::Approx(std::tanh(1.0)).epsilon(1e-14));
  CHECK(loss_and_gradient(LossKind::kL1, 2.0, 2.0).gradient == 0.0);
  CHECK_THROWS_AS(loss_and_gradient(LossKind::kMse, NAN, 0.0), InvalidInput);
  CHECK_THROWS_AS(loss_and_gradient(LossKind::kL1, 0.0, INFINITY), InvalidInput);
  CHECK(parse_loss_kind("LogCosh") == LossKind::kLogCosh);
  CHECK_THROWS_AS(parse_loss_kind("huber"), ConfigError);
}

TEST_CASE("log-cosh stays finite for large residuals") {
  const auto v = loss_and_gradient(LossKind::kLogCosh, 1000.0, 0.0);
  CHECK(std::isfinite(v.loss));
  CHECK(v.loss == doctest::Approx(1000.0 - std::log(2.0)));
  CHECK(v.gradient == doctest::Approx(1.0));
}

TEST_CASE("losses are non-negative, symmetric and vanish at the target") {
  std::mt19937_64 gen(51);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (auto kind : {LossKind::kL1, LossKind::kMse, LossKind::kLogCosh}) {
    for (int i = 0; i < 200; ++i) {
      const double p = u(gen), t = u(gen);
      const auto a = loss_and_gradient(kind, p, t);
      const auto b = loss_and_gradient(kind, t, p);
      CHECK(a.loss >= 0.0);
      CHECK(a.loss == doctest::Approx(b.loss).epsilon(1e-12));
      CHECK(a.gradient == doctest::Approx(-b.gradient).epsilon(1e-12));
      CHECK(loss_and_gradient(kind, p, p).loss == 0.0);
    }
  }
}

TEST_CASE("loss derivatives pass finite-difference checks") {
  std::mt19937_64 gen(53);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (auto kind : {LossKind::kL1, LossKind::kMse, LossKind::kLogCosh}) {
    int checked = 0;
    while (checked < 100) {
      const double p = u(gen), t = u(gen);
      if (kind == LossKind::kL1 && std::abs(p - t) < 1e-3) continue;  // kink
      const ScalarFunction f = [&](std::span<const double> x) {
        return loss_and_gradient(kind, x[0], t).loss;
      };
      const double analytic = loss_and_gradient(kind, p, t).gradient;
      const std::vector<double> x{p};
      CHECK(finite_difference_check(f, x, std::vector<double>{analytic}, 1e-6) <= 1e-5);
      ++checked;
    }
  }
}

TEST_CASE("finite-difference check examples and errors") {
  const ScalarFunction sq = [](std::span<const double> x) { return x[0] * x[0]; };
  CHECK(finite_difference_check(sq, std::vector<double>{3.0}, std::vector<double>{6.0}, 1e-5) <= 1e-9);
  CHECK(finite_difference_check(sq, std::vector<double>{3.0}, std::vector<double>{7.0}, 1e-5) > 0.1);
  CHECK_THROWS_AS(finite_difference_check(sq, std::vector<double>{3.0}, std::vector<double>{6.0}, 0.0),
                  InvalidInput);
  CHECK_THROWS_AS(finite_difference_check(sq, std::vector<double>{3.0}, std::vector<double>{6.0, 1.0}, 1e-5),
                  InvalidInput);
  const ScalarFunction bad = [](std::span<const double>) { return NAN; };
  CHECK_THROWS_AS(finite_difference_check(bad, std::vector<double>{1.0}, std::vector<double>{0.0}, 1e-5),
                  InvalidInput);
  const auto g = numeric_gradient(sq, std::vector<double>{-2.0}, 1e-5);
  CHECK(g[0] == doctest::Approx(-4.0).epsilon(1e-9));
}

TEST_CASE("quadratic gradient examples") {
  const QuadraticTask scalar(std::vector<QuadraticAgent>{QuadraticAgent{{2.0}, {1.0}}}, 10.0);
  const auto J = quadratic_gradients(scalar, std::vector<double>{0.0});
  CHECK(J.column(0)[0] == -2.0);

  const auto opposing = make_opposing_scalar_task();
  const auto K = quadratic_gradients(opposing, std::vector<double>{0.0});
  CHECK(K.column(0)[0] == -2.0);
  CHECK(K.column(1)[0] == 2.0);
  CHECK(pareto_gap(K) == 0.0);

  const auto task = make_conflicting_quadratic_task(0.0, 0, 0);
  for (std::size_t i = 0; i < task.agents(); ++i) {
    const auto Z = quadratic_gradients(task, task.quadratics()[i].center);
    for (double x : Z.column(i)) CHECK(x == 0.0);
  }
  CHECK_THROWS_AS(quadratic_gradients(task, std::vector<double>{0.0}), InvalidInput);
}

TEST_CASE("quadratic gradients match finite differences of the loss") {
  const auto task = make_conflicting_quadratic_task(0.0, 0, 0);
  std::mt19937_64 gen(55);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x{u(gen), u(gen), u(gen)};
    const auto J = quadratic_gradients(task, x);
    for (std::size_t i = 0; i < task.agents(); ++i) {
      const auto& q = task.quadratics()[i];
      const ScalarFunction f = [&](std::span<const double> w) {
        double s = 0;
        for (std::size_t a = 0; a < 3; ++a)
          for (std::size_t b = 0; b < 3; ++b)
            s += 0.5 * (w[a] - q.center[a]) * q.A[a * 3 + b] * (w[b] - q.center[b]);
        return s;
      };
      const std::vector<double> col(J.column(i).begin(), J.column(i).end());
      CHECK(finite_difference_check(f, x, col, 1e-5) <= 1e-7);
    }
  }
}

TEST_CASE("noisy quadratic task: full batch and population") {
  const auto task = make_conflicting_quadratic_task(0.5, 400, 9);
  const std::vector<double> x{0.2, -0.1, 0.4};
  const auto pop = task.population_gradients(x);
  const auto exact = quadratic_gradients(task, x);
  CHECK(pop == exact);
  const auto fb = task.full_batch(x);
  CHECK(fb.losses.size() == 3);
  // Full batch differs from the population only through the sample mean.
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& s = task.samples(i);
    REQUIRE(s.size() == 400);
    std::vector<double> mean(3, 0.0);
    for (const auto& d : s)
      for (std::size_t k = 0; k < 3; ++k) mean[k] += d[k] / 400.0;
    const auto& A = task.quadratics()[i].A;
    for (std::size_t a = 0; a < 3; ++a) {
      double g = 0;
      for (std::size_t b = 0; b < 3; ++b) g += A[a * 3 + b] * (x[b] - mean[b]);
      CHECK(fb.gradients.column(i)[a] == doctest::Approx(g).epsilon(1e-10));
    }
  }
  // Confinement projects onto the ball.
  std::vector<double> far{30.0, 40.0, 0.0};
  task.confine(far);
  CHECK(std::sqrt(far[0] * far[0] + far[1] * far[1]) == doctest::Approx(task.radius()));
}

TEST_CASE("lipschitz constant examples") {
  const auto a = lipschitz_constants(QuadraticTask(std::vector<QuadraticAgent>{QuadraticAgent{{2.0}, {1.0}}}, 10.0));
  CHECK(a.lfp == doctest::Approx(2.0));
  CHECK(a.lf == doctest::Approx(22.0));
  const auto b = lipschitz_constants(QuadraticTask(std::vector<QuadraticAgent>{QuadraticAgent{{1, 0, 0, 1}, {0, 0}}}, 1.0));
  CHECK(b.lfp == doctest::Approx(1.0));
  CHECK(b.lf == doctest::Approx(1.0));
  const auto c = lipschitz_constants(QuadraticTask(std::vector<QuadraticAgent>{QuadraticAgent{{0, 0, 0, 0}, {3, 4}}}, 5.0));
  CHECK(c.lfp == 0.0);
  CHECK(c.lf == 0.0);
}

TEST_CASE("lipschitz constants bound sampled gradients on the ball") {
  const auto task = make_conflicting_quadratic_task(0.5, 200, 4);
  const auto L = lipschitz_constants(task);
  std::mt19937_64 gen(57);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x{n(gen), n(gen), n(gen)};
    const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    for (double& v : x) v *= task.radius() / r;
    for (std::size_t i = 0; i < 3; ++i) {
      const auto g = task.sample_gradient(i, x, 1, trial, SampleSlot::kFirst);
      CHECK(euclidean_norm(g) <= L.lf + 1e-9);
    }
  }
}

namespace {

std::vector<double> random_params(const PredictorShape& shape, std::mt19937_64& gen) {
  std::normal_distribution<double> n(0.0, 0.5);
  std::vector<double> p(shape.parameter_count());
  for (double& x : p) x = n(gen);
  return p;
}

}  // namespace

TEST_CASE("predictor layout") {
  PredictorShape shape;
  CHECK(shape.parameter_count() == 4 * 8 + 4 + 3 * 5);
  const auto layout = shape.layout();
  REQUIRE(layout.size() == 4);
  CHECK(layout[0].name == "backbone");
  CHECK(layout[2].name == "head:1");
  CHECK(layout[2].offset == shape.head_offset(1));
  CHECK_NOTHROW(JointModel(std::vector<double>(shape.parameter_count()), layout));
}

TEST_CASE("zero predictor on zero targets has zero log-cosh gradient") {
  PredictorShape shape;
  std::vector<double> params(shape.parameter_count(), 0.0);
  WindowSet w;
  w.window = 8;
  std::mt19937_64 gen(59);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    std::vector<double> x(8);
    for (double& v : x) v = n(gen);
    w.push_back(x, 0.0, 0);
  }
  for (std::size_t h = 0; h < 3; ++h) {
    const auto g = agent_loss_gradient(shape, params, h, w, LossKind::kLogCosh);
    for (double v : g) CHECK(v == 0.0);
  }
}

TEST_CASE("predictor gradients pass finite-difference checks") {
  PredictorShape shape;
  std::mt19937_64 gen(61);
  std::normal_distribution<double> n(0.0, 1.0);
  for (auto kind : {LossKind::kL1, LossKind::kMse, LossKind::kLogCosh}) {
    int checked = 0;
    while (checked < 100) {
      const auto params = random_params(shape, gen);
      const std::size_t head = checked % 3;
      WindowSet w;
      w.window = 8;
      std::vector<double> x(8);
      for (double& v : x) v = n(gen);
      const double target = n(gen);
      w.push_back(x, target, 0);
      if (kind == LossKind::kL1 && std::abs(predict(shape, params, head, x) - target) < 1e-3) continue;
      const ScalarFunction f = [&](std::span<const double> p) {
        return agent_mean_loss(shape, p, head, w, kind);
      };
      const auto g = agent_loss_gradient(shape, params, head, w, kind);
      CHECK(finite_difference_check(f, params, g, 1e-6) <= 1e-5);
      ++checked;
    }
  }
}

TEST_CASE("predictor gradient leaves other heads untouched") {
  PredictorShape shape;
  std::mt19937_64 gen(63);
  const auto params = random_params(shape, gen);
  WindowSet w;
  w.window = 8;
  w.push_back(std::vector<double>(8, 0.3), 1.0, 0);
  w.push_back(std::vector<double>(8, -0.2), -1.0, 0);
  const auto g = agent_loss_gradient(shape, params, 1, w, LossKind::kMse);
  for (std::size_t h : {0u, 2u})
    for (std::size_t k = 0; k < shape.head_size(); ++k) CHECK(g[shape.head_offset(h) + k] == 0.0);
  bool backbone_moves = false;
  for (std::size_t k = 0; k < shape.backbone_size(); ++k) backbone_moves |= g[k] != 0.0;
  CHECK(backbone_moves);

  WindowSet wrong;
  wrong.window = 5;
  wrong.push_back(std::vector<double>(5, 0.0), 0.0, 0);
  CHECK_THROWS_AS(agent_loss_gradient(shape, params, 0, wrong, LossKind::kMse), InvalidInput);
  CHECK_THROWS_AS(agent_loss_gradient(shape, params, 0, WindowSet{8, {}, {}, {}}, LossKind::kMse),
                  InvalidInput);
}

TEST_CASE("linear-Gaussian population gradients") {
  const LinearGaussianTask task({{0.0}}, 0.5, 100, 3);
  const auto closed = task.population_gradient(0, std::vector<double>{1.0});
  CHECK(closed.gradient[0] == doctest::Approx(2.0));
  CHECK(closed.samples == 0);
  const auto mc = task.monte_carlo_population_gradient(0, std::vector<double>{1.0}, 100000, 77);
  CHECK(mc.samples == 100000);
  CHECK(std::abs(mc.gradient[0] - 2.0) <= 3.0 * mc.std_error[0]);

  const auto multi = make_linear_gaussian_task(50, 1);
  CHECK(multi.agents() == 3);
  CHECK(multi.dim() == 4);
  // At an agent's true parameter its population gradient vanishes.
  const LinearGaussianTask two({{1.0, -2.0}, {0.5, 0.5}}, 0.3, 80, 2);
  const auto at_theta = two.population_gradient(0, std::vector<double>{1.0, -2.0});
  for (double v : at_theta.gradient) CHECK(v == 0.0);
}

TEST_CASE("linear-Gaussian full batch is the empirical mean gradient") {
  const auto task = make_linear_gaussian_task(64, 5);
  const std::vector<double> w{0.1, -0.3, 0.2, 0.0};
  const auto fb = task.full_batch(w);
  for (std::size_t i = 0; i < task.agents(); ++i) {
    const ScalarFunction f = [&](std::span<const double> x) {
      return task.full_batch(x).losses[i];
    };
    const std::vector<double> col(fb.gradients.column(i).begin(), fb.gradients.column(i).end());
    CHECK(finite_difference_check(f, w, col, 1e-6) <= 1e-6);
  }
}

TEST_CASE("predictor Monte-Carlo population gradient") {
  PredictorShape shape;
  std::mt19937_64 gen(65);
  const auto params = random_params(shape, gen);
  SignalLaw law;
  law.name = "x";
  law.mean = 50.0;
  law.phi = 0.8;
  law.sigma = 3.0;
  law.offset = 50.0;
  law.scale = 5.0;
  const auto a = predictor_population_gradient(shape, params, 2, {law}, LossKind::kMse, 20000, 3, 0);
  const auto b = predictor_population_gradient(shape, params, 2, {law}, LossKind::kMse, 20000, 3, 0);
  CHECK(a.gradient == b.gradient);
  const auto c = predictor_population_gradient(shape, params, 2, {law}, LossKind::kMse, 20000, 4, 0);
  for (std::size_t k = 0; k < a.gradient.size(); ++k) {
    const double se = std::hypot(a.std_error[k], c.std_error[k]);
    CHECK(std::abs(a.gradient[k] - c.gradient[k]) <= 5.0 * se + 1e-12);
  }
  CHECK_THROWS_AS(predictor_population_gradient(shape, params, 0, {}, LossKind::kMse, 10, 1, 0),
                  ConfigError);
  CHECK_THROWS_AS(predictor_population_gradient(shape, params, 0, {law}, LossKind::kMse, 0, 1, 0),
                  ConfigError);
}
