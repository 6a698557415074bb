#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "agentcoord/error.hpp"
#include "agentcoord/simplex.hpp"

using agentcoord::InvalidInput;
using agentcoord::project_to_simplex;
using agentcoord::WeightVector;

namespace {

void check_on_simplex(const WeightVector& w) {
  double sum = 0.0;
  for (double x : w.values()) {
    CHECK(x >= 0.0);
    sum += x;
  }
  CHECK(std::abs(sum - 1.0) <= WeightVector::kSumTolerance);
}

double distance(const std::vector<double>& v, const std::vector<double>& w) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += (v[i] - w[i]) * (v[i] - w[i]);
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("weight vector construction validates entries") {
  CHECK_NOTHROW(WeightVector({0.25, 0.75}));
  CHECK_THROWS_AS(WeightVector({0.5, 0.6}), InvalidInput);
  CHECK_THROWS_AS(WeightVector({1.5, -0.5}), InvalidInput);
  CHECK_THROWS_AS(WeightVector({std::nan(""), 1.0}), InvalidInput);
  CHECK_THROWS_AS(WeightVector(std::vector<double>{}), InvalidInput);
  const auto u = WeightVector::uniform(4);
  for (double x : u.values()) CHECK(x == 0.25);
  const auto e = WeightVector::vertex(3, 2);
  CHECK(e.vector() == std::vector<double>{0.0, 0.0, 1.0});
}

TEST_CASE("projection examples") {
  const double third = 1.0 / 3.0;
  auto a = project_to_simplex(std::vector<double>{third, third, third});
  for (double x : a.values()) CHECK(x == doctest::Approx(third).epsilon(1e-15));

  auto b = project_to_simplex(std::vector<double>{0.6, 0.6, 0.6});
  for (double x : b.values()) CHECK(x == doctest::Approx(third).epsilon(1e-15));

  auto c = project_to_simplex(std::vector<double>{1.5, 0.2, -0.4});
  CHECK(c[0] == 1.0);
  CHECK(c[1] == 0.0);
  CHECK(c[2] == 0.0);
}

TEST_CASE("projection rejects empty and non-finite input") {
  CHECK_THROWS_AS(project_to_simplex(std::vector<double>{}), InvalidInput);
  CHECK_THROWS_AS(project_to_simplex(std::vector<double>{1.0, INFINITY}), InvalidInput);
  CHECK_THROWS_AS(project_to_simplex(std::vector<double>{std::nan(""), 0.0}), InvalidInput);
}

TEST_CASE("projection lands on the simplex and is idempotent") {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (std::size_t k : {1u, 2u, 3u, 5u, 8u, 33u}) {
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> v(k);
      for (double& x : v) x = u(gen);
      const auto p = project_to_simplex(v);
      check_on_simplex(p);
      const auto pp = project_to_simplex(p.values());
      CHECK(pp == p);
    }
  }
}

TEST_CASE("projection is the nearest point of a 1e-2 simplex grid") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<std::vector<double>> grid;
  for (int i = 0; i <= 100; ++i)
    for (int j = 0; i + j <= 100; ++j) grid.push_back({i / 100.0, j / 100.0, (100 - i - j) / 100.0});
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> v{u(gen), u(gen), u(gen)};
    const double d = distance(v, project_to_simplex(v).vector());
    double best = std::numeric_limits<double>::infinity();
    for (const auto& w : grid) best = std::min(best, distance(v, w));
    CHECK(d <= best + 1e-9);
  }
}

TEST_CASE("projection commutes with permutations") {
  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> v{u(gen), u(gen), u(gen), u(gen)};
    std::vector<double> r(v.rbegin(), v.rend());
    const auto pv = project_to_simplex(v).vector();
    const auto pr = project_to_simplex(r).vector();
    for (std::size_t i = 0; i < 4; ++i) CHECK(pv[i] == doctest::Approx(pr[3 - i]).epsilon(1e-14));
  }
}
