#include <doctest.h>

#include <cstring>
#include <random>
#include <vector>

#include "agentcoord/kernels.hpp"

namespace k = agentcoord::kernels;

namespace {

std::vector<double> random_vector(std::size_t n, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(gen);
  return v;
}

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

// Sizes straddle the 4-lane vector width and its remainders.
const std::size_t kSizes[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 63, 64, 65, 1000, 1027};

}  // namespace

TEST_CASE("isa names and the scalar path are always available") {
  CHECK(k::isa_name(k::Isa::kScalar) == "scalar");
  CHECK(k::isa_supported(k::Isa::kScalar));
  const k::Isa before = k::active_isa();
  k::set_isa(k::Isa::kScalar);
  CHECK(k::active_isa() == k::Isa::kScalar);
  k::set_isa(before);
}

TEST_CASE("scalar kernels match naive loops") {
  std::mt19937_64 gen(1);
  for (std::size_t n : kSizes) {
    const auto a = random_vector(n, gen), b = random_vector(n, gen);
    double dot = 0, sq = 0, dist = 0;
    for (std::size_t i = 0; i < n; ++i) {
      dot += a[i] * b[i];
      sq += a[i] * a[i];
      dist += (a[i] - b[i]) * (a[i] - b[i]);
    }
    CHECK(k::scalar::dot(a.data(), b.data(), n) == doctest::Approx(dot).epsilon(1e-12));
    CHECK(k::scalar::squared_norm(a.data(), n) == doctest::Approx(sq).epsilon(1e-12));
    CHECK(k::scalar::squared_distance(a.data(), b.data(), n) == doctest::Approx(dist).epsilon(1e-12));
  }
}

#ifdef AGENTCOORD_HAVE_AVX2_KERNELS
TEST_CASE("avx2 elementwise kernels are bit-identical to scalar") {
  if (!k::isa_supported(k::Isa::kAvx2)) return;
  std::mt19937_64 gen(2);
  for (std::size_t n : kSizes) {
    const auto x = random_vector(n, gen), a = random_vector(n, gen);
    auto y1 = random_vector(n, gen);
    auto y2 = y1;
    k::scalar::axpy(0.37, x.data(), y1.data(), n);
    k::avx2::axpy(0.37, x.data(), y2.data(), n);
    CHECK(bit_equal(y1, y2));

    k::scalar::scale_sub(1.7e-3, x.data(), y1.data(), n);
    k::avx2::scale_sub(1.7e-3, x.data(), y2.data(), n);
    CHECK(bit_equal(y1, y2));

    std::vector<double> o1(n), o2(n);
    k::scalar::sub(a.data(), x.data(), o1.data(), n);
    k::avx2::sub(a.data(), x.data(), o2.data(), n);
    CHECK(bit_equal(o1, o2));
  }
}

TEST_CASE("avx2 reductions agree with scalar to rounding") {
  if (!k::isa_supported(k::Isa::kAvx2)) return;
  std::mt19937_64 gen(3);
  for (std::size_t n : kSizes) {
    const auto a = random_vector(n, gen), b = random_vector(n, gen);
    const double scale = 1e-13 * static_cast<double>(n + 1) * 9.0;
    CHECK(std::abs(k::avx2::dot(a.data(), b.data(), n) - k::scalar::dot(a.data(), b.data(), n)) <=
          scale);
    CHECK(k::avx2::squared_norm(a.data(), n) ==
          doctest::Approx(k::scalar::squared_norm(a.data(), n)).epsilon(1e-13));
    CHECK(k::avx2::squared_distance(a.data(), b.data(), n) ==
          doctest::Approx(k::scalar::squared_distance(a.data(), b.data(), n)).epsilon(1e-13));
  }
}
#endif

TEST_CASE("dispatching entry points follow the selected isa") {
  std::mt19937_64 gen(4);
  const auto a = random_vector(37, gen), b = random_vector(37, gen);
  const k::Isa before = k::active_isa();
  k::set_isa(k::Isa::kScalar);
  CHECK(k::dot(a, b) == k::scalar::dot(a.data(), b.data(), a.size()));
  auto y = b;
  k::axpy(2.0, a, y);
  auto ref = b;
  k::scalar::axpy(2.0, a.data(), ref.data(), ref.size());
  CHECK(bit_equal(y, ref));
  CHECK(k::set_isa(k::Isa::kAvx2) == (k::isa_supported(k::Isa::kAvx2) ? k::Isa::kAvx2 : k::Isa::kScalar));
  k::set_isa(before);
}
