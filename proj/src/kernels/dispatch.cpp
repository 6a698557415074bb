#include <atomic>
#include <cassert>
#include <cstdlib>
#include <string>

#include "agentcoord/kernels.hpp"

namespace agentcoord::kernels {
namespace {

struct Table {
  double (*dot)(const double*, const double*, std::size_t);
  double (*squared_norm)(const double*, std::size_t);
  double (*squared_distance)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*scale_sub)(double, const double*, double*, std::size_t);
  void (*sub)(const double*, const double*, double*, std::size_t);
};

constexpr Table kScalarTable{scalar::dot,  scalar::squared_norm,
                             scalar::squared_distance, scalar::axpy,
                             scalar::scale_sub, scalar::sub};
#if AGENTCOORD_HAVE_AVX2_KERNELS
constexpr Table kAvx2Table{avx2::dot,  avx2::squared_norm,
                           avx2::squared_distance, avx2::axpy,
                           avx2::scale_sub, avx2::sub};
#endif

const Table* table_for(Isa isa) {
#if AGENTCOORD_HAVE_AVX2_KERNELS
  if (isa == Isa::kAvx2) return &kAvx2Table;
#endif
  (void)isa;
  return &kScalarTable;
}

Isa default_isa() {
  if (const char* env = std::getenv("AGENTCOORD_ISA")) {
    if (std::string(env) == "scalar") return Isa::kScalar;
  }
  return isa_supported(Isa::kAvx2) ? Isa::kAvx2 : Isa::kScalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{default_isa()};
  return isa;
}

const Table& table() { return *table_for(current().load(std::memory_order_relaxed)); }

}  // namespace

std::string_view isa_name(Isa isa) {
  return isa == Isa::kAvx2 ? "avx2" : "scalar";
}

bool isa_supported(Isa isa) {
  if (isa == Isa::kScalar) return true;
#if AGENTCOORD_HAVE_AVX2_KERNELS
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa active_isa() { return current().load(); }

Isa set_isa(Isa isa) {
  const Isa chosen = isa_supported(isa) ? isa : Isa::kScalar;
  current().store(chosen);
  return chosen;
}

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return table().dot(a.data(), b.data(), a.size());
}

double squared_norm(std::span<const double> a) {
  return table().squared_norm(a.data(), a.size());
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return table().squared_distance(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  table().axpy(alpha, x.data(), y.data(), x.size());
}

void scale_sub(double beta, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  table().scale_sub(beta, x.data(), y.data(), x.size());
}

void sub(std::span<const double> a, std::span<const double> b,
         std::span<double> out) {
  assert(a.size() == b.size() && a.size() == out.size());
  table().sub(a.data(), b.data(), out.data(), a.size());
}

}  // namespace agentcoord::kernels
