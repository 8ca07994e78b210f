#include <cassert>
#include <cstdlib>
#include <string_view>

#include "syncnet/error.hpp"
#include "syncnet/kernels.hpp"

namespace syncnet::kernels {

#ifndef SYNCNET_HAVE_AVX2
const KernelTable* avx2_table() noexcept { return nullptr; }
#endif

std::string_view to_string(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(SYNCNET_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
      return avx2_table() != nullptr && __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Isa isa) {
  if (!isa_available(isa)) {
    throw Error(ErrorKind::InvalidArgument,
                "kernel variant '" + std::string(to_string(isa)) + "' is not available");
  }
  return isa == Isa::avx2 ? *avx2_table() : scalar_table();
}

namespace {

Isa select_isa() noexcept {
  if (const char* forced = std::getenv("SYNCNET_ISA")) {
    if (std::string_view(forced) == "scalar") return Isa::scalar;
  }
  return isa_available(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

}  // namespace

Isa active_isa() noexcept {
  static const Isa isa = select_isa();
  return isa;
}

const KernelTable& active() noexcept {
  static const KernelTable& t = active_isa() == Isa::avx2 ? *avx2_table() : scalar_table();
  return t;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  active().axpy(a, x.data(), y.data(), y.size());
}

void stage(std::span<const double> y, std::span<const double> k, double a, std::span<double> out) {
  assert(y.size() == k.size() && y.size() == out.size());
  active().stage(y.data(), k.data(), a, out.data(), out.size());
}

void rk4_combine(std::span<const double> y, std::span<const double> k1, std::span<const double> k2,
                 std::span<const double> k3, std::span<const double> k4, double h,
                 std::span<double> out) {
  assert(y.size() == out.size() && k1.size() == out.size() && k2.size() == out.size() &&
         k3.size() == out.size() && k4.size() == out.size());
  active().rk4_combine(y.data(), k1.data(), k2.data(), k3.data(), k4.data(), h / 6.0, out.data(),
                       out.size());
}

void rotate(std::span<double> x, std::span<double> y, double c, double s) {
  assert(x.size() == y.size());
  active().rotate(x.data(), y.data(), c, s, x.size());
}

void hadamard(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  assert(a.size() == b.size() && a.size() == out.size());
  active().hadamard(a.data(), b.data(), out.data(), out.size());
}

double dot(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  return active().dot(x.data(), y.data(), x.size());
}

}  // namespace syncnet::kernels
