#pragma once

// Data-parallel inner loops used by the linear algebra and integrator layers.
//
// Every kernel has a portable scalar reference and, on x86-64, an AVX2 variant.
// The active variant is chosen once at first use from CPUID; setting
// SYNCNET_ISA=scalar forces the reference path. Elementwise kernels perform the
// same IEEE operations in the same order as the scalar code and therefore agree
// bit-for-bit; reductions (dot) differ only in summation order.

#include <cstddef>
#include <span>
#include <string_view>

namespace syncnet::kernels {

enum class Isa { scalar, avx2 };

[[nodiscard]] std::string_view to_string(Isa isa) noexcept;

struct KernelTable {
  // y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // out[i] = y[i] + a * k[i]
  void (*stage)(const double* y, const double* k, double a, double* out, std::size_t n);
  // out[i] = y[i] + h6 * (k1[i] + 2 k2[i] + 2 k3[i] + k4[i])
  void (*rk4_combine)(const double* y, const double* k1, const double* k2, const double* k3,
                      const double* k4, double h6, double* out, std::size_t n);
  // Plane rotation: (x, y) <- (c x - s y, s x + c y)
  void (*rotate)(double* x, double* y, double c, double s, std::size_t n);
  // out[i] = a[i] * b[i]
  void (*hadamard)(const double* a, const double* b, double* out, std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);
};

[[nodiscard]] const KernelTable& scalar_table() noexcept;
/// Null when the AVX2 variant was not compiled in.
[[nodiscard]] const KernelTable* avx2_table() noexcept;

[[nodiscard]] bool isa_available(Isa isa) noexcept;
[[nodiscard]] const KernelTable& table(Isa isa);
[[nodiscard]] Isa active_isa() noexcept;
[[nodiscard]] const KernelTable& active() noexcept;

// Span front-ends over the active table. Sizes must agree; checked in debug builds.
void axpy(double a, std::span<const double> x, std::span<double> y);
void stage(std::span<const double> y, std::span<const double> k, double a, std::span<double> out);
void rk4_combine(std::span<const double> y, std::span<const double> k1, std::span<const double> k2,
                 std::span<const double> k3, std::span<const double> k4, double h,
                 std::span<double> out);
void rotate(std::span<double> x, std::span<double> y, double c, double s);
void hadamard(std::span<const double> a, std::span<const double> b, std::span<double> out);
[[nodiscard]] double dot(std::span<const double> x, std::span<const double> y);

}  // namespace syncnet::kernels
