#include "syncnet/kernels.hpp"

namespace syncnet::kernels {
namespace {

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void stage_scalar(const double* y, const double* k, double a, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = y[i] + a * k[i];
}

void rk4_combine_scalar(const double* y, const double* k1, const double* k2, const double* k3,
                        const double* k4, double h6, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double sum = (k1[i] + 2.0 * k2[i]) + (2.0 * k3[i] + k4[i]);
    out[i] = y[i] + h6 * sum;
  }
}

void rotate_scalar(double* x, double* y, double c, double s, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = x[i];
    const double yi = y[i];
    x[i] = c * xi - s * yi;
    y[i] = s * xi + c * yi;
  }
}

void hadamard_scalar(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

constexpr KernelTable kScalar{
    axpy_scalar, stage_scalar, rk4_combine_scalar, rotate_scalar, hadamard_scalar, dot_scalar,
};

}  // namespace

const KernelTable& scalar_table() noexcept { return kScalar; }

}  // namespace syncnet::kernels
