// Compiled with -mavx2 only; callers reach these through the dispatch table
// after a CPUID check. No FMA: products and sums round separately so results
// match the scalar reference exactly.

#include <immintrin.h>

#include "syncnet/kernels.hpp"

namespace syncnet::kernels {
namespace {

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void stage_avx2(const double* y, const double* k, double a, double* out, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(k + i));
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (; i < n; ++i) out[i] = y[i] + a * k[i];
}

void rk4_combine_avx2(const double* y, const double* k1, const double* k2, const double* k3,
                      const double* k4, double h6, double* out, std::size_t n) {
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d vh = _mm256_set1_pd(h6);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d left =
        _mm256_add_pd(_mm256_loadu_pd(k1 + i), _mm256_mul_pd(two, _mm256_loadu_pd(k2 + i)));
    const __m256d right =
        _mm256_add_pd(_mm256_mul_pd(two, _mm256_loadu_pd(k3 + i)), _mm256_loadu_pd(k4 + i));
    const __m256d sum = _mm256_add_pd(left, right);
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_mul_pd(vh, sum)));
  }
  for (; i < n; ++i) {
    const double sum = (k1[i] + 2.0 * k2[i]) + (2.0 * k3[i] + k4[i]);
    out[i] = y[i] + h6 * sum;
  }
}

void rotate_avx2(double* x, double* y, double c, double s, std::size_t n) {
  const __m256d vc = _mm256_set1_pd(c);
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xi = _mm256_loadu_pd(x + i);
    const __m256d yi = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(x + i, _mm256_sub_pd(_mm256_mul_pd(vc, xi), _mm256_mul_pd(vs, yi)));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_mul_pd(vs, xi), _mm256_mul_pd(vc, yi)));
  }
  for (; i < n; ++i) {
    const double xi = x[i];
    const double yi = y[i];
    x[i] = c * xi - s * yi;
    y[i] = s * xi + c * yi;
  }
}

void hadamard_avx2(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double total = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) total += x[i] * y[i];
  return total;
}

constexpr KernelTable kAvx2{
    axpy_avx2, stage_avx2, rk4_combine_avx2, rotate_avx2, hadamard_avx2, dot_avx2,
};

}  // namespace

const KernelTable* avx2_table() noexcept { return &kAvx2; }

}  // namespace syncnet::kernels
