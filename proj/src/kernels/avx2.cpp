// Compiled with -mavx2 -mfma; only called after a runtime CPU check.
#include <immintrin.h>

#include "sgid/kernels.hpp"

namespace sgid::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d shuf = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(&a[i]), _mm256_loadu_pd(&b[i]), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(&a[i + 4]), _mm256_loadu_pd(&b[i + 4]), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(&a[i]), _mm256_loadu_pd(&b[i]), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  const std::size_t n = x.size();
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(&y[i]);
    _mm256_storeu_pd(&y[i], _mm256_fmadd_pd(va, _mm256_loadu_pd(&x[i]), vy));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale(double alpha, std::span<double> y) {
  const std::size_t n = y.size();
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(&y[i], _mm256_mul_pd(va, _mm256_loadu_pd(&y[i])));
  }
  for (; i < n; ++i) y[i] *= alpha;
}

double sum_squares(std::span<const double> a) { return dot(a, a); }

double sparse_dot(std::span<const std::uint32_t> idx, std::span<const double> val,
                  std::span<const double> dense) {
  const std::size_t n = idx.size();
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    __m128i vi = _mm_loadu_si128(reinterpret_cast<const __m128i*>(&idx[k]));
    __m256d g = _mm256_i32gather_pd(dense.data(), vi, 8);
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(&val[k]), g, acc);
  }
  double s = hsum(acc);
  for (; k < n; ++k) s += val[k] * dense[idx[k]];
  return s;
}

// AVX2 has no scatter; indices are distinct within a row, so the gathered
// lanes can be updated and written back lane by lane.
void sparse_axpy(double alpha, std::span<const std::uint32_t> idx,
                 std::span<const double> val, std::span<double> dense) {
  const std::size_t n = idx.size();
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t k = 0;
  alignas(32) double out[4];
  for (; k + 4 <= n; k += 4) {
    __m128i vi = _mm_loadu_si128(reinterpret_cast<const __m128i*>(&idx[k]));
    __m256d g = _mm256_i32gather_pd(dense.data(), vi, 8);
    _mm256_store_pd(out, _mm256_fmadd_pd(va, _mm256_loadu_pd(&val[k]), g));
    dense[idx[k]] = out[0];
    dense[idx[k + 1]] = out[1];
    dense[idx[k + 2]] = out[2];
    dense[idx[k + 3]] = out[3];
  }
  for (; k < n; ++k) dense[idx[k]] += alpha * val[k];
}

}  // namespace sgid::kernels::avx2
