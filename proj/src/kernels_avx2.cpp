// Compiled with -mavx2 -mfma; only reached after a CPUID check.

#include <immintrin.h>

#include "simplexi/kernels.hpp"

namespace simplexi::kernels::detail {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

}  // namespace

double dot_avx2(const double* x, const double* y, std::int64_t len) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::int64_t i = 0;
  for (; i + 8 <= len; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  if (i + 4 <= len) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    i += 4;
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < len; ++i) acc += x[i] * y[i];
  return acc;
}

void axpy_avx2(double a, const double* x, double* y, std::int64_t len) {
  const __m256d va = _mm256_set1_pd(a);
  std::int64_t i = 0;
  for (; i + 8 <= len; i += 8) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    _mm256_storeu_pd(y + i + 4,
                     _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4)));
  }
  if (i + 4 <= len) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    i += 4;
  }
  for (; i < len; ++i) y[i] += a * x[i];
}

double gather_dot_avx2(const std::int64_t* idx, const double* vals, const double* y,
                       std::int64_t len) {
  __m256d acc = _mm256_setzero_pd();
  std::int64_t p = 0;
  for (; p + 4 <= len; p += 4) {
    const __m256i vi = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(idx + p));
    const __m256d g = _mm256_i64gather_pd(y, vi, 8);
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(vals + p), g, acc);
  }
  double out = hsum(acc);
  for (; p < len; ++p) out += vals[p] * y[idx[p]];
  return out;
}

// No scatter instruction in AVX2: products are vectorized, stores stay
// ordered so repeated indices accumulate exactly like the scalar path.
void scatter_axpy_avx2(double a, const std::int64_t* idx, const double* vals, double* y,
                       std::int64_t len) {
  const __m256d va = _mm256_set1_pd(a);
  alignas(32) double prod[4];
  std::int64_t p = 0;
  for (; p + 4 <= len; p += 4) {
    _mm256_store_pd(prod, _mm256_mul_pd(va, _mm256_loadu_pd(vals + p)));
    y[idx[p]] += prod[0];
    y[idx[p + 1]] += prod[1];
    y[idx[p + 2]] += prod[2];
    y[idx[p + 3]] += prod[3];
  }
  for (; p < len; ++p) y[idx[p]] += a * vals[p];
}

}  // namespace simplexi::kernels::detail
