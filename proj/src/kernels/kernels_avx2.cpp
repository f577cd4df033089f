// Copyright 2026 The sparsetraj Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Compiled with -mavx2 -mfma; only reached through avx2_table() after a
// runtime CPU check.

#include <immintrin.h>

#include <vector>

#include "sparsetraj/kernels/kernels.hpp"

namespace sparsetraj::kernels
{
namespace
{

inline double hsum(__m256d v)
{
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  const __m128d swapped = _mm_unpackhi_pd(pair, pair);
  return _mm_cvtsd_f64(_mm_add_sd(pair, swapped));
}

// crow[0..n) += alpha * brow[0..n)
inline void row_fma(std::size_t n, double alpha, const double * brow, double * crow)
{
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t j = 0;
  for (; j + 8 <= n; j += 8) {
    __m256d c0 = _mm256_loadu_pd(crow + j);
    __m256d c1 = _mm256_loadu_pd(crow + j + 4);
    c0 = _mm256_fmadd_pd(va, _mm256_loadu_pd(brow + j), c0);
    c1 = _mm256_fmadd_pd(va, _mm256_loadu_pd(brow + j + 4), c1);
    _mm256_storeu_pd(crow + j, c0);
    _mm256_storeu_pd(crow + j + 4, c1);
  }
  for (; j + 4 <= n; j += 4) {
    __m256d c0 = _mm256_loadu_pd(crow + j);
    c0 = _mm256_fmadd_pd(va, _mm256_loadu_pd(brow + j), c0);
    _mm256_storeu_pd(crow + j, c0);
  }
  for (; j < n; ++j) {
    crow[j] += alpha * brow[j];
  }
}

// C[m x n] += A * B where A(i, p) = a[i * ars + p * acs] and B is row-major
// [k x n]. 4x8 register tiles; edges fall back to narrower tiles.
void gemm_tile(std::size_t m, std::size_t n, std::size_t k,
  const double * a, std::size_t ars, std::size_t acs, const double * b, double * c)
{
  std::size_t i = 0;
  for (; i + 4 <= m; i += 4) {
    const double * a0 = a + i * ars;
    const double * a1 = a0 + ars;
    const double * a2 = a1 + ars;
    const double * a3 = a2 + ars;
    std::size_t j = 0;
    for (; j + 8 <= n; j += 8) {
      __m256d c00 = _mm256_setzero_pd(), c01 = _mm256_setzero_pd();
      __m256d c10 = _mm256_setzero_pd(), c11 = _mm256_setzero_pd();
      __m256d c20 = _mm256_setzero_pd(), c21 = _mm256_setzero_pd();
      __m256d c30 = _mm256_setzero_pd(), c31 = _mm256_setzero_pd();
      for (std::size_t p = 0; p < k; ++p) {
        const double * brow = b + p * n + j;
        const __m256d b0 = _mm256_loadu_pd(brow);
        const __m256d b1 = _mm256_loadu_pd(brow + 4);
        __m256d av = _mm256_broadcast_sd(a0 + p * acs);
        c00 = _mm256_fmadd_pd(av, b0, c00);
        c01 = _mm256_fmadd_pd(av, b1, c01);
        av = _mm256_broadcast_sd(a1 + p * acs);
        c10 = _mm256_fmadd_pd(av, b0, c10);
        c11 = _mm256_fmadd_pd(av, b1, c11);
        av = _mm256_broadcast_sd(a2 + p * acs);
        c20 = _mm256_fmadd_pd(av, b0, c20);
        c21 = _mm256_fmadd_pd(av, b1, c21);
        av = _mm256_broadcast_sd(a3 + p * acs);
        c30 = _mm256_fmadd_pd(av, b0, c30);
        c31 = _mm256_fmadd_pd(av, b1, c31);
      }
      double * cr = c + i * n + j;
      _mm256_storeu_pd(cr, _mm256_add_pd(_mm256_loadu_pd(cr), c00));
      _mm256_storeu_pd(cr + 4, _mm256_add_pd(_mm256_loadu_pd(cr + 4), c01));
      cr += n;
      _mm256_storeu_pd(cr, _mm256_add_pd(_mm256_loadu_pd(cr), c10));
      _mm256_storeu_pd(cr + 4, _mm256_add_pd(_mm256_loadu_pd(cr + 4), c11));
      cr += n;
      _mm256_storeu_pd(cr, _mm256_add_pd(_mm256_loadu_pd(cr), c20));
      _mm256_storeu_pd(cr + 4, _mm256_add_pd(_mm256_loadu_pd(cr + 4), c21));
      cr += n;
      _mm256_storeu_pd(cr, _mm256_add_pd(_mm256_loadu_pd(cr), c30));
      _mm256_storeu_pd(cr + 4, _mm256_add_pd(_mm256_loadu_pd(cr + 4), c31));
    }
    for (; j + 4 <= n; j += 4) {
      __m256d c0 = _mm256_setzero_pd(), c1 = _mm256_setzero_pd();
      __m256d c2 = _mm256_setzero_pd(), c3 = _mm256_setzero_pd();
      for (std::size_t p = 0; p < k; ++p) {
        const __m256d bv = _mm256_loadu_pd(b + p * n + j);
        c0 = _mm256_fmadd_pd(_mm256_broadcast_sd(a0 + p * acs), bv, c0);
        c1 = _mm256_fmadd_pd(_mm256_broadcast_sd(a1 + p * acs), bv, c1);
        c2 = _mm256_fmadd_pd(_mm256_broadcast_sd(a2 + p * acs), bv, c2);
        c3 = _mm256_fmadd_pd(_mm256_broadcast_sd(a3 + p * acs), bv, c3);
      }
      double * cr = c + i * n + j;
      _mm256_storeu_pd(cr, _mm256_add_pd(_mm256_loadu_pd(cr), c0));
      _mm256_storeu_pd(cr + n, _mm256_add_pd(_mm256_loadu_pd(cr + n), c1));
      _mm256_storeu_pd(cr + 2 * n, _mm256_add_pd(_mm256_loadu_pd(cr + 2 * n), c2));
      _mm256_storeu_pd(cr + 3 * n, _mm256_add_pd(_mm256_loadu_pd(cr + 3 * n), c3));
    }
    for (; j < n; ++j) {
      double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
      for (std::size_t p = 0; p < k; ++p) {
        const double bv = b[p * n + j];
        s0 += a0[p * acs] * bv;
        s1 += a1[p * acs] * bv;
        s2 += a2[p * acs] * bv;
        s3 += a3[p * acs] * bv;
      }
      c[i * n + j] += s0;
      c[(i + 1) * n + j] += s1;
      c[(i + 2) * n + j] += s2;
      c[(i + 3) * n + j] += s3;
    }
  }
  for (; i < m; ++i) {
    const double * ar = a + i * ars;
    double * crow = c + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = ar[p * acs];
      if (aip != 0.0) {
        row_fma(n, aip, b + p * n, crow);
      }
    }
  }
}

void gemm_strided(std::size_t m, std::size_t n, std::size_t k,
  const double * a, std::size_t ars, std::size_t acs, const double * b, double * c)
{
  constexpr std::size_t kDepth = 256;
  for (std::size_t p0 = 0; p0 < k; p0 += kDepth) {
    const std::size_t kk = k - p0 < kDepth ? k - p0 : kDepth;
    gemm_tile(m, n, kk, a + p0 * acs, ars, acs, b + p0 * n, c);
  }
}

void gemm_nn(std::size_t m, std::size_t n, std::size_t k,
  const double * a, const double * b, double * c)
{
  gemm_strided(m, n, k, a, k, 1, b, c);
}

void gemm_tn(std::size_t m, std::size_t n, std::size_t k,
  const double * a, const double * b, double * c)
{
  gemm_strided(m, n, k, a, 1, m, b, c);
}

void gemm_nt(std::size_t m, std::size_t n, std::size_t k,
  const double * a, const double * b, double * c)
{
  thread_local std::vector<double> bt;
  bt.resize(k * n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t p = 0; p < k; ++p) {
      bt[p * n + j] = b[j * k + p];
    }
  }
  gemm_strided(m, n, k, a, k, 1, bt.data(), c);
}

double dot(std::size_t n, const double * x, const double * y)
{
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) {
    acc += x[i] * y[i];
  }
  return acc;
}

void axpy(std::size_t n, double alpha, const double * x, double * y)
{
  row_fma(n, alpha, x, y);
}

void relu(std::size_t n, const double * x, double * y)
{
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_max_pd(_mm256_loadu_pd(x + i), zero));
  }
  for (; i < n; ++i) {
    y[i] = x[i] > 0.0 ? x[i] : 0.0;
  }
}

void relu_backward(std::size_t n, const double * x, const double * gy, double * gx)
{
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(x + i), zero, _CMP_GT_OQ);
    const __m256d pass = _mm256_and_pd(mask, _mm256_loadu_pd(gy + i));
    _mm256_storeu_pd(gx + i, _mm256_add_pd(_mm256_loadu_pd(gx + i), pass));
  }
  for (; i < n; ++i) {
    if (x[i] > 0.0) {
      gx[i] += gy[i];
    }
  }
}

void add_row_broadcast(std::size_t m, std::size_t n, const double * bias, double * c)
{
  for (std::size_t r = 0; r < m; ++r) {
    double * crow = c + r * n;
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
      _mm256_storeu_pd(crow + j,
        _mm256_add_pd(_mm256_loadu_pd(crow + j), _mm256_loadu_pd(bias + j)));
    }
    for (; j < n; ++j) {
      crow[j] += bias[j];
    }
  }
}

void column_sums(std::size_t m, std::size_t n, const double * a, double * out)
{
  for (std::size_t r = 0; r < m; ++r) {
    const double * arow = a + r * n;
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
      _mm256_storeu_pd(out + j,
        _mm256_add_pd(_mm256_loadu_pd(out + j), _mm256_loadu_pd(arow + j)));
    }
    for (; j < n; ++j) {
      out[j] += arow[j];
    }
  }
}

}  // namespace

const KernelTable & avx2_kernel_table()
{
  static const KernelTable table{
    Isa::avx2, gemm_nn, gemm_tn, gemm_nt, axpy, dot, relu, relu_backward,
    add_row_broadcast, column_sums};
  return table;
}

}  // namespace sparsetraj::kernels
