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

#include "sparsetraj/kernels/kernels.hpp"

namespace sparsetraj::kernels
{
namespace
{

void gemm_nn(std::size_t m, std::size_t n, std::size_t k,
  const double * a, const double * b, double * c)
{
  for (std::size_t i = 0; i < m; ++i) {
    double * crow = c + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[i * k + p];
      if (aip == 0.0) {
        continue;
      }
      const double * brow = b + p * n;
      for (std::size_t j = 0; j < n; ++j) {
        crow[j] += aip * brow[j];
      }
    }
  }
}

void gemm_tn(std::size_t m, std::size_t n, std::size_t k,
  const double * a, const double * b, double * c)
{
  for (std::size_t p = 0; p < k; ++p) {
    const double * arow = a + p * m;
    const double * brow = b + p * n;
    for (std::size_t i = 0; i < m; ++i) {
      const double api = arow[i];
      if (api == 0.0) {
        continue;
      }
      double * crow = c + i * n;
      for (std::size_t j = 0; j < n; ++j) {
        crow[j] += api * brow[j];
      }
    }
  }
}

double dot(std::size_t n, const double * x, const double * y)
{
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += x[i] * y[i];
  }
  return acc;
}

void gemm_nt(std::size_t m, std::size_t n, std::size_t k,
  const double * a, const double * b, double * c)
{
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      c[i * n + j] += dot(k, a + i * k, b + j * k);
    }
  }
}

void axpy(std::size_t n, double alpha, const double * x, double * y)
{
  for (std::size_t i = 0; i < n; ++i) {
    y[i] += alpha * x[i];
  }
}

void relu(std::size_t n, const double * x, double * y)
{
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = x[i] > 0.0 ? x[i] : 0.0;
  }
}

void relu_backward(std::size_t n, const double * x, const double * gy, double * gx)
{
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] > 0.0) {
      gx[i] += gy[i];
    }
  }
}

void add_row_broadcast(std::size_t m, std::size_t n, const double * bias, double * c)
{
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      c[i * n + j] += bias[j];
    }
  }
}

void column_sums(std::size_t m, std::size_t n, const double * a, double * out)
{
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      out[j] += a[i * n + j];
    }
  }
}

}  // namespace

const KernelTable & scalar_table()
{
  static const KernelTable table{
    Isa::scalar, gemm_nn, gemm_tn, gemm_nt, axpy, dot, relu, relu_backward,
    add_row_broadcast, column_sums};
  return table;
}

}  // namespace sparsetraj::kernels
