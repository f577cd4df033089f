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

#ifndef SPARSETRAJ__KERNELS__KERNELS_HPP_
#define SPARSETRAJ__KERNELS__KERNELS_HPP_

#include <cstddef>
#include <string_view>

namespace sparsetraj::kernels
{

/// Instruction-set variants a kernel table can be built for.
enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

/// Dense row-major double kernels. Every matrix kernel accumulates into its
/// output (C += ...); callers zero the destination when they want assignment.
struct KernelTable
{
  Isa isa;

  // C[m x n] += A[m x k] * B[k x n]
  void (*gemm_nn)(std::size_t m, std::size_t n, std::size_t k,
    const double * a, const double * b, double * c);
  // C[m x n] += A^T * B, A is [k x m], B is [k x n]
  void (*gemm_tn)(std::size_t m, std::size_t n, std::size_t k,
    const double * a, const double * b, double * c);
  // C[m x n] += A * B^T, A is [m x k], B is [n x k]
  void (*gemm_nt)(std::size_t m, std::size_t n, std::size_t k,
    const double * a, const double * b, double * c);

  // y += alpha * x
  void (*axpy)(std::size_t n, double alpha, const double * x, double * y);
  double (*dot)(std::size_t n, const double * x, const double * y);
  // y = max(x, 0)
  void (*relu)(std::size_t n, const double * x, double * y);
  // gx += (x > 0) ? gy : 0
  void (*relu_backward)(std::size_t n, const double * x, const double * gy, double * gx);
  // C[i, :] += bias for every row i
  void (*add_row_broadcast)(std::size_t m, std::size_t n, const double * bias, double * c);
  // out[:] += sum_i A[i, :]
  void (*column_sums)(std::size_t m, std::size_t n, const double * a, double * out);
};

const KernelTable & scalar_table();

/// Returns nullptr when the AVX2 variant was not compiled in or the running CPU
/// lacks AVX2/FMA.
const KernelTable * avx2_table();

/// Table selected for this process: the widest supported ISA unless the
/// SPARSETRAJ_ISA environment variable ("scalar" or "avx2") or force_isa()
/// says otherwise.
const KernelTable & active();

/// Overrides the runtime selection. Throws std::runtime_error if the requested
/// ISA is unavailable on this machine.
void force_isa(Isa isa);

}  // namespace sparsetraj::kernels

#endif  // SPARSETRAJ__KERNELS__KERNELS_HPP_
