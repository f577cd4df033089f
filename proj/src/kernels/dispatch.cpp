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
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "sparsetraj/kernels/kernels.hpp"

namespace sparsetraj::kernels
{

#ifdef SPARSETRAJ_HAVE_AVX2
const KernelTable & avx2_kernel_table();
#endif

namespace
{

bool cpu_has_avx2()
{
#if defined(SPARSETRAJ_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable * select_default()
{
  const char * env = std::getenv("SPARSETRAJ_ISA");
  if (env != nullptr && std::string(env) == "scalar") {
    return &scalar_table();
  }
  if (const KernelTable * wide = avx2_table()) {
    return wide;
  }
  return &scalar_table();
}

const KernelTable *& current()
{
  static const KernelTable * table = select_default();
  return table;
}

}  // namespace

std::string_view isa_name(Isa isa)
{
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

const KernelTable * avx2_table()
{
#ifdef SPARSETRAJ_HAVE_AVX2
  static const bool supported = cpu_has_avx2();
  return supported ? &avx2_kernel_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable & active()
{
  return *current();
}

void force_isa(Isa isa)
{
  if (isa == Isa::scalar) {
    current() = &scalar_table();
    return;
  }
  const KernelTable * wide = avx2_table();
  if (wide == nullptr) {
    throw std::runtime_error("force_isa: avx2 kernels unavailable on this machine");
  }
  current() = wide;
}

}  // namespace sparsetraj::kernels
