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
#include "sparsetraj/config.hpp"
#ifndef SPARSETRAJ__KERNELS__ALLOCATOR_HPP_
#define SPARSETRAJ__KERNELS__ALLOCATOR_HPP_

namespace sparsetraj::kernels
{

/// Keeps large tensor buffers on the heap instead of mapping and unmapping
/// them on every allocation. Call once from main(); no-op off glibc.
void tune_allocator();

}  // namespace sparsetraj::kernels

#endif  // SPARSETRAJ__KERNELS__ALLOCATOR_HPP_
