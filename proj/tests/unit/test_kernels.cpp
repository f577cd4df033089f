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
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "sparsetraj/kernels/kernels.hpp"

namespace k = sparsetraj::kernels;

namespace
{

std::vector<double> random_values(std::size_t n, std::mt19937_64 & rng, double zero_rate = 0.0)
{
  std::uniform_real_distribution<double> value(-2.0, 2.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<double> out(n);
  for (auto & v : out) {
    v = coin(rng) < zero_rate ? 0.0 : value(rng);
  }
  return out;
}

double max_abs_diff(const std::vector<double> & a, const std::vector<double> & b)
{
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  return worst;
}

// Plain triple loop, independent of both tables.
std::vector<double> naive_gemm(std::size_t m, std::size_t n, std::size_t k,
  const std::vector<double> & a, bool ta, const std::vector<double> & b, bool tb,
  std::vector<double> c)
{
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < k; ++p) {
        const double av = ta ? a[p * m + i] : a[i * k + p];
        const double bv = tb ? b[j * k + p] : b[p * n + j];
        s += av * bv;
      }
      c[i * n + j] += s;
    }
  }
  return c;
}

}  // namespace

TEST_CASE("isa names")
{
  CHECK(k::isa_name(k::Isa::scalar) == "scalar");
  CHECK(k::isa_name(k::Isa::avx2) == "avx2");
  CHECK(k::scalar_table().isa == k::Isa::scalar);
}

TEST_CASE("scalar gemm variants match the naive product")
{
  std::mt19937_64 rng(11);
  const auto & t = k::scalar_table();
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t m = 1 + rng() % 13;
    const std::size_t n = 1 + rng() % 19;
    const std::size_t kk = 1 + rng() % 17;
    const auto a = random_values(m * kk, rng, 0.2);
    const auto b = random_values(kk * n, rng);
    const auto c0 = random_values(m * n, rng);
    auto c = c0;
    t.gemm_nn(m, n, kk, a.data(), b.data(), c.data());
    CHECK(max_abs_diff(c, naive_gemm(m, n, kk, a, false, b, false, c0)) < 1e-12);
    c = c0;
    t.gemm_tn(m, n, kk, a.data(), b.data(), c.data());
    CHECK(max_abs_diff(c, naive_gemm(m, n, kk, a, true, b, false, c0)) < 1e-12);
    c = c0;
    t.gemm_nt(m, n, kk, a.data(), b.data(), c.data());
    CHECK(max_abs_diff(c, naive_gemm(m, n, kk, a, false, b, true, c0)) < 1e-12);
  }
}

TEST_CASE("avx2 table is equivalent to the scalar reference")
{
  const k::KernelTable * fast = k::avx2_table();
  if (fast == nullptr) {
    MESSAGE("avx2 unavailable on this machine; equivalence not exercised");
    return;
  }
  const auto & ref = k::scalar_table();
  std::mt19937_64 rng(2024);

  SUBCASE("matrix products, ragged and k-blocked shapes") {
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t m = 1 + rng() % 21;
      const std::size_t n = 1 + rng() % 37;
      const std::size_t kk = trial % 10 == 0 ? 300 + rng() % 300 : 1 + rng() % 29;
      const auto a = random_values(m * kk, rng, 0.3);
      const auto b = random_values(kk * n, rng);
      const auto c0 = random_values(m * n, rng);
      const double tol = 1e-12 * static_cast<double>(kk);
      for (int variant = 0; variant < 3; ++variant) {
        auto c_ref = c0;
        auto c_fast = c0;
        auto fn_ref = variant == 0 ? ref.gemm_nn : variant == 1 ? ref.gemm_tn : ref.gemm_nt;
        auto fn_fast = variant == 0 ? fast->gemm_nn : variant == 1 ? fast->gemm_tn : fast->gemm_nt;
        fn_ref(m, n, kk, a.data(), b.data(), c_ref.data());
        fn_fast(m, n, kk, a.data(), b.data(), c_fast.data());
        CHECK(max_abs_diff(c_ref, c_fast) < tol);
      }
    }
  }

  SUBCASE("vector kernels") {
    for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 9u, 16u, 31u, 100u, 1001u}) {
      const auto x = random_values(n, rng);
      const auto y0 = random_values(n, rng);
      const auto gy = random_values(n, rng);

      auto y_ref = y0;
      auto y_fast = y0;
      ref.axpy(n, 0.37, x.data(), y_ref.data());
      fast->axpy(n, 0.37, x.data(), y_fast.data());
      CHECK(max_abs_diff(y_ref, y_fast) < 1e-14);

      CHECK(std::abs(ref.dot(n, x.data(), y0.data()) - fast->dot(n, x.data(), y0.data())) <
        1e-12 * static_cast<double>(n + 1));

      ref.relu(n, x.data(), y_ref.data());
      fast->relu(n, x.data(), y_fast.data());
      CHECK(y_ref == y_fast);

      y_ref = y0;
      y_fast = y0;
      ref.relu_backward(n, x.data(), gy.data(), y_ref.data());
      fast->relu_backward(n, x.data(), gy.data(), y_fast.data());
      CHECK(y_ref == y_fast);
    }
  }

  SUBCASE("row broadcasts and column sums") {
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t m = 1 + rng() % 40;
      const std::size_t n = 1 + rng() % 40;
      const auto a = random_values(m * n, rng);
      const auto bias = random_values(n, rng);
      auto c_ref = a;
      auto c_fast = a;
      ref.add_row_broadcast(m, n, bias.data(), c_ref.data());
      fast->add_row_broadcast(m, n, bias.data(), c_fast.data());
      CHECK(c_ref == c_fast);

      std::vector<double> s_ref(n, 1.0);
      std::vector<double> s_fast(n, 1.0);
      ref.column_sums(m, n, a.data(), s_ref.data());
      fast->column_sums(m, n, a.data(), s_fast.data());
      CHECK(max_abs_diff(s_ref, s_fast) < 1e-12);
    }
  }
}

TEST_CASE("force_isa switches the active table")
{
  const k::Isa before = k::active().isa;
  k::force_isa(k::Isa::scalar);
  CHECK(k::active().isa == k::Isa::scalar);
  if (k::avx2_table() != nullptr) {
    k::force_isa(k::Isa::avx2);
    CHECK(k::active().isa == k::Isa::avx2);
  } else {
    CHECK_THROWS_AS(k::force_isa(k::Isa::avx2), std::runtime_error);
  }
  k::force_isa(before);
}
