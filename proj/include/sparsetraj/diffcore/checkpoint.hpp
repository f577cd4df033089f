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

#ifndef SPARSETRAJ__DIFFCORE__CHECKPOINT_HPP_
#define SPARSETRAJ__DIFFCORE__CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sparsetraj/diffcore/adam.hpp"
#include "sparsetraj/diffcore/parameters.hpp"

namespace sparsetraj::diff
{

class CheckpointError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// On-disk layout:
///
///   8 bytes   magic "SPTRJCK1"
///   8 bytes   header length N, little-endian uint64
///   N bytes   UTF-8 JSON header
///   payload   little-endian float64 values
///
/// The header carries free-form `metadata` (seed, epoch, config hash, model
/// spec), optional `optimizer` scalars and a `tensors` directory of
/// {name, role, shape: [rows, cols], offset, count}, with offset/count in
/// float64 units relative to the payload start. Roles: "parameter",
/// "buffer" (non-trainable state), "adam_m", "adam_v".
struct Checkpoint
{
  struct Entry
  {
    std::string name;
    std::string role;
    Array value;
  };

  nlohmann::json metadata = nlohmann::json::object();
  nlohmann::json optimizer = nullptr;
  std::vector<Entry> tensors;

  const Entry * find(std::string_view name, std::string_view role) const;
};

/// Snapshot of a parameter set, plus Adam moments when `optimizer` is given.
Checkpoint capture(const ParameterSet & params, const Adam * optimizer = nullptr);

/// Copies checkpoint values into `params`. Every parameter must be present
/// with a matching shape; throws CheckpointError otherwise.
void restore(const Checkpoint & ckpt, ParameterSet & params);
/// Restores Adam moments and counters. Throws if the checkpoint has none.
void restore(const Checkpoint & ckpt, Adam & optimizer);

std::string serialize(const Checkpoint & ckpt);
Checkpoint deserialize(std::string_view bytes);

void save_checkpoint(const std::filesystem::path & path, const Checkpoint & ckpt);
Checkpoint load_checkpoint(const std::filesystem::path & path);

/// 64-bit FNV-1a; used for checkpoint and config fingerprints.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

}  // namespace sparsetraj::diff

#endif  // SPARSETRAJ__DIFFCORE__CHECKPOINT_HPP_
