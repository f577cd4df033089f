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
#ifndef SPARSETRAJ__DATAIO__MANIFEST_HPP_
#define SPARSETRAJ__DATAIO__MANIFEST_HPP_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sparsetraj/dataio/tracking.hpp"
#include "sparsetraj/dataio/windows.hpp"

namespace sparsetraj::data
{

enum class Split { train, val, test };

std::string_view to_string(Split split);
/// Throws std::invalid_argument for anything but train/val/test.
Split parse_split(std::string_view text);

/// Dataset manifest, one entry per line:
///
///   # comment
///   <split> <path>
///
/// Relative paths are resolved against the manifest's directory.
struct Manifest
{
  struct Entry
  {
    Split split;
    std::filesystem::path path;
  };

  std::vector<Entry> entries;

  static Manifest load(const std::filesystem::path & path);
  void save(const std::filesystem::path & path) const;
  std::vector<std::filesystem::path> paths(Split split) const;
};

/// Assigns matches to splits 80/10/10. Matches are ordered by the FNV-1a
/// hash of their id (ties broken by id), then the first 80% go to train and
/// the next 10% to validation; every split gets at least one match when
/// there are three or more.
std::vector<Split> split_by_match(const std::vector<std::string> & match_ids);

/// Windows of every file of one split.
std::vector<PredictionWindow> load_split(const Manifest & manifest, Split split,
  const WindowParams & params, int team_size = 11);

}  // namespace sparsetraj::data

#endif  // SPARSETRAJ__DATAIO__MANIFEST_HPP_
