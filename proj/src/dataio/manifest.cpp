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
#include "sparsetraj/dataio/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "sparsetraj/diffcore/checkpoint.hpp"

namespace sparsetraj::data
{

std::string_view to_string(Split split)
{
  switch (split) {
    case Split::train:
      return "train";
    case Split::val:
      return "val";
    case Split::test:
      return "test";
  }
  return "?";
}

Split parse_split(std::string_view text)
{
  if (text == "train") {
    return Split::train;
  }
  if (text == "val") {
    return Split::val;
  }
  if (text == "test") {
    return Split::test;
  }
  throw std::invalid_argument("unknown split '" + std::string(text) + "'");
}

Manifest Manifest::load(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open manifest " + path.string());
  }
  Manifest m;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line.erase(hash);
    }
    std::istringstream fields(line);
    std::string split;
    std::string file;
    if (!(fields >> split)) {
      continue;
    }
    if (!(fields >> file)) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": missing path");
    }
    Entry e{Split::train, file};
    try {
      e.split = parse_split(split);
    } catch (const std::invalid_argument & err) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": " + err.what());
    }
    if (e.path.is_relative()) {
      e.path = path.parent_path() / e.path;
    }
    m.entries.push_back(std::move(e));
  }
  return m;
}

void Manifest::save(const std::filesystem::path & path) const
{
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write manifest " + path.string());
  }
  out << "# split path\n";
  const auto base = path.parent_path();
  for (const Entry & e : entries) {
    auto p = e.path;
    if (!base.empty() && p.is_absolute() == base.is_absolute()) {
      const auto rel = std::filesystem::relative(p, base);
      if (!rel.empty()) {
        p = rel;
      }
    }
    out << to_string(e.split) << ' ' << p.generic_string() << '\n';
  }
}

std::vector<std::filesystem::path> Manifest::paths(Split split) const
{
  std::vector<std::filesystem::path> out;
  for (const Entry & e : entries) {
    if (e.split == split) {
      out.push_back(e.path);
    }
  }
  return out;
}

std::vector<Split> split_by_match(const std::vector<std::string> & match_ids)
{
  const std::size_t n = match_ids.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const auto ha = diff::fnv1a64(match_ids[a]);
      const auto hb = diff::fnv1a64(match_ids[b]);
      return ha != hb ? ha < hb : match_ids[a] < match_ids[b];
    });
  std::size_t n_val = n / 10;
  std::size_t n_test = n / 10;
  if (n >= 3) {
    n_val = std::max<std::size_t>(n_val, 1);
    n_test = std::max<std::size_t>(n_test, 1);
  }
  const std::size_t n_train = n - n_val - n_test;
  std::vector<Split> out(n, Split::train);
  for (std::size_t rank = 0; rank < n; ++rank) {
    out[order[rank]] = rank < n_train ? Split::train :
      (rank < n_train + n_val ? Split::val : Split::test);
  }
  return out;
}

std::vector<PredictionWindow> load_split(const Manifest & manifest, Split split,
  const WindowParams & params, int team_size)
{
  std::vector<PredictionWindow> out;
  for (const auto & path : manifest.paths(split)) {
    auto windows = make_windows(load_tracking(path, team_size), params);
    std::move(windows.begin(), windows.end(), std::back_inserter(out));
  }
  return out;
}

}  // namespace sparsetraj::data
