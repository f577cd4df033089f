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

#ifndef SPARSETRAJ__CONFIG_HPP_
#define SPARSETRAJ__CONFIG_HPP_

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sparsetraj
{

class ConfigError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// INI-style key/value file:
///
///   # comment
///   [model]
///   kind = granma
///   embedding_width = 128
///
/// Keys before the first header land in section "". Values are trimmed
/// strings; typed getters throw ConfigError naming section.key.
class ConfigFile
{
public:
  using Section = std::map<std::string, std::string>;

  static ConfigFile parse(std::string_view text);
  static ConfigFile load(const std::filesystem::path & path);

  bool has_section(const std::string & name) const {return sections_.count(name) > 0;}
  const Section & section(const std::string & name) const;
  Section & section(const std::string & name) {return sections_[name];}

  void set(const std::string & section, const std::string & key, std::string value);

  std::string dump() const;

private:
  std::map<std::string, Section> sections_;
};

namespace config
{

std::string get_string(const ConfigFile::Section & s, const std::string & key,
  const std::string & fallback);
long long get_int(const ConfigFile::Section & s, const std::string & key, long long fallback);
double get_double(const ConfigFile::Section & s, const std::string & key, double fallback);
bool get_bool(const ConfigFile::Section & s, const std::string & key, bool fallback);

}  // namespace config

}  // namespace sparsetraj

#endif  // SPARSETRAJ__CONFIG_HPP_
