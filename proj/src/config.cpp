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

#include <charconv>
#include <fstream>
#include <sstream>

namespace sparsetraj
{
namespace
{

std::string trim(std::string_view s)
{
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) {
    return {};
  }
  const auto end = s.find_last_not_of(" \t\r");
  return std::string(s.substr(begin, end - begin + 1));
}

}  // namespace

ConfigFile ConfigFile::parse(std::string_view text)
{
  ConfigFile cfg;
  std::string current;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = trim(line);
    if (body.empty() || body[0] == '#' || body[0] == ';') {
      continue;
    }
    if (body.front() == '[') {
      if (body.back() != ']') {
        throw ConfigError("config line " + std::to_string(line_no) + ": unterminated section header");
      }
      current = trim(std::string_view(body).substr(1, body.size() - 2));
      cfg.sections_[current];
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    cfg.sections_[current][trim(std::string_view(body).substr(0, eq))] =
      trim(std::string_view(body).substr(eq + 1));
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config '" + path.string() + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

const ConfigFile::Section & ConfigFile::section(const std::string & name) const
{
  static const Section empty;
  const auto it = sections_.find(name);
  return it == sections_.end() ? empty : it->second;
}

void ConfigFile::set(const std::string & section, const std::string & key, std::string value)
{
  sections_[section][key] = std::move(value);
}

std::string ConfigFile::dump() const
{
  std::ostringstream out;
  bool first = true;
  for (const auto & [name, entries] : sections_) {
    if (!first) {
      out << '\n';
    }
    first = false;
    if (!name.empty()) {
      out << '[' << name << "]\n";
    }
    for (const auto & [key, value] : entries) {
      out << key << " = " << value << '\n';
    }
  }
  return out.str();
}

namespace config
{

std::string get_string(const ConfigFile::Section & s, const std::string & key,
  const std::string & fallback)
{
  const auto it = s.find(key);
  return it == s.end() ? fallback : it->second;
}

long long get_int(const ConfigFile::Section & s, const std::string & key, long long fallback)
{
  const auto it = s.find(key);
  if (it == s.end()) {
    return fallback;
  }
  long long v = 0;
  const auto & text = it->second;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ConfigError("config key '" + key + "': expected an integer, got '" + text + "'");
  }
  return v;
}

double get_double(const ConfigFile::Section & s, const std::string & key, double fallback)
{
  const auto it = s.find(key);
  if (it == s.end()) {
    return fallback;
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used != it->second.size()) {
      throw std::invalid_argument("trailing characters");
    }
    return v;
  } catch (const std::exception &) {
    throw ConfigError("config key '" + key + "': expected a number, got '" + it->second + "'");
  }
}

bool get_bool(const ConfigFile::Section & s, const std::string & key, bool fallback)
{
  const auto it = s.find(key);
  if (it == s.end()) {
    return fallback;
  }
  const std::string & v = it->second;
  if (v == "true" || v == "1" || v == "yes") {
    return true;
  }
  if (v == "false" || v == "0" || v == "no") {
    return false;
  }
  throw ConfigError("config key '" + key + "': expected a boolean, got '" + v + "'");
}

}  // namespace config

}  // namespace sparsetraj
