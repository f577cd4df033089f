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
#include "sparsetraj/diffcore/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace sparsetraj::diff
{
namespace
{

constexpr std::string_view kMagic = "SPTRJCK1";

template<typename T>
T to_little(T v)
{
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) {
      std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
    }
    std::memcpy(&v, bytes, sizeof(T));
  }
  return v;
}

void append_u64(std::string & out, std::uint64_t v)
{
  v = to_little(v);
  out.append(reinterpret_cast<const char *>(&v), sizeof(v));
}

std::uint64_t read_u64(std::string_view bytes, std::size_t pos)
{
  std::uint64_t v = 0;
  std::memcpy(&v, bytes.data() + pos, sizeof(v));
  return to_little(v);
}

}  // namespace

const Checkpoint::Entry * Checkpoint::find(std::string_view name, std::string_view role) const
{
  for (const Entry & e : tensors) {
    if (e.name == name && e.role == role) {
      return &e;
    }
  }
  return nullptr;
}

Checkpoint capture(const ParameterSet & params, const Adam * optimizer)
{
  Checkpoint ckpt;
  for (const Parameter * p : params.all()) {
    ckpt.tensors.push_back({p->name, p->trainable ? "parameter" : "buffer", p->value});
  }
  if (optimizer != nullptr) {
    const OptimizerState & st = optimizer->state();
    const auto & tracked = optimizer->parameters();
    for (std::size_t k = 0; k < tracked.size(); ++k) {
      ckpt.tensors.push_back({tracked[k]->name, "adam_m", st.first_moment[k]});
      ckpt.tensors.push_back({tracked[k]->name, "adam_v", st.second_moment[k]});
    }
    ckpt.optimizer = {
      {"kind", "adam"},
      {"steps", st.steps},
      {"learning_rate", st.learning_rate},
      {"decay", st.decay},
      {"beta1", optimizer->config().beta1},
      {"beta2", optimizer->config().beta2},
      {"eps", optimizer->config().eps},
    };
  }
  return ckpt;
}

void restore(const Checkpoint & ckpt, ParameterSet & params)
{
  for (Parameter * p : params.all()) {
    const Checkpoint::Entry * e = ckpt.find(p->name, p->trainable ? "parameter" : "buffer");
    if (e == nullptr) {
      throw CheckpointError("checkpoint has no tensor for parameter '" + p->name + "'");
    }
    if (!e->value.same_shape(p->value)) {
      throw CheckpointError(
        "checkpoint tensor '" + p->name + "' has shape " + e->value.shape_string() +
        ", model expects " + p->value.shape_string());
    }
    p->value = e->value;
  }
  std::size_t expected = 0;
  for (const auto & e : ckpt.tensors) {
    if (e.role == "parameter" || e.role == "buffer") {
      ++expected;
    }
  }
  if (expected != params.size()) {
    throw CheckpointError(
      "checkpoint holds " + std::to_string(expected) + " parameters, model has " +
      std::to_string(params.size()));
  }
}

void restore(const Checkpoint & ckpt, Adam & optimizer)
{
  if (ckpt.optimizer.is_null()) {
    throw CheckpointError("checkpoint carries no optimizer state");
  }
  OptimizerState & st = optimizer.state();
  const auto & tracked = optimizer.parameters();
  for (std::size_t k = 0; k < tracked.size(); ++k) {
    const auto * m = ckpt.find(tracked[k]->name, "adam_m");
    const auto * v = ckpt.find(tracked[k]->name, "adam_v");
    if (m == nullptr || v == nullptr || !m->value.same_shape(st.first_moment[k]) ||
      !v->value.same_shape(st.second_moment[k]))
    {
      throw CheckpointError("optimizer moments missing or mis-shaped for '" + tracked[k]->name + "'");
    }
    st.first_moment[k] = m->value;
    st.second_moment[k] = v->value;
  }
  st.steps = ckpt.optimizer.at("steps").get<std::int64_t>();
  st.learning_rate = ckpt.optimizer.at("learning_rate").get<double>();
  st.decay = ckpt.optimizer.at("decay").get<double>();
}

std::string serialize(const Checkpoint & ckpt)
{
  nlohmann::json header;
  header["format"] = "sparsetraj-checkpoint";
  header["version"] = 1;
  header["metadata"] = ckpt.metadata;
  header["optimizer"] = ckpt.optimizer;
  header["tensors"] = nlohmann::json::array();
  std::uint64_t offset = 0;
  for (const auto & e : ckpt.tensors) {
    header["tensors"].push_back({
        {"name", e.name},
        {"role", e.role},
        {"shape", {e.value.rows(), e.value.cols()}},
        {"offset", offset},
        {"count", e.value.size()},
      });
    offset += e.value.size();
  }
  const std::string text = header.dump();

  std::string out;
  out.reserve(kMagic.size() + 8 + text.size() + offset * 8);
  out.append(kMagic);
  append_u64(out, text.size());
  out.append(text);
  for (const auto & e : ckpt.tensors) {
    for (double v : e.value.values()) {
      std::uint64_t bits = 0;
      std::memcpy(&bits, &v, sizeof(bits));
      append_u64(out, bits);
    }
  }
  return out;
}

Checkpoint deserialize(std::string_view bytes)
{
  if (bytes.size() < kMagic.size() + 8 || bytes.substr(0, kMagic.size()) != kMagic) {
    throw CheckpointError("not a sparsetraj checkpoint (bad magic)");
  }
  const std::uint64_t header_len = read_u64(bytes, kMagic.size());
  const std::size_t payload_start = kMagic.size() + 8 + header_len;
  if (payload_start > bytes.size()) {
    throw CheckpointError("truncated checkpoint header");
  }
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(kMagic.size() + 8, header_len));
  } catch (const nlohmann::json::exception & e) {
    throw CheckpointError(std::string("corrupt checkpoint header: ") + e.what());
  }
  if (header.value("version", 0) != 1) {
    throw CheckpointError("unsupported checkpoint version");
  }
  const std::size_t payload_values = (bytes.size() - payload_start) / 8;

  Checkpoint ckpt;
  ckpt.metadata = header.value("metadata", nlohmann::json::object());
  ckpt.optimizer = header.value("optimizer", nlohmann::json());
  for (const auto & t : header.at("tensors")) {
    const auto rows = t.at("shape").at(0).get<std::size_t>();
    const auto cols = t.at("shape").at(1).get<std::size_t>();
    const auto offset = t.at("offset").get<std::size_t>();
    const auto count = t.at("count").get<std::size_t>();
    if (count != rows * cols || offset + count > payload_values) {
      throw CheckpointError("checkpoint tensor '" + t.at("name").get<std::string>() +
        "' exceeds the payload");
    }
    std::vector<double> values(count);
    for (std::size_t i = 0; i < count; ++i) {
      const std::uint64_t bits = read_u64(bytes, payload_start + (offset + i) * 8);
      std::memcpy(&values[i], &bits, sizeof(double));
    }
    ckpt.tensors.push_back(
      {t.at("name").get<std::string>(), t.at("role").get<std::string>(),
        Array(rows, cols, std::move(values))});
  }
  return ckpt;
}

void save_checkpoint(const std::filesystem::path & path, const Checkpoint & ckpt)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw CheckpointError("cannot open '" + path.string() + "' for writing");
  }
  const std::string bytes = serialize(ckpt);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw CheckpointError("failed writing '" + path.string() + "'");
  }
}

Checkpoint load_checkpoint(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw CheckpointError("cannot open checkpoint '" + path.string() + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return deserialize(buffer.str());
}

std::uint64_t fnv1a64(std::string_view bytes)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value)
{
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << value;
  return os.str();
}

}  // namespace sparsetraj::diff
