// Copyright 2026 The cfpower Authors.
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

#include "cfpower/nn/serialize.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cfpower::nn {

using nlohmann::json;

json tensor_to_json(const Tensor& t) {
  json j;
  j["shape"] = t.shape();
  j["data"] = std::vector<double>(t.data().begin(), t.data().end());
  return j;
}

Tensor tensor_from_json(const json& j) {
  if (!j.is_object() || !j.contains("shape") || !j.contains("data"))
    throw std::runtime_error("tensor: expected an object with 'shape' and 'data'");
  return Tensor(j.at("shape").get<std::vector<std::size_t>>(), j.at("data").get<std::vector<double>>());
}

json weight_file_to_json(const WeightFile& w) {
  json j;
  j["format_version"] = kWeightFormatVersion;
  j["config"] = w.config;
  json arrays = json::object();
  for (const auto& [name, t] : w.arrays) arrays[name] = tensor_to_json(t);
  j["arrays"] = std::move(arrays);
  return j;
}

WeightFile weight_file_from_json(const json& j) {
  if (!j.is_object() || !j.contains("format_version"))
    throw std::runtime_error("weight file: missing format_version");
  const int version = j.at("format_version").get<int>();
  if (version != kWeightFormatVersion)
    throw std::runtime_error("weight file: format_version " + std::to_string(version) + " is not supported (expected " +
                             std::to_string(kWeightFormatVersion) + ")");
  WeightFile w;
  w.config = j.value("config", json::object());
  try {
    for (const auto& [name, arr] : j.at("arrays").items()) w.arrays.emplace(name, tensor_from_json(arr));
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("weight file: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("weight file: ") + e.what());
  }
  return w;
}

void save_weight_file(const WeightFile& w, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << weight_file_to_json(w).dump() << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

WeightFile load_weight_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw std::runtime_error("weight file " + path + ": parse error: " + e.what());
  }
  return weight_file_from_json(j);
}

}  // namespace cfpower::nn
