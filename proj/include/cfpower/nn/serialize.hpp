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

#pragma once

#include <map>
#include <string>

#include <json.hpp>

#include "cfpower/nn/tensor.hpp"

namespace cfpower::nn {

inline constexpr int kWeightFormatVersion = 1;

/// {"shape": [...], "data": [...]}. Doubles are written in shortest
/// round-trip form, so parsing restores every bit.
nlohmann::json tensor_to_json(const Tensor& t);
Tensor tensor_from_json(const nlohmann::json& j);

struct WeightFile {
  nlohmann::json config;
  std::map<std::string, Tensor> arrays;
};

nlohmann::json weight_file_to_json(const WeightFile& w);
/// Throws std::runtime_error on a version mismatch or malformed document.
WeightFile weight_file_from_json(const nlohmann::json& j);

void save_weight_file(const WeightFile& w, const std::string& path);
/// Reads the whole file before building anything; a truncated or malformed
/// file yields std::runtime_error.
WeightFile load_weight_file(const std::string& path);

}  // namespace cfpower::nn
