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

#include <filesystem>
#include <string>
#include <vector>

#include "cfpower/evaluation.hpp"

namespace cfpower {

// CSV files and their headers:
//   cdf_ul.csv, cdf_dl.csv   fraction,optimal,predicted,epa,fpa
//     one row per pooled per-UE SE value; each column sorted independently
//   sweep_k.csv, sweep_l.csv
//     K,L,samples,se_opt_ul,se_pred_ul,se_epa_ul,se_opt_dl,se_pred_dl,se_epa_dl

/// Writes the two CDF CSVs (and SVGs when `svg`); returns the written paths.
std::vector<std::filesystem::path> export_cdf_plots(const std::vector<EvalRecord>& records,
                                                    const std::filesystem::path& out_dir, bool svg);

std::vector<std::filesystem::path> export_sweep_plot(const std::vector<SweepRow>& rows, const std::string& stem,
                                                     const std::filesystem::path& out_dir, bool svg);

/// Shortest decimal that parses back to the same double.
std::string format_number(double v);

}  // namespace cfpower
