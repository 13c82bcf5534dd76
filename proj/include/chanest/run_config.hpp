// SPDX-License-Identifier: Apache-2.0
//
// chanest: uplink channel estimation with subspace angle sensing
// Copyright (C) 2026 The chanest authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include "chanest/simharness.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace chanest {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Experiment configuration read from a flat `key = value` text file.
///
/// Lines starting with `#` are comments. Power ratios take an explicit
/// `dB` or `lin` suffix (`pilot_snr = -10 dB`), angles take `deg` or `rad`
/// (`angles = -30 deg, 0 deg, 30 deg`). Unknown or repeated keys are errors.
/// See configs/README for the full key list.
struct RunConfig {
  ExperimentSpec spec;
  std::filesystem::path output_dir = ".";
  int verbosity = 0;
  double max_failure_rate = 0.1;

  /// Raw sweep_values text; resolved against the final axis by finalize().
  std::optional<std::string> sweep_values_text;

  /// Resolves sweep values for the current axis (or the axis defaults) and
  /// validates the experiment settings. Call after command-line overrides.
  void finalize();
};

RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::filesystem::path &path);

/// Default sweep grid per axis: M in {8,16,32,64}, P_t/sigma^2 over
/// -20..0 dB, P_d/sigma^2 over -30..5 dB, rho in {1,2,3,4,6,8}.
std::vector<double> default_sweep_values(SweepAxis axis);

/// "<number> dB" or "<number> lin", returned in dB.
double parse_power_db(std::string_view text);
/// "<number> deg" or "<number> rad", returned in radians.
double parse_angle(std::string_view text);

} // namespace chanest
