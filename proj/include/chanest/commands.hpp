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

#include "chanest/run_config.hpp"
#include "chanest/simharness.hpp"

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace chanest {

/// %.12g, the precision every CSV is written with.
std::string format_number(double value);

inline constexpr std::array<const char *, 13> kSweepColumns{
    "sweep_value",     "e_cp_sim",        "e_cp_theory",    "e_lp_sim",     "e_lp_theory",
    "nrmse_cp",        "nrmse_lp",        "gamma_cp_sim_db", "gamma_cp_approx_db",
    "gamma_lp_sim_db", "gamma_upper_db",  "failure_rate",   "trials"};

using SweepRow = std::array<double, kSweepColumns.size()>;

/// One CSV row per sweep point, SNR columns converted to dB.
SweepRow sweep_row(const SweepPoint &pt);

void write_sweep_csv(std::ostream &out, const SweepResult &result);
/// Parses a sweep CSV back; throws std::runtime_error on malformed input.
std::vector<SweepRow> read_sweep_csv(std::istream &in);

void write_cdf_csv(std::ostream &out, const CdfResult &cdf);
void write_cdf_summary_csv(std::ostream &out, const CdfResult &cdf);
void write_spectrum_csv(std::ostream &out, const SpectrumDump &dump);

/// Command-line flags shared by all subcommands. Unset optionals leave the
/// config file (or built-in defaults) untouched.
struct CommandOptions {
  std::optional<std::filesystem::path> config;
  std::filesystem::path out;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<std::string> axis;
  std::optional<std::string> mode;
  bool oracle_angles = false;
  std::optional<int> threads;
};

/// Loads the config, applies overrides and finalizes it.
RunConfig resolve_config(const CommandOptions &opts);

/// Exit status 0 on success, 1 on configuration or I/O errors (reported on
/// err), 2 when the failure rate exceeds the configured ceiling.
int cmd_sweep(const CommandOptions &opts, std::ostream &log, std::ostream &err);
int cmd_cdf(const CommandOptions &opts, std::ostream &log, std::ostream &err);
int cmd_spectrum(const CommandOptions &opts, std::ostream &log, std::ostream &err);

} // namespace chanest
