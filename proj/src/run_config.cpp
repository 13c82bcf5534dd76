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

#include "chanest/run_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace chanest {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(trim(s.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos)
      break;
    start = comma + 1;
  }
  return out;
}

// Splits "<number><ws><unit>" and parses the number.
std::pair<double, std::string_view> number_with_unit(std::string_view text) {
  text = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr == text.data())
    throw ConfigError("expected a number in '" + std::string(text) + "'");
  const auto unit = trim(text.substr(static_cast<std::size_t>(ptr - text.data())));
  return {value, unit};
}

double parse_real(std::string_view text) {
  const auto [v, unit] = number_with_unit(text);
  if (!unit.empty())
    throw ConfigError("unexpected unit in '" + std::string(trim(text)) + "'");
  return v;
}

long long parse_int(std::string_view text) {
  text = trim(text);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ConfigError("expected an integer, got '" + std::string(text) + "'");
  return v;
}

int parse_count(std::string_view text) {
  const long long v = parse_int(text);
  if (v < 0 || v > 100000000)
    throw ConfigError("integer out of range: '" + std::string(trim(text)) + "'");
  return static_cast<int>(v);
}

bool parse_bool(std::string_view text) {
  text = trim(text);
  if (text == "true" || text == "yes" || text == "1")
    return true;
  if (text == "false" || text == "no" || text == "0")
    return false;
  throw ConfigError("expected true or false, got '" + std::string(text) + "'");
}

double parse_linear_power(std::string_view text) { return db2lin(parse_power_db(text)); }

} // namespace

double parse_power_db(std::string_view text) {
  const auto [v, unit] = number_with_unit(text);
  if (unit == "dB" || unit == "db")
    return v;
  if (unit == "lin") {
    if (!(v > 0.0))
      throw ConfigError("linear power must be positive: '" + std::string(trim(text)) + "'");
    return lin2db(v);
  }
  throw ConfigError("power '" + std::string(trim(text)) + "' needs a 'dB' or 'lin' suffix");
}

double parse_angle(std::string_view text) {
  const auto [v, unit] = number_with_unit(text);
  if (unit == "deg")
    return deg2rad(v);
  if (unit == "rad")
    return v;
  throw ConfigError("angle '" + std::string(trim(text)) + "' needs a 'deg' or 'rad' suffix");
}

std::vector<double> default_sweep_values(SweepAxis axis) {
  switch (axis) {
  case SweepAxis::Antennas:
    return {8, 16, 32, 64};
  case SweepAxis::PilotSnr:
    return {-20, -17.5, -15, -12.5, -10, -7.5, -5, -2.5, 0};
  case SweepAxis::DataSnr:
    return {-30, -25, -20, -15, -10, -5, 0, 5};
  case SweepAxis::PilotLen:
    return {1, 2, 3, 4, 6, 8};
  }
  return {};
}

void RunConfig::finalize() {
  if (sweep_values_text) {
    std::vector<double> values;
    for (auto item : split_list(*sweep_values_text)) {
      if (spec.sweep_axis == SweepAxis::PilotSnr || spec.sweep_axis == SweepAxis::DataSnr)
        values.push_back(parse_power_db(item));
      else
        values.push_back(static_cast<double>(parse_count(item)));
    }
    spec.sweep_values = std::move(values);
  } else {
    spec.sweep_values = default_sweep_values(spec.sweep_axis);
  }
  if (!(max_failure_rate >= 0.0 && max_failure_rate <= 1.0))
    throw ConfigError("max_failure_rate must lie in [0, 1]");
  try {
    spec.validate();
  } catch (const std::invalid_argument &e) {
    throw ConfigError(e.what());
  }
}

RunConfig parse_run_config(std::string_view text) {
  RunConfig cfg;
  UniformAngles uniform;
  std::optional<std::vector<double>> fixed_angles;

  using Setter = std::function<void(std::string_view)>;
  const std::map<std::string, Setter, std::less<>> setters{
      {"antennas", [&](auto v) { cfg.spec.num_antennas = parse_count(v); }},
      {"paths", [&](auto v) { cfg.spec.num_paths = parse_count(v); }},
      {"pilot_len", [&](auto v) { cfg.spec.pilot_len = parse_count(v); }},
      {"data_len", [&](auto v) { cfg.spec.data_len = parse_count(v); }},
      {"pilot_snr", [&](auto v) { cfg.spec.pilot_snr_db = parse_power_db(v); }},
      {"data_snr", [&](auto v) { cfg.spec.data_snr_db = parse_power_db(v); }},
      {"noise_var",
       [&](auto v) {
         const auto [num, unit] = number_with_unit(v);
         cfg.spec.noise_var = (num == 0.0 && unit == "lin") ? 0.0 : parse_linear_power(v);
       }},
      {"trials", [&](auto v) { cfg.spec.num_trials = parse_count(v); }},
      {"seed",
       [&](auto v) {
         const long long s = parse_int(v);
         if (s < 0)
           throw ConfigError("seed must be nonnegative");
         cfg.spec.base_seed = static_cast<std::uint64_t>(s);
       }},
      {"threads", [&](auto v) { cfg.spec.num_threads = parse_count(v); }},
      {"mode",
       [&](auto v) {
         v = trim(v);
         if (v == "los")
           cfg.spec.mode = Mode::Los;
         else if (v == "multipath")
           cfg.spec.mode = Mode::Multipath;
         else
           throw ConfigError("mode must be los or multipath");
       }},
      {"angle_stage",
       [&](auto v) {
         v = trim(v);
         if (v == "estimated")
           cfg.spec.angle_stage = AngleStage::Estimated;
         else if (v == "oracle")
           cfg.spec.angle_stage = AngleStage::Oracle;
         else
           throw ConfigError("angle_stage must be estimated or oracle");
       }},
      {"angles",
       [&](auto v) {
         std::vector<double> a;
         for (auto item : split_list(v))
           a.push_back(parse_angle(item));
         fixed_angles = std::move(a);
       }},
      {"angle_min", [&](auto v) { uniform.lower = parse_angle(v); }},
      {"angle_max", [&](auto v) { uniform.upper = parse_angle(v); }},
      {"min_separation", [&](auto v) { uniform.min_sine_separation = std::sin(parse_angle(v)); }},
      {"gain_model",
       [&](auto v) {
         v = trim(v);
         if (v == "gaussian")
           cfg.spec.gain_model = GainModel::ComplexGaussian;
         else if (v == "unit")
           cfg.spec.gain_model = GainModel::UnitModulus;
         else
           throw ConfigError("gain_model must be gaussian or unit");
       }},
      {"pilot",
       [&](auto v) {
         v = trim(v);
         if (v == "ones")
           cfg.spec.pilot_kind = PilotKind::AllOnes;
         else if (v == "random_phase")
           cfg.spec.pilot_kind = PilotKind::RandomPhase;
         else
           throw ConfigError("pilot must be ones or random_phase");
       }},
      {"sweep_axis",
       [&](auto v) {
         try {
           cfg.spec.sweep_axis = parse_axis(std::string(trim(v)));
         } catch (const std::invalid_argument &e) {
           throw ConfigError(e.what());
         }
       }},
      {"sweep_values", [&](auto v) { cfg.sweep_values_text = std::string(trim(v)); }},
      {"joint_power", [&](auto v) { cfg.spec.joint_power_sweep = parse_bool(v); }},
      {"grid_min", [&](auto v) { cfg.spec.grid_lower_deg = rad2deg(parse_angle(v)); }},
      {"grid_max", [&](auto v) { cfg.spec.grid_upper_deg = rad2deg(parse_angle(v)); }},
      {"grid_step", [&](auto v) { cfg.spec.grid_step_deg = rad2deg(parse_angle(v)); }},
      {"refine", [&](auto v) { cfg.spec.refine_peaks = parse_bool(v); }},
      {"subarrays", [&](auto v) { cfg.spec.num_subarrays = parse_count(v); }},
      {"path_block", [&](auto v) { cfg.spec.path_block_len = parse_count(v); }},
      {"max_failure_rate", [&](auto v) { cfg.max_failure_rate = parse_real(v); }},
      {"output_dir", [&](auto v) { cfg.output_dir = std::string(trim(v)); }},
      {"verbosity", [&](auto v) { cfg.verbosity = parse_count(v); }},
  };

  std::set<std::string, std::less<>> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#')
      continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    const auto key = trim(body.substr(0, eq));
    const auto value = trim(body.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end())
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + std::string(key) + "'");
    if (!seen.insert(std::string(key)).second)
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + std::string(key) + "'");
    try {
      it->second(value);
    } catch (const ConfigError &e) {
      throw ConfigError("line " + std::to_string(lineno) + " (" + std::string(key) + "): " + e.what());
    }
  }

  if (fixed_angles)
    cfg.spec.angle_policy = FixedAngles{*fixed_angles};
  else
    cfg.spec.angle_policy = uniform;
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot read config file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

} // namespace chanest
