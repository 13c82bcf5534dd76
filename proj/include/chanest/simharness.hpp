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

#include "chanest/array_channel.hpp"
#include "chanest/estimators.hpp"
#include "chanest/subspace.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace chanest {

enum class Mode { Los, Multipath };
enum class AngleStage { Estimated, Oracle };
enum class SweepAxis { Antennas, PilotSnr, DataSnr, PilotLen };

const char *axis_name(SweepAxis axis);
/// Accepts m, pt, pd, rho. Throws std::invalid_argument naming the valid axes.
SweepAxis parse_axis(const std::string &name);

/// Everything needed to run a batch of paired trials and, optionally, a
/// one-dimensional parameter sweep.
struct ExperimentSpec {
  int num_antennas = 32;
  int num_paths = 3;
  AnglePolicy angle_policy = UniformAngles{};
  GainModel gain_model = GainModel::ComplexGaussian;
  PilotKind pilot_kind = PilotKind::AllOnes;

  int pilot_len = 3;
  int data_len = 97;
  double pilot_snr_db = -10.0; ///< 10 log10(P_t / sigma^2)
  double data_snr_db = -10.0;  ///< 10 log10(P_d / sigma^2)
  double noise_var = 1.0;

  int num_trials = 2000;
  std::uint64_t base_seed = 1;
  Mode mode = Mode::Multipath;
  AngleStage angle_stage = AngleStage::Estimated;

  SweepAxis sweep_axis = SweepAxis::Antennas;
  std::vector<double> sweep_values{8, 16, 32, 64};
  /// In a data-SNR sweep, move the pilot SNR along with it.
  bool joint_power_sweep = true;

  double grid_lower_deg = -89.0;
  double grid_upper_deg = 89.0;
  double grid_step_deg = 0.02;
  bool refine_peaks = true;
  int num_subarrays = 0; ///< 0 selects ceil(L/2) + 1

  /// 0 redraws angles every trial. N > 0 keeps the angles fixed over blocks
  /// of N consecutive trials while gains are redrawn.
  int path_block_len = 0;
  int num_threads = 1;

  void validate() const;

  /// Physical powers. With noise_var = 0 the SNR settings are taken
  /// relative to a unit noise reference.
  TransmissionConfig transmission() const;

  /// Copy of this spec with the sweep axis set to value.
  ExperimentSpec at_sweep_value(double value) const;

  /// rho = 3, P_t/sigma^2 = P_d/sigma^2 = -10 dB, M = 32, L = 3.
  static ExperimentSpec preset_default();
};

struct TrialResult {
  std::uint64_t trial_index = 0;
  double h_norm_sq = 0.0;
  double sq_error_cp = 0.0;
  double sq_error_lp = 0.0;
  double snr_cp = 0.0; ///< realized P_d |v^H h|^2 / sigma^2
  double snr_lp = 0.0;
  double snr_upper = 0.0;
  double snr_cp_approx = 0.0;
  std::vector<double> true_angles;
  std::vector<double> est_angles;
  std::vector<double> angle_errors; ///< radians, after sorted matching
  bool failed = false;
  std::string failure;
};

struct SweepPoint {
  double sweep_value = 0.0;
  double e_cp_sim = 0.0;
  double e_cp_theory = 0.0;
  double e_lp_sim = 0.0;
  double e_lp_theory = 0.0;
  double nrmse_cp = 0.0;
  double nrmse_lp = 0.0;
  double gamma_cp_sim = 0.0; ///< linear, mean over trials
  double gamma_cp_approx = 0.0;
  double gamma_lp_sim = 0.0;
  double gamma_upper = 0.0;
  double angle_mae_deg = 0.0;
  double failure_rate = 0.0;
  int trials = 0;
  int failures = 0;
};

struct SweepResult {
  SweepAxis axis = SweepAxis::Antennas;
  std::vector<SweepPoint> points;
};

/// Sorted samples with F(x_(i)) = i / n.
struct CdfSeries {
  std::vector<double> values;
  std::vector<double> probabilities;
  double p10 = 0.0;
  double p50 = 0.0;
  double p90 = 0.0;

  /// Fraction of samples <= x.
  double evaluate(double x) const;
  /// Linear interpolation between order statistics at rank q (n - 1).
  double percentile(double q) const;
};

struct CdfResult {
  CdfSeries cp_db;
  CdfSeries lp_db;
  int trials = 0;
  int failures = 0;
};

struct SpectrumDump {
  std::vector<double> grid;
  std::vector<double> bartlett;
  std::optional<std::vector<double>> music;
  std::vector<double> true_angles;
};

/// Runs trials of one spec. Steering grids are built once at construction
/// and shared read-only between threads.
class TrialRunner {
public:
  explicit TrialRunner(ExperimentSpec spec);

  const ExperimentSpec &spec() const { return spec_; }

  /// One paired trial: both estimators see the identical received block.
  /// Estimation failures are recorded in the result, never thrown.
  TrialResult run(std::uint64_t trial_index) const;

  /// Trials 0 .. num_trials - 1, in index order, on spec().num_threads threads.
  std::vector<TrialResult> run_all() const;

  /// Spectra of the block drawn for trial_index.
  SpectrumDump spectra(std::uint64_t trial_index) const;

private:
  struct Draw {
    PathSet paths;
    CVector h;
    ReceivedBlock block;
  };
  Draw draw(std::uint64_t trial_index) const;
  std::vector<double> estimate_angles(const ReceivedBlock &block) const;

  ExperimentSpec spec_;
  TransmissionConfig tx_;
  SubarrayPlan plan_;
  std::shared_ptr<const SteeringGrid> full_grid_;
  std::shared_ptr<const SteeringGrid> sub_grid_;
};

TrialResult run_trial(const ExperimentSpec &spec, std::uint64_t trial_index);

/// Means over non-failed trials plus closed-form columns.
SweepPoint aggregate(const ExperimentSpec &spec, std::span<const TrialResult> trials,
                     double sweep_value);

SweepResult run_sweep(const ExperimentSpec &spec);

CdfResult run_cdf(const ExperimentSpec &spec);

/// sqrt(mean sq_error) / sqrt(mean ||h||^2).
double nrmse(std::span<const double> sq_errors, std::span<const double> h_norms_sq);

CdfSeries empirical_cdf(std::span<const double> values);

/// Sorts both lists and pairs them positionally; returns |est - truth|.
std::vector<double> match_angles(std::span<const double> estimated,
                                 std::span<const double> truth);

} // namespace chanest
