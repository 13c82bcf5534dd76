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

#include "chanest/simharness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

namespace chanest {

namespace {

constexpr std::uint64_t kAngleStreamTag = 0x616e676c65730000ULL; // "angles"
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int as_count(double value, const char *what) {
  const double r = std::round(value);
  if (std::abs(value - r) > 1e-9 || r < 1.0 || r > 1e6)
    throw std::invalid_argument(std::string("sweep value for ") + what +
                                " must be a positive integer");
  return static_cast<int>(r);
}

double mean_of(const std::vector<double> &v) {
  if (v.empty())
    return kNaN;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

} // namespace

const char *axis_name(SweepAxis axis) {
  switch (axis) {
  case SweepAxis::Antennas:
    return "m";
  case SweepAxis::PilotSnr:
    return "pt";
  case SweepAxis::DataSnr:
    return "pd";
  case SweepAxis::PilotLen:
    return "rho";
  }
  return "?";
}

SweepAxis parse_axis(const std::string &name) {
  if (name == "m" || name == "M")
    return SweepAxis::Antennas;
  if (name == "pt")
    return SweepAxis::PilotSnr;
  if (name == "pd")
    return SweepAxis::DataSnr;
  if (name == "rho")
    return SweepAxis::PilotLen;
  throw std::invalid_argument("unknown sweep axis '" + name + "' (valid axes: m, pt, pd, rho)");
}

void ExperimentSpec::validate() const {
  if (num_antennas < 1)
    throw std::invalid_argument("spec: antennas must be >= 1");
  if (num_paths < 1)
    throw std::invalid_argument("spec: paths must be >= 1");
  if (mode == Mode::Los && num_paths != 1)
    throw std::invalid_argument("spec: los mode requires exactly one path");
  if (num_paths > num_antennas)
    throw std::invalid_argument("spec: more paths than antennas");
  if (pilot_len < 1)
    throw std::invalid_argument("spec: pilot_len must be >= 1 for gain estimation");
  if (data_len < 1)
    throw std::invalid_argument("spec: data_len must be >= 1");
  if (!std::isfinite(pilot_snr_db) || !std::isfinite(data_snr_db))
    throw std::invalid_argument("spec: SNR settings must be finite");
  if (!(noise_var >= 0.0))
    throw std::invalid_argument("spec: noise_var must be >= 0");
  if (num_trials < 1)
    throw std::invalid_argument("spec: trials must be >= 1");
  if (sweep_values.empty())
    throw std::invalid_argument("spec: sweep values must be nonempty");
  if (num_threads < 1)
    throw std::invalid_argument("spec: threads must be >= 1");
  if (path_block_len < 0)
    throw std::invalid_argument("spec: path_block_len must be >= 0");
  if (num_subarrays < 0)
    throw std::invalid_argument("spec: subarrays must be >= 0");
  if (const auto *fixed = std::get_if<FixedAngles>(&angle_policy))
    if (static_cast<int>(fixed->angles.size()) != num_paths)
      throw std::invalid_argument("spec: fixed angle list length differs from paths");
  if (mode == Mode::Multipath && angle_stage == AngleStage::Estimated) {
    const SubarrayPlan plan = num_subarrays > 0
                                  ? SubarrayPlan::make(num_antennas, num_subarrays)
                                  : SubarrayPlan::default_for(num_antennas, num_paths);
    if (!plan.supports(num_paths))
      throw std::invalid_argument("spec: array too small for spatial smoothing with this L");
  }
  uniform_angle_grid(grid_lower_deg, grid_upper_deg, grid_step_deg);
}

TransmissionConfig ExperimentSpec::transmission() const {
  const double reference = noise_var > 0.0 ? noise_var : 1.0;
  TransmissionConfig tx;
  tx.pilot_len = pilot_len;
  tx.data_len = data_len;
  tx.pilot_power = db2lin(pilot_snr_db) * reference;
  tx.data_power = db2lin(data_snr_db) * reference;
  tx.noise_var = noise_var;
  return tx;
}

ExperimentSpec ExperimentSpec::at_sweep_value(double value) const {
  ExperimentSpec s = *this;
  switch (sweep_axis) {
  case SweepAxis::Antennas:
    s.num_antennas = as_count(value, "m");
    break;
  case SweepAxis::PilotSnr:
    s.pilot_snr_db = value;
    break;
  case SweepAxis::DataSnr:
    s.data_snr_db = value;
    if (joint_power_sweep)
      s.pilot_snr_db = value;
    break;
  case SweepAxis::PilotLen:
    s.pilot_len = as_count(value, "rho");
    break;
  }
  return s;
}

ExperimentSpec ExperimentSpec::preset_default() { return ExperimentSpec{}; }

TrialRunner::TrialRunner(ExperimentSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  tx_ = spec_.transmission();
  plan_ = spec_.num_subarrays > 0
              ? SubarrayPlan::make(spec_.num_antennas, spec_.num_subarrays)
              : SubarrayPlan::default_for(spec_.num_antennas, spec_.num_paths);
  auto grid = uniform_angle_grid(spec_.grid_lower_deg, spec_.grid_upper_deg, spec_.grid_step_deg);
  full_grid_ = std::make_shared<const SteeringGrid>(spec_.num_antennas, grid);
  if (spec_.mode == Mode::Multipath)
    sub_grid_ = std::make_shared<const SteeringGrid>(plan_.subarray_size, std::move(grid));
}

TrialRunner::Draw TrialRunner::draw(std::uint64_t trial_index) const {
  Rng rng(derive_seed(spec_.base_seed, trial_index));

  AnglePolicy policy = spec_.angle_policy;
  if (spec_.path_block_len > 0 && std::holds_alternative<UniformAngles>(policy)) {
    const std::uint64_t block = trial_index / static_cast<std::uint64_t>(spec_.path_block_len);
    Rng angle_rng(derive_seed(spec_.base_seed ^ kAngleStreamTag, block));
    policy = FixedAngles{sample_paths(spec_.num_paths, angle_rng, policy).angles};
  }

  Draw d;
  d.paths = sample_paths(spec_.num_paths, rng, policy, spec_.gain_model);
  const UlaGeometry geom(spec_.num_antennas);
  d.h = synthesize_channel(geom, d.paths);
  const CVector phi = generate_pilot_sequence(spec_.pilot_len, spec_.pilot_kind, &rng);
  d.block = simulate_reception(d.h, tx_, phi, rng);
  return d;
}

std::vector<double> TrialRunner::estimate_angles(const ReceivedBlock &block) const {
  if (spec_.mode == Mode::Los) {
    const auto spec = bartlett_spectrum(sample_covariance(block), *full_grid_);
    return find_peaks(spec, 1, spec_.refine_peaks).angles;
  }
  const auto covs = subarray_covariances(block, plan_);
  const auto smoothed = forward_backward_smooth(covs);
  const auto spec = music_spectrum(smoothed, spec_.num_paths, *sub_grid_);
  return find_peaks(spec, spec_.num_paths, spec_.refine_peaks).angles;
}

TrialResult TrialRunner::run(std::uint64_t trial_index) const {
  const Draw d = draw(trial_index);
  const int m = spec_.num_antennas;

  TrialResult r;
  r.trial_index = trial_index;
  r.h_norm_sq = d.h.squaredNorm();
  r.true_angles = d.paths.angles;

  const auto preds = closed_form_predictions(m, spec_.num_paths, tx_.pilot_power, tx_.data_power,
                                             tx_.pilot_len, tx_.noise_var, r.h_norm_sq);
  r.snr_upper = preds.gamma_upper;
  r.snr_cp_approx = preds.gamma_cp_approx;

  try {
    const ChannelEstimate cp = ls_conventional(d.block, tx_.pilot_power);
    r.sq_error_cp = (cp.h_hat - d.h).squaredNorm();
    r.snr_cp = empirical_snr(mrc_beamformer(cp), d.h, tx_.data_power, tx_.noise_var);

    std::vector<double> angles = spec_.angle_stage == AngleStage::Oracle
                                     ? d.paths.angles
                                     : estimate_angles(d.block);
    CVector v_lp;
    GainEstimate lp;
    if (spec_.mode == Mode::Los) {
      lp = estimate_gain_los(d.block, angles.front(), tx_.pilot_power);
      v_lp = steering_vector(UlaGeometry(m), angles.front()) / std::sqrt(static_cast<double>(m));
    } else {
      lp = estimate_gains_multipath(d.block, angles, tx_.pilot_power);
      v_lp = mrc_beamformer(lp.estimate);
    }
    r.sq_error_lp = (lp.estimate.h_hat - d.h).squaredNorm();
    r.snr_lp = empirical_snr(v_lp, d.h, tx_.data_power, tx_.noise_var);
    r.angle_errors = match_angles(angles, d.paths.angles);
    std::sort(angles.begin(), angles.end());
    r.est_angles = std::move(angles);
  } catch (const EstimationError &e) {
    r.failed = true;
    r.failure = e.what();
    r.sq_error_lp = kNaN;
    r.snr_lp = kNaN;
  }
  return r;
}

std::vector<TrialResult> TrialRunner::run_all() const {
  const auto n = static_cast<std::size_t>(spec_.num_trials);
  std::vector<TrialResult> results(n);
  const auto workers = static_cast<std::size_t>(std::min<int>(spec_.num_threads, spec_.num_trials));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i)
      results[i] = run(i);
    return results;
  }

  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++)
          results[i] = run(i);
      });
  }
  return results;
}

SpectrumDump TrialRunner::spectra(std::uint64_t trial_index) const {
  const Draw d = draw(trial_index);
  SpectrumDump out;
  out.grid = full_grid_->angles();
  out.true_angles = d.paths.angles;
  out.bartlett = bartlett_spectrum(sample_covariance(d.block), *full_grid_).values;
  if (spec_.mode == Mode::Multipath) {
    const auto covs = subarray_covariances(d.block, plan_);
    out.music = music_spectrum(forward_backward_smooth(covs), spec_.num_paths, *sub_grid_).values;
  }
  return out;
}

TrialResult run_trial(const ExperimentSpec &spec, std::uint64_t trial_index) {
  return TrialRunner(spec).run(trial_index);
}

SweepPoint aggregate(const ExperimentSpec &spec, std::span<const TrialResult> trials,
                     double sweep_value) {
  SweepPoint pt;
  pt.sweep_value = sweep_value;
  pt.trials = static_cast<int>(trials.size());

  std::vector<double> e_cp, e_lp, g_cp, g_lp, g_approx, g_upper, h_norm, angle_err;
  for (const auto &t : trials) {
    if (t.failed) {
      ++pt.failures;
      continue;
    }
    e_cp.push_back(t.sq_error_cp);
    e_lp.push_back(t.sq_error_lp);
    g_cp.push_back(t.snr_cp);
    g_lp.push_back(t.snr_lp);
    g_approx.push_back(t.snr_cp_approx);
    g_upper.push_back(t.snr_upper);
    h_norm.push_back(t.h_norm_sq);
    for (double e : t.angle_errors)
      angle_err.push_back(rad2deg(e));
  }
  pt.failure_rate = trials.empty() ? 0.0 : static_cast<double>(pt.failures) / trials.size();

  pt.e_cp_sim = mean_of(e_cp);
  pt.e_lp_sim = mean_of(e_lp);
  pt.gamma_cp_sim = mean_of(g_cp);
  pt.gamma_lp_sim = mean_of(g_lp);
  pt.gamma_cp_approx = mean_of(g_approx);
  pt.gamma_upper = mean_of(g_upper);
  pt.angle_mae_deg = angle_err.empty() ? 0.0 : mean_of(angle_err);
  if (!e_cp.empty()) {
    pt.nrmse_cp = nrmse(e_cp, h_norm);
    pt.nrmse_lp = nrmse(e_lp, h_norm);
  } else {
    pt.nrmse_cp = pt.nrmse_lp = kNaN;
  }

  const auto tx = spec.transmission();
  pt.e_cp_theory = mmse_closed_form(spec.num_antennas, spec.num_paths, tx.pilot_power,
                                    tx.pilot_len, tx.noise_var, Method::Conventional);
  pt.e_lp_theory = mmse_closed_form(
      spec.num_antennas, spec.num_paths, tx.pilot_power, tx.pilot_len, tx.noise_var,
      spec.mode == Mode::Los ? Method::IssacLos : Method::IssacMultipath);
  return pt;
}

SweepResult run_sweep(const ExperimentSpec &spec) {
  spec.validate();
  SweepResult out;
  out.axis = spec.sweep_axis;
  for (double v : spec.sweep_values) {
    const ExperimentSpec point = spec.at_sweep_value(v);
    const auto trials = TrialRunner(point).run_all();
    out.points.push_back(aggregate(point, trials, v));
  }
  return out;
}

CdfResult run_cdf(const ExperimentSpec &spec) {
  const auto trials = TrialRunner(spec).run_all();
  std::vector<double> cp, lp;
  CdfResult out;
  out.trials = static_cast<int>(trials.size());
  for (const auto &t : trials) {
    if (t.failed) {
      ++out.failures;
      continue;
    }
    cp.push_back(lin2db(t.snr_cp));
    lp.push_back(lin2db(t.snr_lp));
  }
  if (cp.empty())
    throw std::runtime_error("run_cdf: every trial failed");
  out.cp_db = empirical_cdf(cp);
  out.lp_db = empirical_cdf(lp);
  return out;
}

double nrmse(std::span<const double> sq_errors, std::span<const double> h_norms_sq) {
  if (sq_errors.empty() || sq_errors.size() != h_norms_sq.size())
    throw std::invalid_argument("nrmse: inputs must be nonempty and of equal length");
  const double n = static_cast<double>(sq_errors.size());
  const double mse = std::accumulate(sq_errors.begin(), sq_errors.end(), 0.0) / n;
  const double energy = std::accumulate(h_norms_sq.begin(), h_norms_sq.end(), 0.0) / n;
  return std::sqrt(mse) / std::sqrt(energy);
}

double CdfSeries::evaluate(double x) const {
  if (values.empty())
    return 0.0;
  const auto it = std::upper_bound(values.begin(), values.end(), x);
  return static_cast<double>(it - values.begin()) / static_cast<double>(values.size());
}

double CdfSeries::percentile(double q) const {
  if (values.empty())
    throw std::logic_error("percentile of an empty CDF");
  if (!(q >= 0.0 && q <= 1.0))
    throw std::invalid_argument("percentile: q must lie in [0, 1]");
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

CdfSeries empirical_cdf(std::span<const double> values) {
  if (values.empty())
    throw std::invalid_argument("empirical_cdf: no samples");
  CdfSeries cdf;
  cdf.values.assign(values.begin(), values.end());
  std::sort(cdf.values.begin(), cdf.values.end());
  const double n = static_cast<double>(cdf.values.size());
  cdf.probabilities.resize(cdf.values.size());
  for (std::size_t i = 0; i < cdf.values.size(); ++i)
    cdf.probabilities[i] = static_cast<double>(i + 1) / n;
  cdf.p10 = cdf.percentile(0.10);
  cdf.p50 = cdf.percentile(0.50);
  cdf.p90 = cdf.percentile(0.90);
  return cdf;
}

std::vector<double> match_angles(std::span<const double> estimated, std::span<const double> truth) {
  if (estimated.size() != truth.size())
    throw std::invalid_argument("match_angles: lists differ in length");
  std::vector<double> a(estimated.begin(), estimated.end());
  std::vector<double> b(truth.begin(), truth.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<double> err(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    err[i] = std::abs(a[i] - b[i]);
  return err;
}

} // namespace chanest
