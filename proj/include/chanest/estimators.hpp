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

#include <optional>
#include <span>
#include <vector>

namespace chanest {

enum class Method { Conventional, IssacLos, IssacMultipath };

const char *method_name(Method m);

struct ChannelEstimate {
  CVector h_hat;
  Method method = Method::Conventional;
  std::optional<std::vector<double>> angles_used;
  std::optional<std::vector<cdouble>> gains_used;
};

struct SnrReport {
  double empirical_gamma = 0.0;
  double theory_value = 0.0;
  double upper_bound = 0.0;
};

struct ClosedFormPredictions {
  double e_cp = 0.0;            ///< M sigma^2 / (P_t rho)
  double e_lp = 0.0;            ///< L sigma^2 / (P_t rho)
  double gamma_cp_approx = 0.0; ///< upper * (1 - xi)
  double gamma_upper = 0.0;     ///< P_d ||h||^2 / sigma^2
  double xi = 0.0;
};

struct CpSnrApprox {
  double gamma = 0.0;
  double xi = 0.0;
};

/// Pilot LS: h_hat = sum_i y_t(i) conj(phi(i)) / sqrt(P_t rho^2).
ChannelEstimate ls_conventional(const ReceivedBlock &block, double pilot_power);

/// Unit-norm combiner along the estimate. Throws EstimationError on a zero
/// estimate.
CVector mrc_beamformer(const CVector &h_hat);
CVector mrc_beamformer(const ChannelEstimate &est);

/// P_d |v^H h|^2 / sigma^2 for one realization.
double empirical_snr(const CVector &v, const CVector &h, double data_power, double noise_var);

/// P_d ||h||^2 / sigma^2, attained by v = h / ||h||.
double snr_upper_bound(double data_power, double h_norm_sq, double noise_var);

/// Per-antenna pilot SNR without beamforming: P_t ||h||^2 / (M sigma^2).
double pilot_snr_per_antenna(double pilot_power, double h_norm_sq, int num_antennas,
                             double noise_var);

/// xi = (1 - 1/M) / (rho snr_t + 1) and gamma ~ upper * (1 - xi).
CpSnrApprox snr_cp_approx(int num_antennas, int pilot_len, double snr_t, double data_power,
                          double h_norm_sq, double noise_var);

/// Closed-form mean squared estimation error of the named method.
double mmse_closed_form(int num_antennas, int num_paths, double pilot_power, int pilot_len,
                        double noise_var, Method method);

ClosedFormPredictions closed_form_predictions(int num_antennas, int num_paths,
                                              double pilot_power, double data_power,
                                              int pilot_len, double noise_var,
                                              double h_norm_sq);

struct GainEstimate {
  std::vector<cdouble> gains;
  ChannelEstimate estimate;
};

/// Beamforms the pilot toward theta_hat, projects on the pilot sequence and
/// scales by 1/sqrt(M). The estimate is alpha_hat * a(theta_hat).
GainEstimate estimate_gain_los(const ReceivedBlock &block, double theta_hat, double pilot_power);

/// Beamforms the pilot with W = A^H(Theta_hat)/sqrt(M), projects on the
/// pilot and solves the L x L Gram system of A(Theta_hat). Throws
/// EstimationError when the Gram matrix condition number exceeds 1e8.
GainEstimate estimate_gains_multipath(const ReceivedBlock &block,
                                      std::span<const double> angles_hat, double pilot_power);

/// Expected SNR of the beam a(theta_hat)/sqrt(M) on a single-path channel:
/// upper * |a^H(theta_hat) a(theta)|^2 / M^2.
double angle_mismatch_snr(double theta_hat, double theta, double data_power, double h_norm_sq,
                    double noise_var, int num_antennas);

} // namespace chanest
