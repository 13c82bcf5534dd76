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

#include "chanest/estimators.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace chanest {

namespace {

constexpr double kMaxGramCondition = 1e8;

void require_pilot(const ReceivedBlock &block, double pilot_power) {
  if (block.pilot_len() < 1)
    throw std::invalid_argument("pilot-based estimation needs at least one pilot symbol");
  if (block.pilot_seq.size() != block.pilot_len())
    throw std::invalid_argument("pilot sequence length differs from pilot observations");
  if (!(pilot_power > 0.0))
    throw std::invalid_argument("pilot power must be positive");
}

// sum_i y(i) conj(phi(i)) / (sqrt(P_t) rho), applied to each row of obs.
CVector project_on_pilot(const CMatrix &obs, const CVector &pilot_seq, double pilot_power) {
  const double rho = static_cast<double>(pilot_seq.size());
  return obs * pilot_seq.conjugate() / (std::sqrt(pilot_power) * rho);
}

} // namespace

const char *method_name(Method m) {
  switch (m) {
  case Method::Conventional:
    return "conventional";
  case Method::IssacLos:
    return "issac_los";
  case Method::IssacMultipath:
    return "issac_multipath";
  }
  return "unknown";
}

ChannelEstimate ls_conventional(const ReceivedBlock &block, double pilot_power) {
  require_pilot(block, pilot_power);
  ChannelEstimate est;
  est.method = Method::Conventional;
  est.h_hat = project_on_pilot(block.pilot_obs, block.pilot_seq, pilot_power);
  return est;
}

CVector mrc_beamformer(const CVector &h_hat) {
  const double norm = h_hat.norm();
  if (!(norm > 0.0) || !std::isfinite(norm))
    throw EstimationError("mrc_beamformer: channel estimate has zero norm");
  return h_hat / norm;
}

CVector mrc_beamformer(const ChannelEstimate &est) { return mrc_beamformer(est.h_hat); }

double empirical_snr(const CVector &v, const CVector &h, double data_power, double noise_var) {
  if (v.size() != h.size())
    throw std::invalid_argument("empirical_snr: beamformer and channel sizes differ");
  return data_power * std::norm(v.dot(h)) / noise_var;
}

double snr_upper_bound(double data_power, double h_norm_sq, double noise_var) {
  return data_power * h_norm_sq / noise_var;
}

double pilot_snr_per_antenna(double pilot_power, double h_norm_sq, int num_antennas,
                             double noise_var) {
  return pilot_power * h_norm_sq / (static_cast<double>(num_antennas) * noise_var);
}

CpSnrApprox snr_cp_approx(int num_antennas, int pilot_len, double snr_t, double data_power,
                          double h_norm_sq, double noise_var) {
  if (num_antennas < 1)
    throw std::invalid_argument("snr_cp_approx: need at least one antenna");
  const double energy = static_cast<double>(pilot_len) * snr_t;
  if (!(energy >= 0.0))
    throw std::invalid_argument("snr_cp_approx: pilot energy must be nonnegative");
  CpSnrApprox out;
  out.xi = (1.0 - 1.0 / static_cast<double>(num_antennas)) / (energy + 1.0);
  out.gamma = snr_upper_bound(data_power, h_norm_sq, noise_var) * (1.0 - out.xi);
  return out;
}

double mmse_closed_form(int num_antennas, int num_paths, double pilot_power, int pilot_len,
                        double noise_var, Method method) {
  if (!(pilot_power > 0.0) || pilot_len < 1)
    throw std::invalid_argument("mmse_closed_form: pilot power and length must be positive");
  const double per_dim = noise_var / (pilot_power * static_cast<double>(pilot_len));
  switch (method) {
  case Method::Conventional:
    return static_cast<double>(num_antennas) * per_dim;
  case Method::IssacLos:
    return per_dim;
  case Method::IssacMultipath:
    return static_cast<double>(num_paths) * per_dim;
  }
  return per_dim;
}

ClosedFormPredictions closed_form_predictions(int num_antennas, int num_paths,
                                              double pilot_power, double data_power,
                                              int pilot_len, double noise_var,
                                              double h_norm_sq) {
  ClosedFormPredictions p;
  p.e_cp = mmse_closed_form(num_antennas, num_paths, pilot_power, pilot_len, noise_var,
                            Method::Conventional);
  p.e_lp = mmse_closed_form(num_antennas, num_paths, pilot_power, pilot_len, noise_var,
                            num_paths == 1 ? Method::IssacLos : Method::IssacMultipath);
  const double snr_t = pilot_snr_per_antenna(pilot_power, h_norm_sq, num_antennas, noise_var);
  const auto approx =
      snr_cp_approx(num_antennas, pilot_len, snr_t, data_power, h_norm_sq, noise_var);
  p.gamma_cp_approx = approx.gamma;
  p.xi = approx.xi;
  p.gamma_upper = snr_upper_bound(data_power, h_norm_sq, noise_var);
  return p;
}

GainEstimate estimate_gain_los(const ReceivedBlock &block, double theta_hat, double pilot_power) {
  require_pilot(block, pilot_power);
  const UlaGeometry geom(block.num_antennas());
  const CVector a = steering_vector(geom, theta_hat);
  const double sqrt_m = std::sqrt(static_cast<double>(geom.num_antennas()));

  // Beamformed pilot stream y_t(n) = a^H y_t(n) / ||a||, then projected.
  const Eigen::RowVectorXcd beamformed = a.adjoint() * block.pilot_obs / sqrt_m;
  const cdouble y_proj =
      (beamformed * block.pilot_seq.conjugate())(0) /
      (std::sqrt(pilot_power) * static_cast<double>(block.pilot_len()));
  const cdouble alpha_hat = y_proj / sqrt_m;

  GainEstimate out;
  out.gains = {alpha_hat};
  out.estimate.h_hat = alpha_hat * a;
  out.estimate.method = Method::IssacLos;
  out.estimate.angles_used = std::vector<double>{theta_hat};
  out.estimate.gains_used = out.gains;
  return out;
}

GainEstimate estimate_gains_multipath(const ReceivedBlock &block,
                                      std::span<const double> angles_hat, double pilot_power) {
  require_pilot(block, pilot_power);
  const int m = block.num_antennas();
  const auto num_paths = static_cast<Eigen::Index>(angles_hat.size());
  if (num_paths < 1 || num_paths > m)
    throw std::invalid_argument("estimate_gains_multipath: need 1 <= L <= M angles");

  const UlaGeometry geom(m);
  const CMatrix a = steering_matrix(geom, angles_hat);
  const double sqrt_m = std::sqrt(static_cast<double>(m));

  const CMatrix gram = a.adjoint() * a;
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram, Eigen::EigenvaluesOnly);
  const double lmin = eig.eigenvalues().minCoeff();
  const double lmax = eig.eigenvalues().maxCoeff();
  if (!(lmin > 0.0) || lmax / lmin > kMaxGramCondition)
    throw EstimationError("estimate_gains_multipath: estimated angles collide");

  // W Y_t projected on the pilot: sqrt(P_t) W h + noise.
  const CMatrix beamformed = a.adjoint() * block.pilot_obs / sqrt_m;
  const CVector y_mp = beamformed * block.pilot_seq.conjugate() /
                       static_cast<double>(block.pilot_len());
  const CVector alpha_hat = (sqrt_m / std::sqrt(pilot_power)) * gram.ldlt().solve(y_mp);

  GainEstimate out;
  out.gains.assign(alpha_hat.data(), alpha_hat.data() + alpha_hat.size());
  out.estimate.h_hat = a * alpha_hat;
  out.estimate.method = Method::IssacMultipath;
  out.estimate.angles_used = std::vector<double>(angles_hat.begin(), angles_hat.end());
  out.estimate.gains_used = out.gains;
  return out;
}

double angle_mismatch_snr(double theta_hat, double theta, double data_power, double h_norm_sq,
                    double noise_var, int num_antennas) {
  const UlaGeometry geom(num_antennas);
  const double m = static_cast<double>(num_antennas);
  const double overlap =
      std::norm(steering_vector(geom, theta_hat).dot(steering_vector(geom, theta)));
  return snr_upper_bound(data_power, h_norm_sq, noise_var) * overlap / (m * m);
}

} // namespace chanest
