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

#include "chanest/array_channel.hpp"

#include <algorithm>
#include <cmath>

namespace chanest {

namespace {

constexpr int kMaxPathDrawAttempts = 10000;

bool angle_in_domain(double theta) {
  return std::isfinite(theta) && theta > -kPi / 2.0 && theta < kPi / 2.0;
}

} // namespace

UlaGeometry::UlaGeometry(int num_antennas) : num_antennas_(num_antennas) {
  if (num_antennas < 1)
    throw std::invalid_argument("UlaGeometry: number of antennas must be >= 1");
}

void PathSet::validate() const {
  if (angles.empty())
    throw std::invalid_argument("PathSet: at least one path is required");
  if (angles.size() != gains.size())
    throw std::invalid_argument("PathSet: angle and gain counts differ");
  for (std::size_t i = 0; i < angles.size(); ++i) {
    if (!angle_in_domain(angles[i]))
      throw std::invalid_argument("PathSet: angle outside (-pi/2, pi/2)");
    for (std::size_t j = 0; j < i; ++j)
      if (angles[i] == angles[j])
        throw std::invalid_argument("PathSet: repeated path angle");
  }
}

void TransmissionConfig::validate() const {
  if (pilot_len < 0)
    throw std::invalid_argument("TransmissionConfig: pilot length must be >= 0");
  if (data_len < 1)
    throw std::invalid_argument("TransmissionConfig: data length must be >= 1");
  if (!(pilot_power > 0.0) || !(data_power > 0.0))
    throw std::invalid_argument("TransmissionConfig: transmit powers must be positive");
  if (!(noise_var >= 0.0))
    throw std::invalid_argument("TransmissionConfig: noise variance must be >= 0");
}

CVector steering_vector(const UlaGeometry &geom, double theta) {
  if (!angle_in_domain(theta))
    throw std::domain_error("steering_vector: angle must lie in (-pi/2, pi/2)");
  const int m = geom.num_antennas();
  const double phase_step = kPi * std::sin(theta);
  CVector a(m);
  for (int i = 0; i < m; ++i)
    a[i] = std::polar(1.0, phase_step * i);
  return a;
}

CMatrix steering_matrix(const UlaGeometry &geom, std::span<const double> angles) {
  CMatrix a(geom.num_antennas(), static_cast<Eigen::Index>(angles.size()));
  for (std::size_t l = 0; l < angles.size(); ++l)
    a.col(static_cast<Eigen::Index>(l)) = steering_vector(geom, angles[l]);
  return a;
}

CVector synthesize_channel(const UlaGeometry &geom, const PathSet &paths) {
  paths.validate();
  const CMatrix a = steering_matrix(geom, paths.angles);
  const Eigen::Map<const CVector> alpha(paths.gains.data(),
                                        static_cast<Eigen::Index>(paths.gains.size()));
  return a * alpha;
}

namespace {

std::vector<double> draw_angles(int num_paths, Rng &rng, const UniformAngles &policy) {
  if (!(policy.lower < policy.upper) || !angle_in_domain(policy.lower) ||
      !angle_in_domain(policy.upper))
    throw std::invalid_argument("sample_paths: angle interval must lie inside (-pi/2, pi/2)");
  std::uniform_real_distribution<double> uni(policy.lower, policy.upper);
  std::vector<double> angles;
  angles.reserve(static_cast<std::size_t>(num_paths));
  for (int attempt = 0; attempt < kMaxPathDrawAttempts; ++attempt) {
    angles.clear();
    bool ok = true;
    for (int l = 0; l < num_paths && ok; ++l) {
      const double theta = uni(rng);
      for (double other : angles)
        if (std::abs(std::sin(theta) - std::sin(other)) < policy.min_sine_separation) {
          ok = false;
          break;
        }
      angles.push_back(theta);
    }
    if (ok)
      return angles;
  }
  throw std::runtime_error("sample_paths: minimum angle separation cannot be satisfied");
}

} // namespace

PathSet sample_paths(int num_paths, Rng &rng, const AnglePolicy &policy, GainModel gains) {
  if (num_paths < 1)
    throw std::invalid_argument("sample_paths: need at least one path");

  PathSet paths;
  if (const auto *fixed = std::get_if<FixedAngles>(&policy)) {
    if (static_cast<int>(fixed->angles.size()) != num_paths)
      throw std::invalid_argument("sample_paths: fixed angle list length differs from path count");
    paths.angles = fixed->angles;
  } else {
    paths.angles = draw_angles(num_paths, rng, std::get<UniformAngles>(policy));
  }

  paths.gains.reserve(static_cast<std::size_t>(num_paths));
  std::uniform_real_distribution<double> phase(-kPi, kPi);
  CnSampler cn;
  for (int l = 0; l < num_paths; ++l) {
    if (gains == GainModel::ComplexGaussian)
      paths.gains.push_back(cn(rng));
    else
      paths.gains.push_back(std::polar(1.0, phase(rng)));
  }
  paths.validate();
  return paths;
}

CVector generate_pilot_sequence(int pilot_len, PilotKind kind, Rng *rng) {
  if (pilot_len < 1)
    throw std::invalid_argument("generate_pilot_sequence: pilot length must be >= 1");
  CVector phi = CVector::Ones(pilot_len);
  if (kind == PilotKind::RandomPhase) {
    if (rng == nullptr)
      throw std::invalid_argument("generate_pilot_sequence: random phases need a random source");
    std::uniform_real_distribution<double> phase(-kPi, kPi);
    for (int i = 0; i < pilot_len; ++i)
      phi[i] = std::polar(1.0, phase(*rng));
  }
  return phi;
}

ReceivedBlock simulate_reception(const CVector &h, const TransmissionConfig &config,
                                 const CVector &pilot_seq, Rng &rng) {
  config.validate();
  if (h.size() < 1)
    throw std::invalid_argument("simulate_reception: empty channel vector");
  if (pilot_seq.size() != config.pilot_len)
    throw std::invalid_argument("simulate_reception: pilot sequence length differs from pilot_len");

  const Eigen::Index m = h.size();
  ReceivedBlock block;
  block.pilot_seq = pilot_seq;
  CnSampler cn;
  block.data_syms.resize(config.data_len);
  for (int n = 0; n < config.data_len; ++n)
    block.data_syms[n] = cn(rng);

  const double sqrt_pt = std::sqrt(config.pilot_power);
  const double sqrt_pd = std::sqrt(config.data_power);
  block.pilot_obs = sqrt_pt * h * pilot_seq.transpose();
  block.data_obs = sqrt_pd * h * block.data_syms.transpose();

  if (config.noise_var > 0.0) {
    for (Eigen::Index n = 0; n < block.pilot_obs.cols(); ++n)
      for (Eigen::Index i = 0; i < m; ++i)
        block.pilot_obs(i, n) += cn(rng, config.noise_var);
    for (Eigen::Index n = 0; n < block.data_obs.cols(); ++n)
      for (Eigen::Index i = 0; i < m; ++i)
        block.data_obs(i, n) += cn(rng, config.noise_var);
  }
  return block;
}

} // namespace chanest
