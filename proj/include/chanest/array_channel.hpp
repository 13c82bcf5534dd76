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

#include "chanest/types.hpp"

#include <span>
#include <variant>
#include <vector>

namespace chanest {

/// Uniform linear array with half-wavelength element spacing.
class UlaGeometry {
public:
  explicit UlaGeometry(int num_antennas);

  int num_antennas() const { return num_antennas_; }

private:
  int num_antennas_;
};

/// Parametric multipath description: one angle (radians) and one complex
/// gain per path.
struct PathSet {
  std::vector<double> angles;
  std::vector<cdouble> gains;

  std::size_t size() const { return angles.size(); }

  /// Throws std::invalid_argument on mismatched sizes, empty sets,
  /// out-of-range or repeated angles.
  void validate() const;
};

/// Angles drawn uniformly in [lower, upper] (radians), rejecting draws whose
/// sine-domain separation to any other path is below min_sine_separation.
struct UniformAngles {
  double lower = deg2rad(-60.0);
  double upper = deg2rad(60.0);
  double min_sine_separation = std::sin(deg2rad(5.0));
};

/// Angles taken verbatim from a list (radians).
struct FixedAngles {
  std::vector<double> angles;
};

using AnglePolicy = std::variant<UniformAngles, FixedAngles>;

enum class GainModel {
  ComplexGaussian, ///< alpha ~ CN(0, 1)
  UnitModulus,     ///< |alpha| = 1 with uniform phase
};

enum class PilotKind { AllOnes, RandomPhase };

struct TransmissionConfig {
  int pilot_len = 3;        ///< rho
  int data_len = 97;        ///< kappa
  double pilot_power = 0.1; ///< P_t
  double data_power = 0.1;  ///< P_d
  double noise_var = 1.0;   ///< sigma^2

  void validate() const;
};

/// Observations collected by the base station over one coherence interval.
/// Column n of pilot_obs is sqrt(P_t) h phi(n) + noise; column n of data_obs
/// is sqrt(P_d) h s(n) + noise.
struct ReceivedBlock {
  CMatrix pilot_obs;
  CMatrix data_obs;
  CVector pilot_seq;
  CVector data_syms; // ground truth, for tests only

  int num_antennas() const { return static_cast<int>(data_obs.rows()); }
  int pilot_len() const { return static_cast<int>(pilot_obs.cols()); }
  int data_len() const { return static_cast<int>(data_obs.cols()); }
};

/// Entry m is exp(j pi m sin(theta)). Throws std::domain_error unless
/// theta lies in the open interval (-pi/2, pi/2).
CVector steering_vector(const UlaGeometry &geom, double theta);

/// Columns are steering vectors for each angle in turn.
CMatrix steering_matrix(const UlaGeometry &geom, std::span<const double> angles);

/// h = A(angles) * gains.
CVector synthesize_channel(const UlaGeometry &geom, const PathSet &paths);

/// Draws L paths. Throws std::runtime_error if the separation constraint
/// cannot be met after a bounded number of attempts.
PathSet sample_paths(int num_paths, Rng &rng, const AnglePolicy &policy,
                     GainModel gains = GainModel::ComplexGaussian);

/// Unit-modulus pilot with energy exactly rho. The random-phase variant
/// needs a random source.
CVector generate_pilot_sequence(int pilot_len, PilotKind kind = PilotKind::AllOnes,
                                Rng *rng = nullptr);

/// Synthesizes pilot and data observations with CN(0, sigma^2 I) noise and
/// CN(0, 1) data symbols.
ReceivedBlock simulate_reception(const CVector &h, const TransmissionConfig &config,
                                 const CVector &pilot_seq, Rng &rng);

} // namespace chanest
