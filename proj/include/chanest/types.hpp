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

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace chanest {

using cdouble = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

/// Random source used throughout. Every trial owns one instance.
using Rng = std::mt19937_64;

inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Linear power ratio from decibels and back.
inline double db2lin(double db) { return std::pow(10.0, db / 10.0); }
inline double lin2db(double lin) { return 10.0 * std::log10(lin); }

/// Raised when an estimation stage cannot produce a usable result
/// (too few spectral peaks, colliding angle estimates, zero estimate).
/// The simulation harness records these as per-trial failures.
class EstimationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Draws circularly symmetric complex Gaussian samples. Keeps the cached
/// second normal variate between calls, so reuse one sampler per stream.
class CnSampler {
public:
  cdouble operator()(Rng &rng, double variance = 1.0) {
    const double scale = std::sqrt(variance / 2.0);
    const double re = normal_(rng);
    const double im = normal_(rng);
    return {scale * re, scale * im};
  }

private:
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Single CN(0, variance) draw.
inline cdouble sample_cn(Rng &rng, double variance = 1.0) {
  CnSampler s;
  return s(rng, variance);
}

/// Derives a well-mixed 64-bit seed from a base seed and a stream index
/// (SplitMix64 finalizer applied twice).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(base) ^ (stream * 0xd1b54a32d192ed03ULL + 0x632be59bd9b4e019ULL));
}

} // namespace chanest
