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

#include <span>
#include <vector>

namespace chanest {

/// Hermitian sample covariance. The constructor enforces R = R^H exactly
/// by averaging the input with its conjugate transpose.
class SampleCovariance {
public:
  SampleCovariance(CMatrix matrix, int num_snapshots);

  const CMatrix &matrix() const { return matrix_; }
  int num_snapshots() const { return num_snapshots_; }
  int dim() const { return static_cast<int>(matrix_.rows()); }

private:
  CMatrix matrix_;
  int num_snapshots_;
};

/// Eigenvalues in ascending order with matching orthonormal eigenvectors
/// as columns.
struct EigenPairs {
  RVector values;
  CMatrix vectors;
};

/// Overlapping-subarray layout for spatial smoothing: subarray p covers
/// elements p .. p + subarray_size - 1 of the parent array.
struct SubarrayPlan {
  int num_subarrays = 1;
  int subarray_size = 1;
  int parent_size = 1;

  static SubarrayPlan make(int parent_size, int num_subarrays);
  /// P = ceil(L/2) + 1, the smallest count with forward-backward rank
  /// restoration slack for L coherent paths.
  static SubarrayPlan default_for(int parent_size, int num_paths);

  void validate() const;
  /// True when smoothing with this plan can restore rank L.
  bool supports(int num_paths) const {
    return subarray_size >= num_paths + 1 && 2 * num_subarrays >= num_paths;
  }
};

struct Pseudospectrum {
  std::vector<double> grid;   ///< radians, strictly increasing
  std::vector<double> values; ///< nonnegative
};

struct AngleEstimates {
  std::vector<double> angles; ///< radians, ascending
  std::vector<double> peak_values;
};

/// Uniform angle grid (radians) from lower_deg to upper_deg inclusive.
std::vector<double> uniform_angle_grid(double lower_deg = -89.0, double upper_deg = 89.0,
                                       double step_deg = 0.02);

/// Steering vectors for a fixed grid, computed once and reused across
/// spectrum evaluations of the same array size.
class SteeringGrid {
public:
  SteeringGrid(int array_size, std::vector<double> angles);

  int array_size() const { return static_cast<int>(steering_.rows()); }
  const std::vector<double> &angles() const { return angles_; }
  const CMatrix &matrix() const { return steering_; }

private:
  std::vector<double> angles_;
  CMatrix steering_;
};

/// (1 / (rho + kappa)) * sum of y y^H over pilot and data snapshots.
SampleCovariance sample_covariance(const ReceivedBlock &block);

/// Backed by Eigen's self-adjoint solver. Throws std::invalid_argument when
/// the input departs from Hermitian beyond a relative 1e-9.
EigenPairs hermitian_eigendecomposition(const CMatrix &r);
EigenPairs hermitian_eigendecomposition(const SampleCovariance &r);

/// Number of eigenvalues above rel_tol * lambda_max.
int numerical_rank(const EigenPairs &eig, double rel_tol = 1e-8);

/// a^H(theta) R a(theta) over the grid.
Pseudospectrum bartlett_spectrum(const SampleCovariance &r, const SteeringGrid &grid);
Pseudospectrum bartlett_spectrum(const SampleCovariance &r, std::span<const double> grid);

/// Per-subarray covariances over both pilot and data snapshots.
std::vector<SampleCovariance> subarray_covariances(const ReceivedBlock &block,
                                                   const SubarrayPlan &plan);

/// R_fb = (Rbar + J conj(Rbar) J) / 2 with Rbar the mean of the inputs and
/// J the exchange matrix.
SampleCovariance forward_backward_smooth(std::span<const SampleCovariance> covs);

/// 1 / (a^H E_n E_n^H a), E_n spanning the dim - L smallest eigenvalues.
Pseudospectrum music_spectrum(const SampleCovariance &r, int num_sources,
                              const SteeringGrid &grid);
Pseudospectrum music_spectrum(const SampleCovariance &r, int num_sources,
                              std::span<const double> grid);

/// The num_peaks highest strict local maxima (plateaus resolve to their
/// centre), ties broken toward the smaller angle, returned in ascending
/// angle order. With refine set, each peak is moved to the vertex of the
/// parabola through it and its two neighbours.
/// Throws EstimationError when fewer than num_peaks maxima exist.
AngleEstimates find_peaks(const Pseudospectrum &spec, int num_peaks, bool refine = true);

} // namespace chanest
