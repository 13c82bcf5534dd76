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

#include "chanest/subspace.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace chanest {

SampleCovariance::SampleCovariance(CMatrix matrix, int num_snapshots)
    : num_snapshots_(num_snapshots) {
  if (matrix.rows() != matrix.cols() || matrix.rows() == 0)
    throw std::invalid_argument("SampleCovariance: matrix must be square and nonempty");
  matrix_ = 0.5 * (matrix + matrix.adjoint());
}

SubarrayPlan SubarrayPlan::make(int parent_size, int num_subarrays) {
  SubarrayPlan plan{num_subarrays, parent_size - num_subarrays + 1, parent_size};
  plan.validate();
  return plan;
}

SubarrayPlan SubarrayPlan::default_for(int parent_size, int num_paths) {
  if (num_paths < 1)
    throw std::invalid_argument("SubarrayPlan: need at least one path");
  return make(parent_size, (num_paths + 1) / 2 + 1);
}

void SubarrayPlan::validate() const {
  if (num_subarrays < 1 || subarray_size < 1 || parent_size < 1)
    throw std::invalid_argument("SubarrayPlan: sizes must be positive");
  if (subarray_size != parent_size - num_subarrays + 1)
    throw std::invalid_argument("SubarrayPlan: subarray size must equal M - P + 1");
}

std::vector<double> uniform_angle_grid(double lower_deg, double upper_deg, double step_deg) {
  if (!(step_deg > 0.0) || !(lower_deg < upper_deg) || lower_deg <= -90.0 || upper_deg >= 90.0)
    throw std::invalid_argument("uniform_angle_grid: need -90 < lower < upper < 90 and step > 0");
  const auto count = static_cast<std::size_t>(std::floor((upper_deg - lower_deg) / step_deg + 1e-9)) + 1;
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i)
    grid[i] = deg2rad(lower_deg + step_deg * static_cast<double>(i));
  return grid;
}

SteeringGrid::SteeringGrid(int array_size, std::vector<double> angles)
    : angles_(std::move(angles)) {
  for (std::size_t i = 1; i < angles_.size(); ++i)
    if (!(angles_[i] > angles_[i - 1]))
      throw std::invalid_argument("SteeringGrid: grid must be strictly increasing");
  steering_ = steering_matrix(UlaGeometry(array_size), angles_);
}

SampleCovariance sample_covariance(const ReceivedBlock &block) {
  const int total = block.pilot_len() + block.data_len();
  if (total < 1 || block.num_antennas() < 1)
    throw std::invalid_argument("sample_covariance: block has no snapshots");
  CMatrix r = CMatrix::Zero(block.num_antennas(), block.num_antennas());
  if (block.pilot_len() > 0)
    r.noalias() += block.pilot_obs * block.pilot_obs.adjoint();
  r.noalias() += block.data_obs * block.data_obs.adjoint();
  r /= static_cast<double>(total);
  return {std::move(r), total};
}

EigenPairs hermitian_eigendecomposition(const CMatrix &r) {
  if (r.rows() != r.cols() || r.rows() == 0)
    throw std::invalid_argument("hermitian_eigendecomposition: matrix must be square");
  const double scale = std::max(r.norm(), 1e-300);
  if ((r - r.adjoint()).norm() > 1e-9 * scale)
    throw std::invalid_argument("hermitian_eigendecomposition: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(r);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("hermitian_eigendecomposition: solver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

EigenPairs hermitian_eigendecomposition(const SampleCovariance &r) {
  return hermitian_eigendecomposition(r.matrix());
}

int numerical_rank(const EigenPairs &eig, double rel_tol) {
  if (eig.values.size() == 0)
    return 0;
  const double lmax = eig.values.maxCoeff();
  if (!(lmax > 0.0))
    return 0;
  return static_cast<int>((eig.values.array() > rel_tol * lmax).count());
}

Pseudospectrum bartlett_spectrum(const SampleCovariance &r, const SteeringGrid &grid) {
  if (r.dim() != grid.array_size())
    throw std::invalid_argument("bartlett_spectrum: covariance size differs from array size");
  const CMatrix &a = grid.matrix();
  const CMatrix ra = r.matrix() * a;
  const RVector quad = a.conjugate().cwiseProduct(ra).colwise().sum().real().transpose();
  Pseudospectrum spec{grid.angles(), std::vector<double>(grid.angles().size())};
  for (std::size_t g = 0; g < spec.values.size(); ++g)
    spec.values[g] = std::max(0.0, quad[static_cast<Eigen::Index>(g)]);
  return spec;
}

Pseudospectrum bartlett_spectrum(const SampleCovariance &r, std::span<const double> grid) {
  return bartlett_spectrum(r, SteeringGrid(r.dim(), {grid.begin(), grid.end()}));
}

std::vector<SampleCovariance> subarray_covariances(const ReceivedBlock &block,
                                                   const SubarrayPlan &plan) {
  plan.validate();
  if (plan.parent_size != block.num_antennas())
    throw std::invalid_argument("subarray_covariances: plan does not match array size");
  const int total = block.pilot_len() + block.data_len();
  if (total < 1)
    throw std::invalid_argument("subarray_covariances: block has no snapshots");

  const int msub = plan.subarray_size;
  std::vector<SampleCovariance> covs;
  covs.reserve(static_cast<std::size_t>(plan.num_subarrays));
  for (int p = 0; p < plan.num_subarrays; ++p) {
    CMatrix r = CMatrix::Zero(msub, msub);
    if (block.pilot_len() > 0) {
      const auto yt = block.pilot_obs.middleRows(p, msub);
      r.noalias() += yt * yt.adjoint();
    }
    const auto yd = block.data_obs.middleRows(p, msub);
    r.noalias() += yd * yd.adjoint();
    r /= static_cast<double>(total);
    covs.emplace_back(std::move(r), total);
  }
  return covs;
}

SampleCovariance forward_backward_smooth(std::span<const SampleCovariance> covs) {
  if (covs.empty())
    throw std::invalid_argument("forward_backward_smooth: no covariances given");
  const int n = covs.front().dim();
  CMatrix mean = CMatrix::Zero(n, n);
  for (const auto &c : covs) {
    if (c.dim() != n)
      throw std::invalid_argument("forward_backward_smooth: covariance sizes differ");
    mean += c.matrix();
  }
  mean /= static_cast<double>(covs.size());

  // J conj(R) J reverses both row and column order of conj(R).
  const CMatrix backward = mean.conjugate().reverse();
  return {0.5 * (mean + backward), covs.front().num_snapshots()};
}

Pseudospectrum music_spectrum(const SampleCovariance &r, int num_sources,
                              const SteeringGrid &grid) {
  const int dim = r.dim();
  if (num_sources < 1 || num_sources >= dim)
    throw std::invalid_argument("music_spectrum: need 1 <= L < covariance dimension");
  if (dim != grid.array_size())
    throw std::invalid_argument("music_spectrum: covariance size differs from array size");

  const EigenPairs eig = hermitian_eigendecomposition(r);
  const CMatrix &a = grid.matrix();
  const int noise_dim = dim - num_sources;

  // With orthonormal eigenvectors, ||E_n^H a||^2 = ||a||^2 - ||E_s^H a||^2;
  // project on whichever subspace is smaller.
  RVector denom;
  if (noise_dim <= num_sources) {
    const CMatrix proj = eig.vectors.leftCols(noise_dim).adjoint() * a;
    denom = proj.colwise().squaredNorm().transpose();
  } else {
    const CMatrix proj = eig.vectors.rightCols(num_sources).adjoint() * a;
    denom = (a.colwise().squaredNorm() - proj.colwise().squaredNorm()).transpose();
  }

  const double floor = 1e-14 * dim;
  Pseudospectrum spec{grid.angles(), std::vector<double>(grid.angles().size())};
  for (std::size_t g = 0; g < spec.values.size(); ++g)
    spec.values[g] = 1.0 / std::max(denom[static_cast<Eigen::Index>(g)], floor);
  return spec;
}

Pseudospectrum music_spectrum(const SampleCovariance &r, int num_sources,
                              std::span<const double> grid) {
  return music_spectrum(r, num_sources, SteeringGrid(r.dim(), {grid.begin(), grid.end()}));
}

AngleEstimates find_peaks(const Pseudospectrum &spec, int num_peaks, bool refine) {
  const auto &y = spec.values;
  const auto &x = spec.grid;
  const std::size_t n = y.size();
  if (num_peaks < 1)
    throw std::invalid_argument("find_peaks: need at least one peak");
  if (x.size() != n || n < static_cast<std::size_t>(2 * num_peaks + 1))
    throw std::invalid_argument("find_peaks: grid must hold at least 2L+1 points");

  struct Peak {
    double angle;
    double height;
  };
  std::vector<Peak> peaks;

  std::size_t i = 1;
  while (i + 1 < n) {
    if (!(y[i] > y[i - 1])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && y[j + 1] == y[i])
      ++j;
    if (j + 1 < n && y[j + 1] < y[i]) {
      const std::size_t k = (i + j) / 2;
      Peak pk{x[k], y[k]};
      if (refine && i == j) {
        const double ym = y[k - 1], y0 = y[k], yp = y[k + 1];
        const double curvature = ym - 2.0 * y0 + yp;
        if (curvature < 0.0) {
          const double delta = std::clamp(0.5 * (ym - yp) / curvature, -0.5, 0.5);
          const double step = delta >= 0.0 ? x[k + 1] - x[k] : x[k] - x[k - 1];
          pk.angle = x[k] + delta * step;
          pk.height = y0 - 0.25 * (ym - yp) * delta;
        }
      }
      peaks.push_back(pk);
    }
    i = j + 1;
  }

  if (peaks.size() < static_cast<std::size_t>(num_peaks))
    throw EstimationError("find_peaks: fewer local maxima than requested sources");

  std::stable_sort(peaks.begin(), peaks.end(), [](const Peak &a, const Peak &b) {
    if (a.height != b.height)
      return a.height > b.height;
    return a.angle < b.angle;
  });
  peaks.resize(static_cast<std::size_t>(num_peaks));
  std::sort(peaks.begin(), peaks.end(),
            [](const Peak &a, const Peak &b) { return a.angle < b.angle; });

  AngleEstimates est;
  for (const auto &p : peaks) {
    est.angles.push_back(p.angle);
    est.peak_values.push_back(p.height);
  }
  return est;
}

} // namespace chanest
