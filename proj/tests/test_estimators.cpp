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

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace chanest;

namespace {

// Test-only oracles. They divide by the true-angle overlap, which a receiver
// cannot observe.
cdouble exact_los_gain(const ReceivedBlock &b, double theta_hat, double theta, double pt) {
  const UlaGeometry g(b.num_antennas());
  const CVector ah = steering_vector(g, theta_hat);
  const CVector a = steering_vector(g, theta);
  cdouble num = 0.0;
  for (int i = 0; i < b.pilot_len(); ++i)
    num += ah.dot(b.pilot_obs.col(i)) * std::conj(b.pilot_seq[i]);
  return num / (std::sqrt(pt) * b.pilot_len() * ah.dot(a));
}

CVector true_angle_gains(const ReceivedBlock &b, const std::vector<double> &est,
                         const std::vector<double> &truth, double pt) {
  const UlaGeometry g(b.num_antennas());
  const CMatrix ah = steering_matrix(g, est);
  const CMatrix a = steering_matrix(g, truth);
  CVector proj = CVector::Zero(ah.cols());
  for (int i = 0; i < b.pilot_len(); ++i)
    proj += ah.adjoint() * b.pilot_obs.col(i) * std::conj(b.pilot_seq[i]);
  proj /= std::sqrt(pt) * b.pilot_len();
  return CMatrix(ah.adjoint() * a).fullPivLu().solve(proj);
}

struct Scenario {
  int m = 32;
  int paths = 3;
  int rho = 3;
  double pt = 0.1;
  double noise = 1.0;
};

// Mean ||h_hat - h||^2 over n trials for the chosen estimator, oracle angles.
double mc_error(const Scenario &sc, Method method, int n, std::uint64_t seed) {
  const UlaGeometry g(sc.m);
  TransmissionConfig tx{sc.rho, 1, sc.pt, sc.pt, sc.noise};
  const CVector phi = generate_pilot_sequence(sc.rho);
  double acc = 0.0;
  for (int t = 0; t < n; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    const auto ps = sample_paths(sc.paths, rng, UniformAngles{});
    const CVector h = synthesize_channel(g, ps);
    const auto b = simulate_reception(h, tx, phi, rng);
    CVector h_hat;
    switch (method) {
    case Method::Conventional:
      h_hat = ls_conventional(b, sc.pt).h_hat;
      break;
    case Method::IssacLos:
      h_hat = estimate_gain_los(b, ps.angles[0], sc.pt).estimate.h_hat;
      break;
    case Method::IssacMultipath:
      h_hat = estimate_gains_multipath(b, ps.angles, sc.pt).estimate.h_hat;
      break;
    }
    acc += (h_hat - h).squaredNorm();
  }
  return acc / n;
}

ReceivedBlock noiseless(const CVector &h, int rho, double pt, std::uint64_t seed) {
  Rng rng(seed);
  TransmissionConfig tx{rho, 4, pt, pt, 0.0};
  return simulate_reception(h, tx, generate_pilot_sequence(rho, PilotKind::RandomPhase, &rng), rng);
}

} // namespace

TEST_CASE("conventional LS is exact without noise") {
  const UlaGeometry g(6);
  const PathSet ps{{-0.4, 0.7}, {cdouble(1.0, -0.5), cdouble(0.3, 0.2)}};
  const CVector h = synthesize_channel(g, ps);
  const auto est = ls_conventional(noiseless(h, 3, 0.2, 1), 0.2);
  CHECK(est.method == Method::Conventional);
  CHECK((est.h_hat - h).norm() < 1e-12);
  CHECK_FALSE(est.angles_used.has_value());

  ReceivedBlock empty = noiseless(h, 1, 0.2, 1);
  empty.pilot_obs = CMatrix(6, 0);
  empty.pilot_seq = CVector(0);
  CHECK_THROWS_AS(ls_conventional(empty, 0.2), std::invalid_argument);
}

TEST_CASE("conventional LS error matches the closed form and scales with 1/rho") {
  Scenario sc;
  const double e3 = mc_error(sc, Method::Conventional, 10000, 101);
  const double expected = mmse_closed_form(32, 3, 0.1, 3, 1.0, Method::Conventional);
  CHECK(expected == doctest::Approx(32.0 / 0.3).epsilon(1e-12));
  CHECK(std::abs(e3 / expected - 1.0) < 0.03);

  sc.rho = 6;
  const double e6 = mc_error(sc, Method::Conventional, 10000, 102);
  CHECK(std::abs(e6 / e3 - 0.5) < 0.5 * 0.03);
}

TEST_CASE("line-of-sight gain estimation") {
  const UlaGeometry g(32);
  const double theta = deg2rad(23.0);
  const cdouble alpha(0.6, -0.8);
  const CVector h = alpha * steering_vector(g, theta);
  const auto b = noiseless(h, 3, 0.1, 4);

  const auto exact = estimate_gain_los(b, theta, 0.1);
  CHECK(std::abs(exact.gains[0] - alpha) < 1e-12);
  CHECK((exact.estimate.h_hat - h).norm() < 1e-11);
  CHECK(exact.estimate.method == Method::IssacLos);

  // A mismatched beam scales the gain by the array overlap over M.
  const double theta_hat = theta + deg2rad(1.5);
  const auto biased = estimate_gain_los(b, theta_hat, 0.1);
  const cdouble overlap =
      steering_vector(g, theta_hat).dot(steering_vector(g, theta)) / 32.0;
  CHECK(std::abs(biased.gains[0] - alpha * overlap) < 1e-12);
  CHECK(std::abs(exact_los_gain(b, theta_hat, theta, 0.1) - alpha) < 1e-12);
}

TEST_CASE("deployed line-of-sight gain equals the exact form at the true angle") {
  Rng rng(9);
  const UlaGeometry g(16);
  TransmissionConfig tx{4, 1, 0.3, 0.3, 1.0};
  for (int t = 0; t < 50; ++t) {
    const auto ps = sample_paths(1, rng, UniformAngles{});
    const auto b = simulate_reception(synthesize_channel(g, ps), tx, generate_pilot_sequence(4), rng);
    const auto est = estimate_gain_los(b, ps.angles[0], 0.3);
    CHECK(std::abs(est.gains[0] - exact_los_gain(b, ps.angles[0], ps.angles[0], 0.3)) < 1e-12);
  }
}

TEST_CASE("line-of-sight estimation error matches the closed form") {
  Scenario sc;
  sc.paths = 1;
  const double e = mc_error(sc, Method::IssacLos, 10000, 201);
  const double expected = mmse_closed_form(32, 1, 0.1, 3, 1.0, Method::IssacLos);
  CHECK(expected == doctest::Approx(1.0 / 0.3).epsilon(1e-12));
  CHECK(std::abs(e / expected - 1.0) < 0.03);
}

TEST_CASE("multipath gain estimation") {
  const UlaGeometry g(32);
  const std::vector<double> th{deg2rad(-40.0), deg2rad(-5.0), deg2rad(28.0)};
  const PathSet ps{th, {cdouble(1.2, 0.1), cdouble(-0.3, 0.5), cdouble(0.0, -0.9)}};
  const CVector h = synthesize_channel(g, ps);
  const auto b = noiseless(h, 3, 0.1, 6);

  const auto est = estimate_gains_multipath(b, th, 0.1);
  for (std::size_t l = 0; l < 3; ++l)
    CHECK(std::abs(est.gains[l] - ps.gains[l]) < 1e-11);
  CHECK((est.estimate.h_hat - h).norm() < 1e-10);

  // Perturbed angles: the true-angle oracle still recovers alpha exactly,
  // while the deployed form is biased.
  const std::vector<double> off{th[0] + 0.01, th[1] - 0.008, th[2] + 0.005};
  const CVector oracle = true_angle_gains(b, off, th, 0.1);
  for (int l = 0; l < 3; ++l)
    CHECK(std::abs(oracle[l] - ps.gains[static_cast<std::size_t>(l)]) < 1e-10);
  const auto biased = estimate_gains_multipath(b, off, 0.1);
  CHECK(std::abs(biased.gains[0] - ps.gains[0]) > 1e-3);

  // Reconstruction identity.
  const CMatrix a_hat = steering_matrix(g, off);
  const CVector alpha_hat = Eigen::Map<const CVector>(biased.gains.data(), 3);
  CHECK((biased.estimate.h_hat - a_hat * alpha_hat).norm() < 1e-13 * biased.estimate.h_hat.norm());
  CHECK(biased.estimate.angles_used.value() == off);
}

TEST_CASE("multipath deployed gains equal the true-angle oracle at the true angles") {
  Rng rng(12);
  const UlaGeometry g(24);
  TransmissionConfig tx{3, 1, 0.1, 0.1, 1.0};
  for (int t = 0; t < 50; ++t) {
    const auto ps = sample_paths(3, rng, UniformAngles{});
    const auto b = simulate_reception(synthesize_channel(g, ps), tx, generate_pilot_sequence(3), rng);
    const auto est = estimate_gains_multipath(b, ps.angles, 0.1);
    const CVector oracle = true_angle_gains(b, ps.angles, ps.angles, 0.1);
    for (int l = 0; l < 3; ++l)
      CHECK(std::abs(est.gains[static_cast<std::size_t>(l)] - oracle[l]) <
            1e-9 * (1.0 + std::abs(oracle[l])));
  }
}

TEST_CASE("multipath estimation error matches the closed form") {
  Scenario sc;
  const double e = mc_error(sc, Method::IssacMultipath, 10000, 301);
  const double expected = mmse_closed_form(32, 3, 0.1, 3, 1.0, Method::IssacMultipath);
  CHECK(expected == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(std::abs(e / expected - 1.0) < 0.03);
}

TEST_CASE("single-path multipath estimate reduces to the line-of-sight estimate") {
  Rng rng(3);
  const UlaGeometry g(12);
  TransmissionConfig tx{2, 1, 0.5, 0.5, 1.0};
  for (int t = 0; t < 20; ++t) {
    const auto ps = sample_paths(1, rng, UniformAngles{});
    const auto b = simulate_reception(synthesize_channel(g, ps), tx, generate_pilot_sequence(2), rng);
    const double theta_hat = ps.angles[0] + 0.02;
    const auto los = estimate_gain_los(b, theta_hat, 0.5);
    const auto mp = estimate_gains_multipath(b, std::vector<double>{theta_hat}, 0.5);
    CHECK(std::abs(los.gains[0] - mp.gains[0]) < 1e-12 * (1.0 + std::abs(los.gains[0])));
    CHECK((los.estimate.h_hat - mp.estimate.h_hat).norm() < 1e-11);
  }
}

TEST_CASE("colliding angles are reported as an estimation failure") {
  const UlaGeometry g(16);
  const CVector h = steering_vector(g, 0.2);
  const auto b = noiseless(h, 3, 0.1, 2);
  CHECK_THROWS_AS(estimate_gains_multipath(b, std::vector<double>{0.2, 0.2}, 0.1), EstimationError);
  CHECK_THROWS_AS(estimate_gains_multipath(b, std::vector<double>{0.2, 0.2 + 1e-7}, 0.1),
                  EstimationError);
  CHECK_THROWS_AS(estimate_gains_multipath(b, std::vector<double>{}, 0.1), std::invalid_argument);
}

TEST_CASE("closed-form error predictions") {
  CHECK(mmse_closed_form(32, 3, 0.1, 3, 1.0, Method::Conventional) ==
        doctest::Approx(106.6667).epsilon(1e-4));
  const double los = mmse_closed_form(32, 1, 0.1, 3, 1.0, Method::IssacLos);
  CHECK(los == doctest::Approx(3.3333).epsilon(1e-4));
  CHECK(mmse_closed_form(32, 1, 0.1, 3, 1.0, Method::Conventional) / los ==
        doctest::Approx(32.0));
  CHECK(mmse_closed_form(32, 3, 0.1, 3, 1.0, Method::IssacMultipath) ==
        doctest::Approx(10.0).epsilon(1e-12));
  CHECK_THROWS_AS(mmse_closed_form(32, 3, 0.0, 3, 1.0, Method::Conventional),
                  std::invalid_argument);

  for (int m : {4, 16, 64})
    for (int l : {1, 2, 3}) {
      const auto p = closed_form_predictions(m, l, 0.2, 0.3, 5, 2.0, 7.0);
      CHECK(p.e_cp == doctest::Approx(m * p.e_lp / l).epsilon(1e-12));
      CHECK(p.xi < 1.0);
      CHECK(p.gamma_upper == doctest::Approx(0.3 * 7.0 / 2.0));
      CHECK(p.gamma_cp_approx <= p.gamma_upper);
    }
}

TEST_CASE("beamformer") {
  CVector h(2);
  h << 2.0, 0.0;
  const CVector v = mrc_beamformer(h);
  CHECK(std::abs(v[0] - 1.0) < 1e-15);
  CHECK(std::abs(v[1]) < 1e-15);
  CHECK_THROWS_AS(mrc_beamformer(CVector(CVector::Zero(3))), EstimationError);

  Rng rng(8);
  for (int t = 0; t < 100; ++t) {
    CVector x(9), y(9);
    for (int i = 0; i < 9; ++i) {
      x[i] = sample_cn(rng, 1.0);
      y[i] = sample_cn(rng, 1.0);
    }
    const CVector vx = mrc_beamformer(x);
    CHECK(std::abs(vx.norm() - 1.0) < 1e-12);
    const cdouble c(-0.7, 2.1);
    const CVector vc = mrc_beamformer(CVector(c * x));
    CHECK(std::abs(std::abs(vx.dot(vc)) - 1.0) < 1e-12);
    CHECK(std::abs(std::abs(vx.dot(y)) - std::abs(vc.dot(y))) < 1e-12);
  }
}

TEST_CASE("empirical SNR examples") {
  const UlaGeometry g(8);
  const double theta = 0.3;
  const cdouble alpha(0.5, 1.0);
  const CVector h = alpha * steering_vector(g, theta);
  CHECK(empirical_snr(mrc_beamformer(h), h, 0.2, 0.5) ==
        doctest::Approx(snr_upper_bound(0.2, h.squaredNorm(), 0.5)).epsilon(1e-12));

  CVector e0 = CVector::Zero(2), e1 = CVector::Zero(2);
  e0[0] = 1.0;
  e1[1] = 3.0;
  CHECK(empirical_snr(e0, e1, 1.0, 1.0) == 0.0);

  const CVector v = steering_vector(g, theta) / std::sqrt(8.0);
  CHECK(empirical_snr(v, h, 0.2, 0.5) == doctest::Approx(0.2 * std::norm(alpha) * 8.0 / 0.5));
}

TEST_CASE("realized SNR never exceeds the matched-filter bound") {
  Rng rng(55);
  for (int t = 0; t < 2000; ++t) {
    const int m = 1 + t % 40;
    CVector h(m), x(m);
    for (int i = 0; i < m; ++i) {
      h[i] = sample_cn(rng, 1.0);
      x[i] = sample_cn(rng, 1.0);
    }
    const double bound = empirical_snr(mrc_beamformer(h), h, 0.1, 1.0);
    CHECK(empirical_snr(mrc_beamformer(x), h, 0.1, 1.0) <= bound * (1.0 + 1e-9));
  }
}

TEST_CASE("conventional SNR approximation") {
  const double snr_t = pilot_snr_per_antenna(0.1, 32.0, 32, 1.0);
  CHECK(snr_t == doctest::Approx(0.1));
  const auto a = snr_cp_approx(32, 3, snr_t, 0.1, 32.0, 1.0);
  CHECK(a.xi == doctest::Approx(0.96875 / 1.3).epsilon(1e-12));
  CHECK(a.xi == doctest::Approx(0.74519).epsilon(1e-5));
  CHECK(a.gamma == doctest::Approx(3.2 * (1.0 - a.xi)).epsilon(1e-12));

  const auto big = snr_cp_approx(32, 3, 1e12, 0.1, 32.0, 1.0);
  CHECK(big.xi < 1e-12);
  CHECK(big.gamma == doctest::Approx(3.2).epsilon(1e-10));

  CHECK(snr_cp_approx(1, 3, 0.0, 0.1, 1.0, 1.0).xi == 0.0);

  double prev = -1.0;
  for (double e = 0.0; e < 50.0; e += 0.5) {
    const auto s = snr_cp_approx(16, 1, e, 0.1, 10.0, 1.0);
    CHECK(s.gamma > prev);
    CHECK(s.gamma <= snr_upper_bound(0.1, 10.0, 1.0));
    prev = s.gamma;
  }
  CHECK_THROWS_AS(snr_cp_approx(0, 3, 0.1, 0.1, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("angle-mismatch SNR") {
  const double upper = snr_upper_bound(0.1, 20.0, 1.0);
  CHECK(angle_mismatch_snr(0.4, 0.4, 0.1, 20.0, 1.0, 16) == doctest::Approx(upper).epsilon(1e-12));
  const double null_angle = std::asin(2.0 / 16.0);
  CHECK(angle_mismatch_snr(null_angle, 0.0, 0.1, 20.0, 1.0, 16) < 1e-12 * upper);
  for (double th : {-1.0, 0.0, 0.7})
    CHECK(angle_mismatch_snr(th, 0.3, 0.1, 20.0, 1.0, 1) == doctest::Approx(upper).epsilon(1e-12));
}

TEST_CASE("method names") {
  CHECK(std::string(method_name(Method::Conventional)) == "conventional");
  CHECK(std::string(method_name(Method::IssacLos)) == "issac_los");
  CHECK(std::string(method_name(Method::IssacMultipath)) == "issac_multipath");
}
