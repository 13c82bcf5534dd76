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

#include "chanest/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char **argv) {
  CLI::App app{"Uplink channel estimation simulator: pilot LS versus angle-aided estimation"};
  app.require_subcommand(1);

  chanest::CommandOptions opts;
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  int trials = 0;
  int threads = 0;
  std::string axis;
  std::string mode;

  auto add_common = [&](CLI::App *sub) {
    sub->add_option("--config", config, "Experiment configuration file");
    sub->add_option("--out", out, "Output CSV path")->required();
    sub->add_option("--seed", seed, "Base random seed");
    sub->add_option("--trials", trials, "Monte Carlo trials per point");
    sub->add_option("--threads", threads, "Worker threads");
    sub->add_option("--mode", mode, "los or multipath");
    sub->add_flag("--oracle-angles", opts.oracle_angles, "Use true path angles for gain estimation");
  };

  auto *sweep = app.add_subcommand("sweep", "Parameter sweep of estimation error and receive SNR");
  add_common(sweep);
  sweep->add_option("--axis", axis, "Sweep axis: m, pt, pd or rho");
  auto *cdf = app.add_subcommand("cdf", "Empirical CDF of the receive SNR of both methods");
  add_common(cdf);
  auto *spectrum = app.add_subcommand("spectrum", "Bartlett and MUSIC pseudospectra of one block");
  add_common(spectrum);

  CLI11_PARSE(app, argc, argv);

  if (!config.empty())
    opts.config = config;
  opts.out = out;
  for (auto *sub : {sweep, cdf, spectrum}) {
    if (sub->count("--seed"))
      opts.seed = seed;
    if (sub->count("--trials"))
      opts.trials = trials;
    if (sub->count("--threads"))
      opts.threads = threads;
  }
  if (!axis.empty())
    opts.axis = axis;
  if (!mode.empty())
    opts.mode = mode;

  if (app.got_subcommand(sweep))
    return chanest::cmd_sweep(opts, std::cout, std::cerr);
  if (app.got_subcommand(cdf))
    return chanest::cmd_cdf(opts, std::cout, std::cerr);
  return chanest::cmd_spectrum(opts, std::cout, std::cerr);
}
