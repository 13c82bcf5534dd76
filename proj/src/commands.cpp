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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace chanest {

namespace fs = std::filesystem;

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

SweepRow sweep_row(const SweepPoint &pt) {
  return {pt.sweep_value,
          pt.e_cp_sim,
          pt.e_cp_theory,
          pt.e_lp_sim,
          pt.e_lp_theory,
          pt.nrmse_cp,
          pt.nrmse_lp,
          lin2db(pt.gamma_cp_sim),
          lin2db(pt.gamma_cp_approx),
          lin2db(pt.gamma_lp_sim),
          lin2db(pt.gamma_upper),
          pt.failure_rate,
          static_cast<double>(pt.trials)};
}

void write_sweep_csv(std::ostream &out, const SweepResult &result) {
  for (std::size_t c = 0; c < kSweepColumns.size(); ++c)
    out << (c ? "," : "") << kSweepColumns[c];
  out << '\n';
  for (const auto &pt : result.points) {
    const SweepRow row = sweep_row(pt);
    for (std::size_t c = 0; c < row.size(); ++c)
      out << (c ? "," : "") << format_number(row[c]);
    out << '\n';
  }
}

std::vector<SweepRow> read_sweep_csv(std::istream &in) {
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("sweep csv: missing header");
  std::string expected;
  for (std::size_t c = 0; c < kSweepColumns.size(); ++c)
    expected += std::string(c ? "," : "") + kSweepColumns[c];
  if (line != expected)
    throw std::runtime_error("sweep csv: unexpected header");

  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty())
      continue;
    SweepRow row{};
    std::istringstream fields(line);
    std::string cell;
    std::size_t c = 0;
    while (std::getline(fields, cell, ',')) {
      if (c >= row.size())
        throw std::runtime_error("sweep csv: too many columns");
      row[c++] = std::strtod(cell.c_str(), nullptr);
    }
    if (c != row.size())
      throw std::runtime_error("sweep csv: too few columns");
    rows.push_back(row);
  }
  return rows;
}

void write_cdf_csv(std::ostream &out, const CdfResult &cdf) {
  out << "method,snr_db,cdf\n";
  auto series = [&](const char *name, const CdfSeries &s) {
    for (std::size_t i = 0; i < s.values.size(); ++i)
      out << name << ',' << format_number(s.values[i]) << ',' << format_number(s.probabilities[i])
          << '\n';
  };
  series(method_name(Method::Conventional), cdf.cp_db);
  series("issac", cdf.lp_db);
}

void write_cdf_summary_csv(std::ostream &out, const CdfResult &cdf) {
  out << "method,p10_db,p50_db,p90_db,trials,failures\n";
  auto line = [&](const char *name, const CdfSeries &s) {
    out << name << ',' << format_number(s.p10) << ',' << format_number(s.p50) << ','
        << format_number(s.p90) << ',' << cdf.trials << ',' << cdf.failures << '\n';
  };
  line(method_name(Method::Conventional), cdf.cp_db);
  line("issac", cdf.lp_db);
}

void write_spectrum_csv(std::ostream &out, const SpectrumDump &dump) {
  out << "angle_deg,bartlett" << (dump.music ? ",music" : "") << '\n';
  for (std::size_t g = 0; g < dump.grid.size(); ++g) {
    out << format_number(rad2deg(dump.grid[g])) << ',' << format_number(dump.bartlett[g]);
    if (dump.music)
      out << ',' << format_number((*dump.music)[g]);
    out << '\n';
  }
}

RunConfig resolve_config(const CommandOptions &opts) {
  RunConfig cfg = opts.config ? load_run_config(*opts.config) : RunConfig{};
  if (opts.seed)
    cfg.spec.base_seed = *opts.seed;
  if (opts.trials)
    cfg.spec.num_trials = *opts.trials;
  if (opts.threads)
    cfg.spec.num_threads = *opts.threads;
  if (opts.axis) {
    try {
      cfg.spec.sweep_axis = parse_axis(*opts.axis);
    } catch (const std::invalid_argument &e) {
      throw ConfigError(e.what());
    }
  }
  if (opts.mode) {
    if (*opts.mode == "los")
      cfg.spec.mode = Mode::Los;
    else if (*opts.mode == "multipath")
      cfg.spec.mode = Mode::Multipath;
    else
      throw ConfigError("--mode must be los or multipath");
    if (cfg.spec.mode == Mode::Los)
      cfg.spec.num_paths = 1;
  }
  if (opts.oracle_angles)
    cfg.spec.angle_stage = AngleStage::Oracle;
  cfg.finalize();
  return cfg;
}

namespace {

fs::path output_path(const RunConfig &cfg, const fs::path &out) {
  if (out.empty())
    throw ConfigError("an output path is required (--out)");
  fs::path p = out.is_absolute() ? out : cfg.output_dir / out;
  if (p.has_parent_path())
    fs::create_directories(p.parent_path());
  return p;
}

std::ofstream open_output(const fs::path &p) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f)
    throw std::runtime_error("cannot write '" + p.string() + "'");
  return f;
}

template <class Body> int guarded(std::ostream &err, Body &&body) {
  try {
    return body();
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

} // namespace

int cmd_sweep(const CommandOptions &opts, std::ostream &log, std::ostream &err) {
  return guarded(err, [&] {
    const RunConfig cfg = resolve_config(opts);
    const fs::path path = output_path(cfg, opts.out);
    const SweepResult result = run_sweep(cfg.spec);
    {
      auto f = open_output(path);
      write_sweep_csv(f, result);
      if (!f)
        throw std::runtime_error("write failed for '" + path.string() + "'");
    }
    double worst = 0.0;
    for (const auto &pt : result.points)
      worst = std::max(worst, pt.failure_rate);
    if (cfg.verbosity > 0)
      log << "sweep over " << axis_name(cfg.spec.sweep_axis) << ": " << result.points.size()
          << " points written to " << path.string() << '\n';
    if (worst > cfg.max_failure_rate) {
      err << "failure rate " << worst << " exceeds ceiling " << cfg.max_failure_rate << '\n';
      return 2;
    }
    return 0;
  });
}

int cmd_cdf(const CommandOptions &opts, std::ostream &log, std::ostream &err) {
  return guarded(err, [&] {
    const RunConfig cfg = resolve_config(opts);
    const fs::path path = output_path(cfg, opts.out);
    const CdfResult cdf = run_cdf(cfg.spec);
    {
      auto f = open_output(path);
      write_cdf_csv(f, cdf);
    }
    fs::path summary = path;
    summary.replace_filename(path.stem().string() + "_summary.csv");
    {
      auto f = open_output(summary);
      write_cdf_summary_csv(f, cdf);
    }
    log << "p90 snr: conventional " << format_number(cdf.cp_db.p90) << " dB, issac "
        << format_number(cdf.lp_db.p90) << " dB\n";
    const double rate = static_cast<double>(cdf.failures) / cdf.trials;
    if (rate > cfg.max_failure_rate) {
      err << "failure rate " << rate << " exceeds ceiling " << cfg.max_failure_rate << '\n';
      return 2;
    }
    return 0;
  });
}

int cmd_spectrum(const CommandOptions &opts, std::ostream &log, std::ostream &err) {
  return guarded(err, [&] {
    const RunConfig cfg = resolve_config(opts);
    const fs::path path = output_path(cfg, opts.out);
    const SpectrumDump dump = TrialRunner(cfg.spec).spectra(0);
    {
      auto f = open_output(path);
      write_spectrum_csv(f, dump);
    }
    if (cfg.verbosity > 0) {
      log << "true angles (deg):";
      for (double a : dump.true_angles)
        log << ' ' << format_number(rad2deg(a));
      log << '\n';
    }
    return 0;
  });
}

} // namespace chanest
