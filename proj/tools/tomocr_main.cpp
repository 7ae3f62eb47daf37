// Copyright 2026 The tomocr authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "tomocr/harness.hpp"

namespace {

using namespace tomocr;

struct CommonFlags {
  std::string config_path;
  double scale = 1.0;
  int threads = 1;
  std::optional<std::uint64_t> seed;
};

int scaled(int value, double scale) {
  return std::max(1, int(std::ceil(double(value) * scale)));
}

void apply_flags(ExperimentConfig& config, const CommonFlags& flags) {
  config.repetitions = scaled(config.repetitions, flags.scale);
  if (config.states > 0) config.states = scaled(config.states, flags.scale);
  if (config.ratio_samples > 0) config.ratio_samples = scaled(config.ratio_samples, flags.scale);
  config.threads = flags.threads;
  if (flags.seed) config.master_seed = *flags.seed;
}

void run_quantile_config(ExperimentConfig config) {
  QuantileReport report = run_quantile_experiment(config);
  write_report_files(config.out, report.to_csv(), config, report.runtime_seconds);
  for (const auto& [kind, agg] : report.aggregate)
    std::printf("%s q=%d region %s: quantile %.1f%% (states %.1f%%..%.1f%%)\n",
                to_string(config.scheme).c_str(), config.q, to_string(kind).c_str(),
                100.0 * agg, 100.0 * report.min_state.at(kind),
                100.0 * report.max_state.at(kind));
}

void run_sweep_config(ExperimentConfig config) {
  SweepReport report = run_intersection_sweep(config);
  write_report_files(config.out, report.to_csv(), config, report.runtime_seconds);
  for (RegionKind kind : config.regions) {
    try {
      std::printf("%s q=%d pair %s region %s: crossover N* ~ %.0f\n",
                  to_string(config.scheme).c_str(), config.q,
                  to_string(config.pair->kind).c_str(), to_string(kind).c_str(),
                  crossover_estimate(report, kind));
    } catch (const std::runtime_error&) {
      std::printf("%s q=%d pair %s region %s: no 0.5 crossing in grid\n",
                  to_string(config.scheme).c_str(), config.q,
                  to_string(config.pair->kind).c_str(), to_string(kind).c_str());
    }
  }
}

std::vector<std::int64_t> log_grid(std::int64_t lo, std::int64_t hi, int points) {
  std::vector<std::int64_t> grid;
  for (int i = 0; i < points; ++i) {
    const double t = double(i) / double(points - 1);
    const auto n = std::int64_t(std::llround(double(lo) * std::pow(double(hi) / double(lo), t)));
    if (grid.empty() || n > grid.back()) grid.push_back(n);
  }
  return grid;
}

ExperimentConfig quantile_config(SchemeKind scheme, int q, std::vector<RegionKind> regions,
                                 const std::string& out) {
  ExperimentConfig c;
  c.protocol = Protocol::quantile;
  c.scheme = scheme;
  c.q = q;
  c.regions = std::move(regions);
  c.delta = 0.01;
  c.n_total = 60000;
  c.states = 5;
  c.ratio_samples = 2000;
  c.master_seed = 20260809;
  c.out = out;
  return c;
}

ExperimentConfig sweep_config(SchemeKind scheme, int q, std::vector<RegionKind> regions,
                              PairKind pair, std::vector<std::int64_t> grid,
                              const std::string& out) {
  ExperimentConfig c;
  c.protocol = Protocol::intersect_sweep;
  c.scheme = scheme;
  c.q = q;
  c.regions = std::move(regions);
  c.delta = 0.1;
  c.n_grid = std::move(grid);
  c.repetitions = q <= 2 ? 500 : (q == 3 ? 200 : 100);
  c.pair = PairSpec{pair, 0x5eed + std::uint64_t(q)};
  c.master_seed = 20260809;
  c.out = out;
  return c;
}

int run_reproduce(const std::string& target, const std::string& fig, const CommonFlags& flags) {
  const auto both_pairs = {PairKind::vs_mixed, PairKind::vs_rotated};
  if (target == "table1") {
    for (int q = 1; q <= 4; ++q) {
      auto c = quantile_config(SchemeKind::pauli, q, {RegionKind::A, RegionKind::C1, RegionKind::C2},
                               "table1_q" + std::to_string(q));
      apply_flags(c, flags);
      run_quantile_config(c);
    }
    return 0;
  }
  if (target == "tableE1") {
    for (int q = 1; q <= 4; ++q) {
      std::vector<RegionKind> regions = {RegionKind::C2};
      if (q == 1) regions.insert(regions.begin(), RegionKind::A);
      auto c = quantile_config(SchemeKind::local_sic, q, regions,
                               "tableE1_q" + std::to_string(q));
      apply_flags(c, flags);
      run_quantile_config(c);
    }
    return 0;
  }
  if (target == "fig") {
    if (fig == "2") {
      for (PairKind pair : both_pairs) {
        auto c = sweep_config(SchemeKind::pauli, 1,
                              {RegionKind::A, RegionKind::B, RegionKind::C2}, pair,
                              log_grid(60, 6000, 12), std::string("fig2_") + to_string(pair));
        apply_flags(c, flags);
        run_sweep_config(c);
      }
      return 0;
    }
    if (fig == "3") {
      for (PairKind pair : both_pairs) {
        auto c = sweep_config(SchemeKind::pauli, 3,
                              {RegionKind::A, RegionKind::B, RegionKind::C2}, pair,
                              log_grid(600, 60000, 12), std::string("fig3_") + to_string(pair));
        apply_flags(c, flags);
        run_sweep_config(c);
      }
      return 0;
    }
    if (fig == "4") {
      for (PairKind pair : both_pairs) {
        auto c = sweep_config(SchemeKind::pauli, 4,
                              {RegionKind::A, RegionKind::B, RegionKind::C2}, pair,
                              log_grid(2000, 200000, 12), std::string("fig4_") + to_string(pair));
        apply_flags(c, flags);
        run_sweep_config(c);
      }
      return 0;
    }
    if (fig == "E1") {
      for (int q = 1; q <= 3; ++q) {
        std::vector<RegionKind> regions = {RegionKind::B, RegionKind::C2};
        if (q == 1) regions.insert(regions.begin(), RegionKind::A);
        const std::int64_t lo = q == 1 ? 60 : (q == 2 ? 300 : 1000);
        const std::int64_t hi = q == 1 ? 6000 : (q == 2 ? 30000 : 100000);
        for (PairKind pair : both_pairs) {
          auto c = sweep_config(SchemeKind::local_sic, q, regions, pair, log_grid(lo, hi, 12),
                                "figE1_q" + std::to_string(q) + "_" + to_string(pair));
          apply_flags(c, flags);
          run_sweep_config(c);
        }
      }
      return 0;
    }
  }
  std::cerr << "unknown reproduce target; use table1, tableE1 or fig <2|3|4|E1>\n";
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Confidence-region benchmarks for quantum state tomography"};
  app.require_subcommand(1);

  CommonFlags flags;
  auto add_common = [&](CLI::App* cmd, bool with_config) {
    if (with_config)
      cmd->add_option("--config", flags.config_path, "JSON config file")->required();
    cmd->add_option("--scale", flags.scale, "multiplies repetitions/states");
    cmd->add_option("--threads", flags.threads, "worker threads");
    cmd->add_option("--seed", flags.seed, "overrides the master seed");
  };

  auto* quantile_cmd = app.add_subcommand("quantile", "tightness quantile experiment");
  add_common(quantile_cmd, true);
  auto* sweep_cmd = app.add_subcommand("sweep", "intersection-frequency sweep");
  add_common(sweep_cmd, true);
  auto* repro_cmd = app.add_subcommand("reproduce", "built-in table and figure runs");
  std::string target, fig;
  repro_cmd->add_option("target", target, "table1 | tableE1 | fig")->required();
  repro_cmd->add_option("figure", fig, "2 | 3 | 4 | E1");
  add_common(repro_cmd, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (quantile_cmd->parsed()) {
      ExperimentConfig config = ExperimentConfig::from_json_file(flags.config_path);
      if (config.protocol != Protocol::quantile)
        throw std::invalid_argument("config protocol is not quantile");
      apply_flags(config, flags);
      run_quantile_config(config);
      return 0;
    }
    if (sweep_cmd->parsed()) {
      ExperimentConfig config = ExperimentConfig::from_json_file(flags.config_path);
      if (config.protocol != Protocol::intersect_sweep)
        throw std::invalid_argument("config protocol is not intersect-sweep");
      apply_flags(config, flags);
      run_sweep_config(config);
      return 0;
    }
    return run_reproduce(target, fig, flags);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  }
}
