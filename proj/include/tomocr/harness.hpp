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

#ifndef TOMOCR_HARNESS_HPP_
#define TOMOCR_HARNESS_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tomocr/feasibility.hpp"
#include "tomocr/regions.hpp"

namespace tomocr {

enum class Protocol { quantile, intersect_sweep };
enum class PairKind { vs_mixed, vs_rotated };

std::string to_string(Protocol p);
std::string to_string(PairKind k);
PairKind pair_kind_from_string(const std::string& s);

struct PairSpec {
  PairKind kind = PairKind::vs_mixed;
  std::uint64_t seed = 0;
};

struct ExperimentConfig {
  Protocol protocol = Protocol::quantile;
  SchemeKind scheme = SchemeKind::pauli;
  int q = 1;
  std::vector<RegionKind> regions;
  double delta = 0.1;
  std::vector<std::int64_t> n_grid;  // sweep: total sample counts N
  std::int64_t n_total = 0;          // quantile: N per simulation
  int repetitions = 1;               // sweep: repetitions per grid point
  std::optional<PairSpec> pair;
  int states = 0;         // quantile: number of Haar-random target states
  int ratio_samples = 0;  // quantile: samples of r per state
  std::uint64_t master_seed = 0;
  std::string out;  // output path stem; writes <out>.csv and <out>.json
  int threads = 1;

  static ExperimentConfig from_json_text(const std::string& text);
  static ExperimentConfig from_json_file(const std::string& path);
  std::string to_json_text() const;
};

struct QuantileReport {
  ExperimentConfig config;
  // per region kind: per-state empirical (1-delta)-quantiles of r
  std::map<RegionKind, std::vector<double>> per_state;
  std::map<RegionKind, double> aggregate;  // mean of the per-state quantiles
  std::map<RegionKind, double> min_state;
  std::map<RegionKind, double> max_state;
  double runtime_seconds = 0.0;

  std::string to_csv() const;  // header: state_index,region,quantile
};

struct SweepRow {
  std::int64_t N = 0;
  RegionKind region = RegionKind::A;
  double frequency = 0.0;   // fraction of repetitions with intersecting regions
  double std_err = 0.0;     // binomial standard error
  int undecided = 0;        // solver verdicts counted as intersections
  int repetitions = 0;
};

struct SweepReport {
  ExperimentConfig config;
  std::vector<SweepRow> rows;  // ordered by region kind, then N ascending
  double runtime_seconds = 0.0;

  std::string to_csv() const;  // header: N,region,frequency,std_err,undecided,repetitions
  std::vector<SweepRow> rows_for(RegionKind kind) const;
};

/// The target-state pairs: rho1 = U^{(x) q} psi_q with U Haar on SU(2), and
/// rho2 either the maximally mixed state or exp(i theta Z)^{(x) q}-rotated
/// rho1 with overlap tr(rho1 rho2) = 0.63.
std::pair<DensityMatrix, DensityMatrix> target_state_pair(PairKind kind, int q, RngStream& rng);

/// The exemplary pure states: |+>, Bell, GHZ, and the 4-qubit cluster-type
/// state (|0000>+|0011>+|1100>-|1111>)/2.
CVec base_state(int q);

QuantileReport run_quantile_experiment(const ExperimentConfig& config);
SweepReport run_intersection_sweep(const ExperimentConfig& config);

/// Log-linear interpolation of the 50% point at the last downward crossing of
/// the frequency curve. Throws std::runtime_error when the curve never
/// crosses 0.5 inside the grid.
double crossover_estimate(const SweepReport& report, RegionKind kind);
double crossover_from_rows(const std::vector<SweepRow>& rows);

/// Writes report CSV and a JSON sidecar (config echo, versions, runtime).
void write_report_files(const std::string& out_stem, const std::string& csv,
                        const ExperimentConfig& config, double runtime_seconds);

/// Coarse 4-point scan followed by a 12-points-per-decade grid around the
/// bracketing interval; used when a sweep config carries no explicit grid.
std::vector<std::int64_t> pilot_n_grid(const ExperimentConfig& config, RegionKind kind);

}  // namespace tomocr

#endif  // TOMOCR_HARNESS_HPP_
