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

#ifndef TOMOCR_MEASUREMENT_HPP_
#define TOMOCR_MEASUREMENT_HPP_

#include <memory>
#include <string>
#include <vector>

#include "tomocr/linalg.hpp"
#include "tomocr/types.hpp"

namespace tomocr {

enum class SchemeKind { pauli, local_sic };

std::string to_string(SchemeKind kind);
SchemeKind scheme_kind_from_string(const std::string& s);

/// Per-setting outcome counts from one simulated tomography run.
struct FrequencyData {
  SchemeKind kind;
  int q = 0;
  std::int64_t n = 0;  // samples per setting
  std::int64_t N = 0;  // n * number of settings
  std::vector<IVec> counts;

  /// Concatenated per-setting frequencies counts/n, all outcomes.
  RVec frequencies_full() const;
  /// Same with the last outcome of each setting dropped.
  RVec frequencies_reduced() const;
  /// Single-POVM frequencies counts/N.
  RVec frequencies_povm() const;

  std::string to_json() const;
  static FrequencyData from_json(const std::string& text);
};

/// Linear map between Bloch coordinates and probability coordinates.
/// `traceless` is the map M of the scheme restricted to traceless Bloch
/// coordinates; `offset` is the probability vector of the trace part of a
/// unit-trace operator, so p(rho) = traceless * x_t + offset.
struct MeasurementMap {
  RMat full;       // rows x 4^q, includes the trace column
  RMat traceless;  // rows x (4^q - 1)
  RMat pinv;       // (4^q - 1) x rows, pseudo-inverse of `traceless`
  RVec offset;
  double mu = 0.0;  // smallest singular value of `traceless`
  // thin SVD of `traceless`, kept for the probability-ball projection
  RMat svd_u;
  RVec svd_s;
  RMat svd_v;
};

/// A tomographically complete measurement scheme: local Pauli bases or the
/// local SIC-POVM, together with the linear maps the confidence regions need.
struct MeasurementScheme {
  SchemeKind kind;
  int q = 0;
  Index dim = 0;
  Index num_settings = 0;
  Index outcomes_per_setting = 0;
  double povm_weight = 1.0;  // single-POVM effect = weight * setting effect

  std::vector<std::vector<CMat>> effects;  // per setting, sum to identity
  RMat effect_bloch;  // (settings*outcomes) x 4^q rows of tr(E mu_j)

  /// Reduced map: one dependent outcome dropped per setting.
  MeasurementMap reduced;
  /// Coordinates used by the Gaussian regions C1/C2: reduced per-setting
  /// coordinates for Pauli, all single-setting outcomes for the local SIC.
  MeasurementMap stat;

  /// Pseudo-inverse over all outcome rows; backs the least-squares estimator.
  MeasurementMap estimation;

  std::int64_t settings_count() const { return num_settings; }
  double sigma2_max(std::int64_t n) const;

  /// Born probabilities per setting, clipped to [0,1].
  std::vector<RVec> born_probabilities(const CMat& rho) const;
  /// Probability vector in the `stat` coordinates for a unit-trace operator.
  RVec stat_probabilities(const CMat& rho) const;

  /// Multinomial sampling, n shots per setting.
  FrequencyData sample_counts(const DensityMatrix& rho, std::int64_t n, RngStream& rng) const;
  FrequencyData sample_counts(const std::vector<RVec>& probs, std::int64_t n, RngStream& rng) const;
};

using SchemePtr = std::shared_ptr<const MeasurementScheme>;

SchemePtr build_pauli_scheme(int q);
SchemePtr build_local_sic_scheme(int q);
SchemePtr build_scheme(SchemeKind kind, int q);

/// Block-diagonal multinomial covariance of the reduced frequency vector.
struct CovarianceModel {
  std::vector<RMat> blocks;     // per setting, reduced outcomes, scaled by 1/n
  std::vector<RVec> probs;      // per setting, all outcomes
  Index rank = 0;               // k: outcomes with p > 1e-12, minus one, per setting
  double max_eigenvalue = 0.0;
  std::int64_t n = 0;
};

CovarianceModel covariance(const MeasurementScheme& scheme, const DensityMatrix& rho,
                           std::int64_t n);

}  // namespace tomocr

#endif  // TOMOCR_MEASUREMENT_HPP_
