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

#ifndef TOMOCR_REGIONS_HPP_
#define TOMOCR_REGIONS_HPP_

#include <optional>
#include <string>
#include <vector>

#include "tomocr/estimators.hpp"
#include "tomocr/measurement.hpp"
#include "tomocr/special.hpp"

namespace tomocr {

enum class RegionKind { A, B, C1, C2, sphere };
std::string to_string(RegionKind kind);
RegionKind region_kind_from_string(const std::string& s);

/// Thrown when a region formula is evaluated outside its validity regime,
/// e.g. region A with too few samples for epsilon <= 1.
class InvalidRegimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when a region is requested for a measurement scheme it does not
/// support, e.g. region A for multiqubit local SIC-POVMs.
class UnsupportedSchemeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Region A: operator-norm ball around the free least-squares estimate.
// ---------------------------------------------------------------------------

/// Radius of region A. Throws InvalidRegimeError when N is too small for
/// epsilon <= 1 and UnsupportedSchemeError for local SIC with q >= 2, where
/// no concentration factor is known.
double epsilon_A(std::int64_t N, int q, double delta, SchemeKind kind);

/// Smallest N for which epsilon_A is valid (epsilon <= 1).
std::int64_t region_A_min_samples(int q, double delta, SchemeKind kind);

struct RegionA {
  CMat center;  // rho_hat
  double epsilon = 0.0;
  int q = 0;
  double delta = 0.0;
  std::int64_t N = 0;

  bool contains(const CMat& rho) const;
};

RegionA build_region_A(const CMat& rho_hat, std::int64_t N, int q, double delta,
                       SchemeKind kind = SchemeKind::pauli);

// ---------------------------------------------------------------------------
// Region B: polytope of per-outcome upper confidence bounds.
// ---------------------------------------------------------------------------

/// Positive root of D(f_i || f_i + eps_i) = -log(delta_i)/N in eps_i.
/// Closed form 1 - exp(log(delta_i)/N) at f_i = 0; returns 1 - f_i (a vacuous
/// bound of 1) when no root below 1 is representable.
double epsilon_B_facet(double f_i, double delta_i, std::int64_t N);

struct RegionBFacet {
  RVec effect_bloch;   // Bloch row of the single-POVM effect
  double bound = 1.0;  // f_i + eps_i
  double effect_norm2 = 0.0;
  double effect_lambda_max = 0.0;
  bool trivial = false;  // bound >= 1: never active
};

struct RegionB {
  std::vector<RegionBFacet> facets;
  double delta = 0.0;
  std::int64_t N = 0;
  int q = 0;
  SchemeKind scheme_kind = SchemeKind::pauli;

  bool contains(const CMat& rho) const;
};

RegionB build_region_B(const MeasurementScheme& scheme, const FrequencyData& f, double delta);

// ---------------------------------------------------------------------------
// Region C1: exact Gaussian region from the state-dependent covariance.
// ---------------------------------------------------------------------------

struct RegionC1 {
  std::vector<RVec> probs;  // Born probabilities of the reference state
  Index k = 0;              // rank of the covariance
  double radius = 0.0;      // sqrt of the (1-delta) chi-square quantile
  std::int64_t n = 0;
  double delta = 0.0;

  /// Mahalanobis norm of (f - p), computed as sqrt(n sum_i (p_i-f_i)^2/p_i)
  /// over all outcomes of every setting. +infinity if an outcome with zero
  /// probability was observed.
  double statistic(const FrequencyData& f) const;
  bool contains(const FrequencyData& f) const { return statistic(f) <= radius; }
};

double c1_statistic(const std::vector<RVec>& probs, const FrequencyData& f);
RegionC1 build_region_C1(const CovarianceModel& cov, double delta);

// ---------------------------------------------------------------------------
// Region C2: ball in probability space around p(rho_hat), and its state-space
// sphere relaxation.
// ---------------------------------------------------------------------------

double epsilon_C2(double delta, Index d, double sigma2_max);

struct RegionC2 {
  SchemePtr scheme;
  RVec center;  // p(rho_hat) in the scheme's stat coordinates
  double epsilon = 0.0;
  double sigma2_max = 0.0;
  Index d = 0;

  bool contains(const CMat& rho) const;
};

RegionC2 build_region_C2(SchemePtr scheme, RVec p_hat, double epsilon);

double epsilon_sphere(double delta, Index d, double mu, double sigma2_max);

struct RegionSphere {
  CMat center;  // rho_hat
  double epsilon = 0.0;

  bool contains(const CMat& rho) const {
    return (rho - center).norm() <= epsilon;
  }
};

RegionSphere build_region_sphere(const CMat& rho_hat, double epsilon);

// ---------------------------------------------------------------------------
// Tightness ratio r = (observed norm) / epsilon(delta), Eq.-style quantile
// test inputs precomputed per (scheme, true state, sample budget).
// ---------------------------------------------------------------------------

struct QuantileContext {
  SchemePtr scheme;
  CMat rho;
  RVec rho_bloch;
  std::int64_t n = 0;  // per setting
  std::int64_t N = 0;
  double delta = 0.0;
  std::vector<RVec> probs;
  RVec stat_p;                  // p(rho) in stat coordinates
  double radius_c1 = 0.0;
  Index k = 0;
  double eps_c2 = 0.0;
  std::optional<double> eps_a;  // absent when region A is unsupported
};

QuantileContext make_quantile_context(SchemePtr scheme, const DensityMatrix& rho,
                                      std::int64_t N_total, double delta);

/// r for one simulated dataset; kind must be A, C1 or C2 (region B is not
/// norm-based). Throws UnsupportedSchemeError for A when eps_a is absent.
double quantile_ratio(RegionKind kind, const QuantileContext& ctx, const FrequencyData& f);

/// Empirical (1-delta)-quantile: order statistic ceil((1-delta) S) of S sorted samples.
double empirical_quantile(std::vector<double> samples, double delta);

}  // namespace tomocr

#endif  // TOMOCR_REGIONS_HPP_
