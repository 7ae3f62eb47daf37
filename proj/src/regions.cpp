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

#include "tomocr/regions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tomocr {

std::string to_string(RegionKind kind) {
  switch (kind) {
    case RegionKind::A: return "A";
    case RegionKind::B: return "B";
    case RegionKind::C1: return "C1";
    case RegionKind::C2: return "C2";
    case RegionKind::sphere: return "sphere";
  }
  return "?";
}

RegionKind region_kind_from_string(const std::string& s) {
  if (s == "A" || s == "a") return RegionKind::A;
  if (s == "B" || s == "b") return RegionKind::B;
  if (s == "C1" || s == "c1") return RegionKind::C1;
  if (s == "C2" || s == "c2") return RegionKind::C2;
  if (s == "sphere") return RegionKind::sphere;
  throw std::invalid_argument("unknown region kind: " + s);
}

namespace {

// Concentration factor g(d) in log R_d(xi) = -3/8 xi^2 g(d) + log d.
// Local Pauli bases: g = 3^{-q}. Single-qubit SIC: g = 1/(2d); no factor is
// known for local SIC-POVMs on two or more qubits.
double concentration_factor(int q, SchemeKind kind) {
  if (kind == SchemeKind::pauli) return std::pow(3.0, -q);
  if (q == 1) return 0.25;
  throw UnsupportedSchemeError(
      "region A: no concentration factor is known for local SIC-POVMs with q >= 2");
}

}  // namespace

double epsilon_A(std::int64_t N, int q, double delta, SchemeKind kind) {
  if (N < 1) throw std::invalid_argument("epsilon_A: N must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("epsilon_A: delta not in (0,1)");
  const double d = std::pow(2.0, q);
  const double g = concentration_factor(q, kind);
  const double eps2 = 8.0 * std::log(d / delta) / (3.0 * double(N) * g);
  if (eps2 > 1.0)
    throw InvalidRegimeError("epsilon_A: N = " + std::to_string(N) +
                             " is below the validity threshold (epsilon would exceed 1)");
  return std::sqrt(eps2);
}

std::int64_t region_A_min_samples(int q, double delta, SchemeKind kind) {
  const double d = std::pow(2.0, q);
  const double g = concentration_factor(q, kind);
  return std::int64_t(std::ceil(8.0 * std::log(d / delta) / (3.0 * g)));
}

bool RegionA::contains(const CMat& rho) const {
  return operator_norm(center - rho) <= epsilon;
}

RegionA build_region_A(const CMat& rho_hat, std::int64_t N, int q, double delta,
                       SchemeKind kind) {
  return {rho_hat, epsilon_A(N, q, delta, kind), q, delta, N};
}

double epsilon_B_facet(double f_i, double delta_i, std::int64_t N) {
  if (!(f_i >= 0.0 && f_i <= 1.0)) throw std::invalid_argument("epsilon_B_facet: f_i not in [0,1]");
  if (!(delta_i > 0.0 && delta_i < 1.0))
    throw std::invalid_argument("epsilon_B_facet: delta_i not in (0,1)");
  if (N < 1) throw std::invalid_argument("epsilon_B_facet: N must be >= 1");
  const double c = -std::log(delta_i) / double(N);
  if (f_i >= 1.0) return 0.0;  // all mass observed: vacuous bound 1
  if (f_i <= 0.0) return 1.0 - std::exp(-c);

  // D(f || 1-u) = f (log f - log1p(-u)) + (1-f) (log(1-f) - log u), monotone
  // decreasing in u. Bisect on t = log u so the root keeps full relative
  // precision even when it sits close to u = 0.
  const auto residual = [&](double t) {
    const double u = std::exp(t);
    return f_i * (std::log(f_i) - std::log1p(-u)) +
           (1.0 - f_i) * (std::log1p(-f_i) - t) - c;
  };
  double hi = std::log1p(-f_i);  // u = 1 - f_i, i.e. eps = 0, residual -c < 0
  double lo = std::log(std::numeric_limits<double>::min());
  if (residual(lo) < 0.0) return 1.0 - f_i;  // target above D(f || 1^-): bound 1
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (residual(mid) > 0.0) lo = mid;
    else hi = mid;
  }
  const double u = std::exp(0.5 * (lo + hi));
  return 1.0 - f_i - u;
}

bool RegionB::contains(const CMat& rho) const {
  const RVec x = bloch_project(rho);
  for (const RegionBFacet& facet : facets) {
    if (facet.trivial) continue;
    if (facet.effect_bloch.dot(x) > facet.bound) return false;
  }
  return true;
}

RegionB build_region_B(const MeasurementScheme& scheme, const FrequencyData& f, double delta) {
  if (f.kind != scheme.kind || f.q != scheme.q)
    throw std::invalid_argument("build_region_B: scheme and data are incompatible");
  RegionB region;
  region.delta = delta;
  region.N = f.N;
  region.q = scheme.q;
  region.scheme_kind = scheme.kind;
  const Index total = scheme.num_settings * scheme.outcomes_per_setting;
  const double delta_i = delta / double(total);
  const RVec f_povm = f.frequencies_povm();
  // every single-POVM effect is povm_weight times a tensor product of
  // rank-one factors, so its largest eigenvalue is just the weight
  const double lam_max = scheme.povm_weight;
  region.facets.reserve(total);
  for (Index i = 0; i < total; ++i) {
    RegionBFacet facet;
    facet.effect_bloch = scheme.povm_weight * scheme.effect_bloch.row(i).transpose();
    facet.effect_norm2 = facet.effect_bloch.squaredNorm();
    facet.effect_lambda_max = lam_max;
    facet.bound = f_povm[i] + epsilon_B_facet(f_povm[i], delta_i, f.N);
    facet.trivial = facet.bound >= 1.0;
    region.facets.push_back(std::move(facet));
  }
  return region;
}

double c1_statistic(const std::vector<RVec>& probs, const FrequencyData& f) {
  double stat2 = 0.0;
  for (std::size_t s = 0; s < probs.size(); ++s) {
    const RVec& p = probs[s];
    for (Index o = 0; o < p.size(); ++o) {
      const double fo = double(f.counts[s][o]) / double(f.n);
      if (p[o] <= 1e-12) {
        if (f.counts[s][o] > 0) return std::numeric_limits<double>::infinity();
        continue;
      }
      const double diff = p[o] - fo;
      stat2 += diff * diff / p[o];
    }
  }
  return std::sqrt(double(f.n) * stat2);
}

double RegionC1::statistic(const FrequencyData& f) const { return c1_statistic(probs, f); }

RegionC1 build_region_C1(const CovarianceModel& cov, double delta) {
  RegionC1 region;
  region.probs = cov.probs;
  region.k = cov.rank;
  region.n = cov.n;
  region.delta = delta;
  region.radius = std::sqrt(chi2_survival_inv(int(cov.rank), delta));
  return region;
}

double epsilon_C2(double delta, Index d, double sigma2_max) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("epsilon_C2: delta not in (0,1)");
  return std::sqrt(chi2_survival_inv(int(d * d - 1), delta) * sigma2_max);
}

bool RegionC2::contains(const CMat& rho) const {
  return (scheme->stat_probabilities(rho) - center).norm() <= epsilon;
}

RegionC2 build_region_C2(SchemePtr scheme, RVec p_hat, double epsilon) {
  RegionC2 region;
  region.d = scheme->dim;
  region.scheme = std::move(scheme);
  region.center = std::move(p_hat);
  region.epsilon = epsilon;
  region.sigma2_max = 0.0;
  return region;
}

double epsilon_sphere(double delta, Index d, double mu, double sigma2_max) {
  if (mu <= 0.0) throw std::invalid_argument("epsilon_sphere: mu must be positive");
  return epsilon_C2(delta, d, sigma2_max) / mu;
}

RegionSphere build_region_sphere(const CMat& rho_hat, double epsilon) {
  return {rho_hat, epsilon};
}

QuantileContext make_quantile_context(SchemePtr scheme, const DensityMatrix& rho,
                                      std::int64_t N_total, double delta) {
  QuantileContext ctx;
  ctx.rho = rho.matrix();
  ctx.rho_bloch = bloch_project(ctx.rho);
  ctx.n = N_total / scheme->num_settings;
  ctx.N = ctx.n * scheme->num_settings;
  ctx.delta = delta;
  ctx.probs = scheme->born_probabilities(ctx.rho);
  ctx.stat_p = scheme->stat_probabilities(ctx.rho);
  CovarianceModel cov = covariance(*scheme, rho, ctx.n);
  ctx.radius_c1 = std::sqrt(chi2_survival_inv(int(cov.rank), delta));
  ctx.k = cov.rank;
  ctx.eps_c2 = epsilon_C2(delta, scheme->dim, scheme->sigma2_max(ctx.n));
  try {
    ctx.eps_a = epsilon_A(ctx.N, scheme->q, delta, scheme->kind);
  } catch (const UnsupportedSchemeError&) {
    ctx.eps_a.reset();
  }
  ctx.scheme = std::move(scheme);
  return ctx;
}

double quantile_ratio(RegionKind kind, const QuantileContext& ctx, const FrequencyData& f) {
  switch (kind) {
    case RegionKind::A: {
      if (!ctx.eps_a)
        throw UnsupportedSchemeError("quantile_ratio: region A unsupported for this scheme");
      const RVec xhat = lsq_general_bloch(*ctx.scheme, f);
      return operator_norm(bloch_expand(xhat - ctx.rho_bloch)) / *ctx.eps_a;
    }
    case RegionKind::C1:
      return c1_statistic(ctx.probs, f) / ctx.radius_c1;
    case RegionKind::C2: {
      const RVec xhat = lsq_general_bloch(*ctx.scheme, f);
      const RVec p_hat = ctx.scheme->stat.traceless * xhat.tail(xhat.size() - 1) +
                         ctx.scheme->stat.offset;
      return (p_hat - ctx.stat_p).norm() / ctx.eps_c2;
    }
    default:
      throw std::invalid_argument("quantile_ratio: kind must be A, C1 or C2");
  }
}

double empirical_quantile(std::vector<double> samples, double delta) {
  if (samples.empty()) throw std::invalid_argument("empirical_quantile: no samples");
  std::sort(samples.begin(), samples.end());
  const std::size_t idx =
      std::size_t(std::ceil((1.0 - delta) * double(samples.size()))) - 1;
  return samples[std::min(idx, samples.size() - 1)];
}

}  // namespace tomocr
