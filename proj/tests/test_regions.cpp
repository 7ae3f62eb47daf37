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

#include <doctest.h>

#include "tomocr/feasibility.hpp"

using namespace tomocr;

namespace {

FrequencyData exact_data(const MeasurementScheme& scheme, const CMat& rho, std::int64_t n) {
  FrequencyData f;
  f.kind = scheme.kind;
  f.q = scheme.q;
  f.n = n;
  f.N = n * scheme.num_settings;
  for (const RVec& p : scheme.born_probabilities(rho)) {
    IVec c(p.size());
    for (Index i = 0; i < p.size(); ++i) c[i] = std::int64_t(std::llround(p[i] * double(n)));
    f.counts.push_back(std::move(c));
  }
  return f;
}

DensityMatrix random_full_rank_state(Index d, RngStream& rng) {
  const CMat pure = haar_random_pure(d, rng).matrix();
  return DensityMatrix(0.7 * pure + 0.3 * CMat::Identity(d, d) / double(d));
}

}  // namespace

TEST_CASE("epsilon_A validity thresholds are exact") {
  const std::int64_t thresholds[] = {43, 144, 482, 1594};
  for (int q = 1; q <= 4; ++q) {
    const std::int64_t t = thresholds[q - 1];
    CHECK(region_A_min_samples(q, 0.01, SchemeKind::pauli) == t);
    CHECK_THROWS_AS(epsilon_A(t - 1, q, 0.01, SchemeKind::pauli), InvalidRegimeError);
    CHECK(epsilon_A(t, q, 0.01, SchemeKind::pauli) <= 1.0);
  }
}

TEST_CASE("epsilon_A values and scaling") {
  CHECK(epsilon_A(1000, 1, 0.01, SchemeKind::pauli) ==
        doctest::Approx(0.2058799138633594).epsilon(1e-12));
  // 1/sqrt(N) homogeneity
  const double e1 = epsilon_A(1000, 2, 0.05, SchemeKind::pauli);
  const double e4 = epsilon_A(4000, 2, 0.05, SchemeKind::pauli);
  CHECK(e4 == doctest::Approx(e1 / 2.0).epsilon(1e-14));
  // single-qubit SIC is supported, multiqubit is not
  CHECK(epsilon_A(60000, 1, 0.01, SchemeKind::local_sic) > 0.0);
  CHECK_THROWS_AS(epsilon_A(60000, 2, 0.01, SchemeKind::local_sic), UnsupportedSchemeError);
}

TEST_CASE("region A membership") {
  RngStream rng(31, 0);
  const CMat rho_hat = haar_random_pure(2, rng).matrix();
  const RegionA region = build_region_A(rho_hat, 1000, 1, 0.01);
  CHECK(region.contains(rho_hat));
  // state at operator distance just past epsilon
  CMat direction = pauli_sigma(3);
  const CMat outside = rho_hat + (region.epsilon + 1e-6) * direction;
  CHECK(!region.contains(outside));
  const CMat inside = rho_hat + (region.epsilon - 1e-6) * direction;
  CHECK(region.contains(inside));
}

TEST_CASE("epsilon_B_facet") {
  // closed form at f = 0
  CHECK(epsilon_B_facet(0.0, 0.01, 100) ==
        doctest::Approx(0.045007413978564004).epsilon(1e-12));
  // monotone decreasing in N
  double prev = 1.0;
  for (std::int64_t N : {10, 100, 1000, 10000}) {
    const double e = epsilon_B_facet(0.3, 0.01, N);
    CHECK(e < prev);
    prev = e;
  }
  // defining equation residual < 1e-10 across the domain; evaluated through
  // u = (1-f) - eps so the bound staying close to 1 does not lose precision
  const auto stable_entropy = [](double f, double eps) {
    const double u = (1.0 - f) - eps;
    return f * (std::log(f) - std::log1p(-u)) +
           (1.0 - f) * (std::log1p(-f) - std::log(u));
  };
  for (double f : {1e-6, 0.01, 0.2, 0.5, 0.9, 0.999}) {
    for (double delta_i : {1e-8, 1e-4, 0.05}) {
      for (std::int64_t N : {std::int64_t(10), std::int64_t(1000), std::int64_t(100000)}) {
        const double eps = epsilon_B_facet(f, delta_i, N);
        CHECK(eps > 0.0);
        CHECK(f + eps <= 1.0);
        if (f + eps < 1.0) {
          const double resid = stable_entropy(f, eps) + std::log(delta_i) / double(N);
          CHECK(std::abs(resid) < 1e-10);
          if (f + eps < 0.99)
            CHECK(binary_relative_entropy(f, f + eps) ==
                  doctest::Approx(stable_entropy(f, eps)).epsilon(1e-10));
        }
      }
    }
  }
  // all mass observed: vacuous facet
  CHECK(epsilon_B_facet(1.0, 0.01, 100) == 0.0);
}

TEST_CASE("region B from exact frequencies contains the state") {
  RngStream rng(32, 0);
  for (int q : {1, 2}) {
    const SchemePtr s = build_pauli_scheme(q);
    const DensityMatrix rho = random_full_rank_state(s->dim, rng);
    // exact frequencies: f_i = tr(E_i rho) < f_i + eps_i, so rho is inside
    const std::int64_t n = 1 << 16;
    const FrequencyData f = exact_data(*s, rho.matrix(), n);
    const RegionB region = build_region_B(*s, f, 0.1);
    CHECK(Index(region.facets.size()) ==
          Index(std::llround(std::pow(6.0, q))));  // 6^q facets
    CHECK(region.contains(rho.matrix()));
  }
  const SchemePtr sic = build_local_sic_scheme(2);
  const DensityMatrix rho = random_full_rank_state(4, rng);
  const FrequencyData f = sic->sample_counts(rho, 4000, rng);
  const RegionB region = build_region_B(*sic, f, 0.1);
  CHECK(region.facets.size() == 16);
}

TEST_CASE("c1 statistic") {
  RngStream rng(33, 0);
  const SchemePtr s = build_pauli_scheme(1);
  // dyadic probabilities (0.95/0.05 and 0.5/0.5) so exact counts exist at n = 2000
  CMat e00 = CMat::Zero(2, 2);
  e00(0, 0) = 1;
  const DensityMatrix rho(0.9 * e00 + 0.1 * CMat::Identity(2, 2) / 2.0);
  const std::int64_t n = 2000;
  const CovarianceModel cov = covariance(*s, rho, n);
  const RegionC1 region = build_region_C1(cov, 0.1);
  CHECK(region.k == 3);
  CHECK(region.radius == doctest::Approx(std::sqrt(6.2513886311703235)).epsilon(1e-9));

  // exact data: statistic 0
  const FrequencyData exact = exact_data(*s, rho.matrix(), n);
  CHECK(region.statistic(exact) < 1e-9);
  CHECK(region.contains(exact));

  // two-formula cross-check: all-outcomes form vs reduced Mahalanobis form
  for (int q : {1, 2}) {
    const SchemePtr sq = build_pauli_scheme(q);
    for (int rep = 0; rep < 20; ++rep) {
      const DensityMatrix state = random_full_rank_state(sq->dim, rng);
      const CovarianceModel cq = covariance(*sq, state, 300);
      const FrequencyData f = sq->sample_counts(state, 300, rng);
      const double direct = c1_statistic(cq.probs, f);
      double mahal2 = 0.0;
      const RVec fr = f.frequencies_reduced();
      Index offset = 0;
      for (std::size_t set = 0; set < cq.blocks.size(); ++set) {
        const Index m = cq.blocks[set].rows();
        const RVec diff =
            fr.segment(offset, m) - cq.probs[set].head(m);
        mahal2 += diff.dot(cq.blocks[set].ldlt().solve(diff));
        offset += m;
      }
      CHECK(direct == doctest::Approx(std::sqrt(mahal2)).epsilon(1e-8));
    }
  }

  // zero-probability outcome with observed count: +infinity
  const CovarianceModel cov0 = covariance(*s, DensityMatrix(e00), 100);
  const RegionC1 region0 = build_region_C1(cov0, 0.1);
  FrequencyData bad = exact_data(*s, e00, 100);
  bad.counts[2][1] = 1;  // impossible outcome observed
  bad.counts[2][0] = 99;
  CHECK(std::isinf(region0.statistic(bad)));
}

TEST_CASE("epsilon_C2 and the sphere relaxation") {
  CHECK(epsilon_C2(0.1, 2, 1.0 / 2000.0) ==
        doctest::Approx(0.05590790923997393).epsilon(1e-12));
  // local-sic variant: sigma2 = 2^{-q}/n
  const SchemePtr sic = build_local_sic_scheme(2);
  const double eps = epsilon_C2(0.1, 4, sic->sigma2_max(1000));
  CHECK(eps == doctest::Approx(std::sqrt(chi2_survival_inv(15, 0.1) * 2.5e-4)).epsilon(1e-12));
  // eps_sphere = eps_C2 / mu by construction
  const double mu = 0.4;
  CHECK(epsilon_sphere(0.1, 4, mu, 2.5e-4) == doctest::Approx(eps / mu).epsilon(1e-12));
}

TEST_CASE("region C2 contains the truth on exact data and sphere contains C2") {
  RngStream rng(34, 0);
  const SchemePtr s = build_pauli_scheme(2);
  const DensityMatrix rho = random_full_rank_state(4, rng);
  const std::int64_t n = 500;
  const FrequencyData f = s->sample_counts(rho, n, rng);
  const RVec xhat = lsq_general_bloch(*s, f);
  const RVec p_hat = s->stat.traceless * xhat.tail(xhat.size() - 1) + s->stat.offset;
  const double eps = epsilon_C2(0.1, s->dim, s->sigma2_max(n));
  const RegionC2 c2 = build_region_C2(s, p_hat, eps);
  const RegionSphere sphere =
      build_region_sphere(bloch_expand(xhat), epsilon_sphere(0.1, s->dim, s->stat.mu,
                                                             s->sigma2_max(n)));

  // the exact-probability center state is inside its own region
  const RegionC2 at_truth = build_region_C2(s, s->stat_probabilities(rho.matrix()), eps);
  CHECK(at_truth.contains(rho.matrix()));

  // membership implication C2 => sphere on sampled states
  int inside_c2 = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    CMat probe = haar_random_pure(4, rng).matrix();
    // blend toward the center estimate to populate the boundary region
    const double t = rng.uniform();
    probe = t * probe + (1.0 - t) * project_state_set(bloch_expand(xhat)).matrix();
    if (c2.contains(probe)) {
      ++inside_c2;
      CHECK(sphere.contains(probe));
    }
  }
  CHECK(inside_c2 > 0);

  // the sphere is strictly looser: a state along a stiff direction of M sits
  // inside the sphere but outside C2
  Eigen::BDCSVD<RMat> svd(s->stat.traceless, Eigen::ComputeThinV);
  const RVec stiff = svd.matrixV().col(0);  // largest singular value direction
  CHECK(svd.singularValues()[0] > s->stat.mu * 1.01);
  RVec witness_coords = xhat;
  witness_coords.tail(xhat.size() - 1) += 0.99 * sphere.epsilon * stiff;
  const CMat witness = bloch_expand(witness_coords);
  CHECK(sphere.contains(witness));
  CHECK(!c2.contains(witness));
}

TEST_CASE("radius monotonicity in N and delta") {
  double prev_a = 2.0, prev_b = 2.0, prev_c = 2.0;
  for (std::int64_t N : {300, 1000, 3000, 10000}) {
    const double ea = epsilon_A(N, 1, 0.05, SchemeKind::pauli);
    const double eb = epsilon_B_facet(0.4, 0.01, N);
    const double ec = epsilon_C2(0.05, 2, 0.5 / double(N / 3));
    CHECK(ea < prev_a);
    CHECK(eb < prev_b);
    CHECK(ec < prev_c);
    prev_a = ea;
    prev_b = eb;
    prev_c = ec;
  }
  prev_a = prev_b = prev_c = 2.0;
  for (double delta : {0.01, 0.05, 0.1, 0.5}) {
    const double ea = epsilon_A(1000, 1, delta, SchemeKind::pauli);
    const double eb = epsilon_B_facet(0.4, delta, 1000);
    const double ec = epsilon_C2(delta, 2, 0.5 / 1000.0);
    CHECK(ea < prev_a);
    CHECK(eb < prev_b);
    CHECK(ec < prev_c);
    prev_a = ea;
    prev_b = eb;
    prev_c = ec;
  }
}

TEST_CASE("quantile ratio on exact data") {
  RngStream rng(35, 0);
  for (SchemeKind kind : {SchemeKind::pauli, SchemeKind::local_sic}) {
    const SchemePtr s = build_scheme(kind, 1);
    CMat e00 = CMat::Zero(2, 2);
    e00(0, 0) = 1;
    // mix slightly for a full-rank covariance
    const DensityMatrix rho(0.9 * e00 + 0.1 * CMat::Identity(2, 2) / 2.0);
    const std::int64_t N_total = 60000;
    const QuantileContext ctx = make_quantile_context(s, rho, N_total, 0.01);
    const FrequencyData f = exact_data(*s, rho.matrix(), ctx.n);
    CHECK(quantile_ratio(RegionKind::A, ctx, f) < 1e-6);
    CHECK(quantile_ratio(RegionKind::C2, ctx, f) < 1e-6);
    CHECK(quantile_ratio(RegionKind::C1, ctx, f) < 1e-6);
    CHECK_THROWS_AS(quantile_ratio(RegionKind::B, ctx, f), std::invalid_argument);
  }
}

TEST_CASE("empirical quantile order statistic") {
  std::vector<double> samples;
  for (int i = 1; i <= 100; ++i) samples.push_back(double(i));
  CHECK(empirical_quantile(samples, 0.1) == 90.0);
  CHECK(empirical_quantile(samples, 0.01) == 99.0);
  CHECK(empirical_quantile({3.0}, 0.5) == 3.0);
}
