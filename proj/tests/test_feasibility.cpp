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

#include "tomocr/feasibility.hpp"

#include <doctest.h>

#include "tomocr/estimators.hpp"

using namespace tomocr;

namespace {

CMat random_hermitian(Index d, RngStream& rng) {
  CMat a(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) a(i, j) = Complex(rng.normal(), rng.normal());
  return 0.5 * (a + a.adjoint());
}

Region simulate_region(const SchemePtr& scheme, const DensityMatrix& rho, std::int64_t n,
                       double delta, RegionKind kind, RngStream& rng) {
  const FrequencyData f = scheme->sample_counts(rho, n, rng);
  if (kind == RegionKind::A) {
    const RVec xhat = lsq_general_bloch(*scheme, f);
    return build_region_A(bloch_expand(xhat), f.N, scheme->q, delta, scheme->kind);
  }
  if (kind == RegionKind::B) return build_region_B(*scheme, f, delta);
  const RVec xhat = lsq_general_bloch(*scheme, f);
  const RVec p_hat =
      scheme->stat.traceless * xhat.tail(xhat.size() - 1) + scheme->stat.offset;
  return build_region_C2(scheme, p_hat,
                         epsilon_C2(delta, scheme->dim, scheme->sigma2_max(n)));
}

}  // namespace

TEST_CASE("state set projection") {
  RngStream rng(51, 0);
  // a density matrix projects to itself
  const DensityMatrix rho = haar_random_pure(4, rng);
  CHECK((project_state_set(rho.matrix()).matrix() - rho.matrix()).norm() < 1e-12);

  // diag(1.5, -0.5) -> diag(1, 0)
  CMat h = CMat::Zero(2, 2);
  h(0, 0) = 1.5;
  h(1, 1) = -0.5;
  const CMat proj = project_state_set(h).matrix();
  CHECK(proj(0, 0).real() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(proj(1, 1)) < 1e-12);

  // Frobenius optimality against random feasible candidates
  const CMat g = random_hermitian(2, rng);
  const CMat p = project_state_set(g).matrix();
  const double dist = (g - p).norm();
  for (int i = 0; i < 100000; ++i) {
    const CMat candidate = haar_random_pure(2, rng).matrix();
    CHECK((g - candidate).norm() >= dist - 1e-12);
  }

  // idempotence
  CHECK((project_state_set(p).matrix() - p).norm() < 1e-10);
}

TEST_CASE("opnorm ball projection") {
  RngStream rng(52, 0);
  const CMat center = haar_random_pure(2, rng).matrix();
  const double eps = 0.2;

  const CMat interior = center + 0.1 * pauli_sigma(1);
  CHECK((project_opnorm_ball(interior, center, eps) - interior).norm() < 1e-12);

  // center + 2 eps P projects to center + eps P for a projector P
  CMat p00 = CMat::Zero(2, 2);
  p00(0, 0) = 1;
  const CMat moved = project_opnorm_ball(center + 2.0 * eps * p00, center, eps);
  CHECK((moved - (center + eps * p00)).norm() < 1e-10);

  const CMat far = center + random_hermitian(2, rng);
  const CMat proj = project_opnorm_ball(far, center, eps);
  CHECK(operator_norm(proj - center) <= eps + 1e-10);
  CHECK((project_opnorm_ball(proj, center, eps) - proj).norm() < 1e-10);
}

TEST_CASE("probability ball projection") {
  RngStream rng(53, 0);
  const SchemePtr s = build_pauli_scheme(1);
  const DensityMatrix rho = haar_random_pure(2, rng);
  const RVec p_hat = s->stat_probabilities(rho.matrix());
  const double eps = 0.05;

  // interior point unchanged (up to the pinned trace coordinate)
  CHECK((project_prob_ball(rho.matrix(), *s, p_hat, eps) - rho.matrix()).norm() < 1e-12);

  // q=1 pauli: traceless block is a scaled isometry, so the projection is a
  // radial shrink in probability space
  const CMat h = rho.matrix() + 0.4 * pauli_sigma(1) + 0.3 * pauli_sigma(3);
  const CMat proj = project_prob_ball(h, *s, p_hat, eps);
  const RVec before = s->stat_probabilities(h);
  const RVec after = s->stat_probabilities(proj);
  const RVec expected = p_hat + (before - p_hat) * (eps / (before - p_hat).norm());
  CHECK((after - expected).cwiseAbs().maxCoeff() < 1e-9);

  // KKT: x* - h_t is antiparallel to M^T (M x* - b)
  const RVec xs = bloch_project(proj).tail(3);
  const RVec ht = bloch_project(h).tail(3);
  const RVec grad = s->stat.traceless.transpose() * (after - p_hat);
  const double lambda = (xs - ht).norm() / grad.norm();
  CHECK((xs - ht + lambda * grad).norm() < 1e-8);

  // idempotence
  CHECK((project_prob_ball(proj, *s, p_hat, eps) - proj).norm() < 1e-10);
}

TEST_CASE("halfspace projection") {
  RngStream rng(54, 0);
  const SchemePtr s = build_pauli_scheme(1);
  const CMat effect = s->povm_weight * s->effects[2][0];  // E_{z,+} / 3
  const CMat inside = 0.5 * identity_matrix(2);
  const double bound = real_trace_product(effect, inside) + 0.01;
  CHECK((project_halfspace(inside, effect, bound) - inside).norm() == 0.0);

  // violated by exactly ||E||_F^2: projection subtracts a unit multiple
  const CMat h = inside + effect * (bound - real_trace_product(effect, inside) +
                                    effect.squaredNorm()) /
                              effect.squaredNorm();
  const CMat proj = project_halfspace(h, effect, bound);
  CHECK((proj - (h - effect)).norm() < 1e-12);
  CHECK(real_trace_product(effect, proj) == doctest::Approx(bound).epsilon(1e-12));

  const CMat g = random_hermitian(2, rng);
  const CMat pg = project_halfspace(g, effect, 0.05);
  CHECK(real_trace_product(effect, pg) <= 0.05 + 1e-12);
  CHECK((project_halfspace(pg, effect, 0.05) - pg).norm() < 1e-10);
}

TEST_CASE("identical regions are feasible") {
  RngStream rng(55, 0);
  const SchemePtr s = build_pauli_scheme(1);
  const DensityMatrix rho = haar_random_pure(2, rng);
  for (RegionKind kind : {RegionKind::A, RegionKind::B, RegionKind::C2}) {
    RngStream data_rng(7, 7);
    const Region r = simulate_region(s, rho, 1000, 0.1, kind, data_rng);
    const FeasibilityVerdict verdict = decide_intersection(r, r);
    CHECK(verdict.status == FeasStatus::feasible);
    CHECK(verdict.max_violation < 1e-7);
    CHECK(verdict.witness.rows() == 2);
  }
}

TEST_CASE("well separated opnorm balls are infeasible") {
  CMat c1 = CMat::Zero(2, 2), c2 = CMat::Zero(2, 2);
  c1(0, 0) = 0.9;
  c1(1, 1) = 0.1;
  c2(0, 0) = 0.1;
  c2(1, 1) = 0.9;
  const RegionA r1{c1, 0.1, 1, 0.1, 1000};
  const RegionA r2{c2, 0.1, 1, 0.1, 1000};
  const FeasibilityVerdict verdict = decide_intersection(Region(r1), Region(r2));
  CHECK(verdict.status == FeasStatus::infeasible);
  CHECK(verdict.max_violation > 1e-6);
}

TEST_CASE("brute force oracle basics") {
  const SchemePtr s = build_pauli_scheme(1);
  CMat c = 0.5 * identity_matrix(2);
  const RegionA small1{c, 0.05, 1, 0.1, 1000};
  const RegionA small2{c + 0.01 * pauli_sigma(3), 0.05, 1, 0.1, 1000};
  CHECK(brute_force_intersect_1q(Region(small1), Region(small2), 200000));

  CMat far = c + 0.5 * pauli_sigma(3);
  const RegionA tiny1{c, 0.02, 1, 0.1, 1000};
  const RegionA tiny2{far, 0.02, 1, 0.1, 1000};
  CHECK(!brute_force_intersect_1q(Region(tiny1), Region(tiny2), 200000));
  CHECK(brute_force_margin_1q(Region(tiny1), Region(tiny2), 200000) > 0.0);
}

TEST_CASE("solver agrees with the brute force oracle") {
  RngStream rng(56, 0);
  const SchemePtr s = build_pauli_scheme(1);
  int agree = 0, total = 0, marginal = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const RegionKind kind =
        trial % 3 == 0 ? RegionKind::A : (trial % 3 == 1 ? RegionKind::B : RegionKind::C2);
    const double delta = trial % 2 == 0 ? 0.1 : 0.05;
    const std::int64_t n =
        std::int64_t(std::exp(rng.uniform() * (std::log(4000.0) - std::log(120.0)) +
                              std::log(120.0)));
    const DensityMatrix rho1 = haar_random_pure(2, rng);
    const DensityMatrix rho2 =
        trial % 4 == 0 ? DensityMatrix(0.5 * identity_matrix(2)) : haar_random_pure(2, rng);
    const Region r1 = simulate_region(s, rho1, n, delta, kind, rng);
    const Region r2 = simulate_region(s, rho2, n, delta, kind, rng);
    const FeasibilityVerdict verdict = decide_intersection(r1, r2);
    const double margin = brute_force_margin_1q(r1, r2, 400000);
    const bool bf = margin <= 0.0;
    const bool solver_isect = verdict.status != FeasStatus::infeasible;
    ++total;
    const bool is_marginal =
        verdict.status == FeasStatus::undecided ||
        (verdict.status == FeasStatus::infeasible &&
         std::abs(verdict.max_violation - 1e-6) < 1e-5) ||
        std::abs(margin) < 1e-4;
    if (is_marginal) {
      ++marginal;
      continue;
    }
    if (solver_isect == bf) ++agree;
    else
      MESSAGE("disagreement: kind=", to_string(kind), " n=", n, " verdict=",
              to_string(verdict.status), " margin=", margin);
  }
  CHECK(agree == total - marginal);
}

TEST_CASE("feasible witnesses satisfy every constraint") {
  RngStream rng(57, 0);
  const SchemePtr s = build_pauli_scheme(1);
  const DensityMatrix rho = haar_random_pure(2, rng);
  for (RegionKind kind : {RegionKind::A, RegionKind::B, RegionKind::C2}) {
    const Region r1 = simulate_region(s, rho, 400, 0.1, kind, rng);
    const Region r2 = simulate_region(s, rho, 400, 0.1, kind, rng);
    const FeasibilityVerdict verdict = decide_intersection(r1, r2);
    if (verdict.status != FeasStatus::feasible) continue;
    const CMat& w = verdict.witness;
    Eigen::SelfAdjointEigenSolver<CMat> es(w, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() > -1e-6);
    CHECK(std::abs(w.trace().real() - 1.0) < 1e-6);
    for (const Region* rr : {&r1, &r2}) {
      if (const auto* a = std::get_if<RegionA>(rr))
        CHECK(operator_norm(w - a->center) <= a->epsilon + 1e-6);
      if (const auto* b = std::get_if<RegionB>(rr))
        for (const RegionBFacet& facet : b->facets)
          CHECK(real_trace_product(bloch_expand(facet.effect_bloch), w) <=
                facet.bound + 1e-6);
      if (const auto* c = std::get_if<RegionC2>(rr))
        CHECK((c->scheme->stat_probabilities(w) - c->center).norm() <= c->epsilon + 1e-6);
    }
  }
}

TEST_CASE("infeasibility is monotone under region shrinkage") {
  RngStream rng(58, 0);
  const SchemePtr s = build_pauli_scheme(1);
  CMat zp = CMat::Zero(2, 2), zm = CMat::Zero(2, 2);
  zp(0, 0) = 1;
  zm(1, 1) = 1;
  // same frequencies rescaled to larger N: regions only shrink
  for (std::int64_t n : {600, 2400}) {
    RngStream data_rng(5, 5);
    const Region r1 = simulate_region(s, DensityMatrix(zp), n, 0.1, RegionKind::C2, data_rng);
    const Region r2 = simulate_region(s, DensityMatrix(zm), n, 0.1, RegionKind::C2, data_rng);
    const FeasibilityVerdict verdict = decide_intersection(r1, r2);
    CHECK(verdict.status == FeasStatus::infeasible);
  }
}
