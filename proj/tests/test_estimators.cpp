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

#include "tomocr/estimators.hpp"

#include <doctest.h>

using namespace tomocr;

namespace {

// exact-frequency data: counts = p * n, valid when every p * n is integral
FrequencyData exact_data(const MeasurementScheme& scheme, const DensityMatrix& rho,
                         std::int64_t n) {
  FrequencyData f;
  f.kind = scheme.kind;
  f.q = scheme.q;
  f.n = n;
  f.N = n * scheme.num_settings;
  for (const RVec& p : scheme.born_probabilities(rho.matrix())) {
    IVec c(p.size());
    for (Index i = 0; i < p.size(); ++i) {
      const double scaled = p[i] * double(n);
      c[i] = std::int64_t(std::llround(scaled));
      REQUIRE(std::abs(scaled - double(c[i])) < 1e-9);
    }
    f.counts.push_back(std::move(c));
  }
  return f;
}

double povm_objective(const MeasurementScheme& scheme, const FrequencyData& f, const CMat& x) {
  double obj = 0.0;
  Index r = 0;
  const RVec ff = f.frequencies_full();
  for (const auto& setting : scheme.effects)
    for (const CMat& e : setting) {
      const double diff = ff[r++] - real_trace_product(e, x);
      obj += diff * diff;
    }
  return obj;
}

}  // namespace

TEST_CASE("exact data recovery") {
  RngStream rng(21, 0);
  for (SchemeKind kind : {SchemeKind::pauli, SchemeKind::local_sic}) {
    const SchemePtr s = build_scheme(kind, 1);
    // |0><0| has rational Born probabilities for both schemes
    CMat e00 = CMat::Zero(2, 2);
    e00(0, 0) = 1;
    const FrequencyData f = exact_data(*s, DensityMatrix(e00), 600);
    const LsqEstimate est = lsq_general(*s, f);
    CHECK((est.rho_hat - e00).cwiseAbs().maxCoeff() < 1e-9);

    const DensityMatrix mixed(0.5 * CMat::Identity(2, 2));
    const FrequencyData g = exact_data(*s, mixed, 600);
    CHECK((lsq_general(*s, g).rho_hat - mixed.matrix()).cwiseAbs().maxCoeff() < 1e-9);
  }
  // linear identity for arbitrary states: pinv(M_est) maps exact Born
  // frequencies back to the traceless Bloch coordinates
  for (int q : {1, 2, 3}) {
    const SchemePtr s = build_pauli_scheme(q);
    const DensityMatrix rho = haar_random_pure(s->dim, rng);
    RVec flat(s->num_settings * s->outcomes_per_setting);
    Index r = 0;
    for (const RVec& p : s->born_probabilities(rho.matrix()))
      for (Index o = 0; o < p.size(); ++o) flat[r++] = p[o];
    const RVec x = bloch_project(rho.matrix());
    const RVec xt = s->estimation.pinv * (flat - s->estimation.offset);
    CHECK((xt - x.tail(x.size() - 1)).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("analytic pauli estimator equals the direct formula") {
  RngStream rng(22, 0);
  for (int q : {1, 2}) {
    const SchemePtr s = build_pauli_scheme(q);
    const DensityMatrix rho = haar_random_pure(s->dim, rng);
    const FrequencyData f = s->sample_counts(rho, 300, rng);
    // direct evaluation of sum_{m,o} f_{m,o} tensor_j (3|w><w| - 1)
    CMat direct = CMat::Zero(s->dim, s->dim);
    const RVec fp = f.frequencies_povm();
    Index r = 0;
    for (Index set = 0; set < s->num_settings; ++set) {
      std::vector<int> axes(q);
      Index rem = set;
      for (int k = q - 1; k >= 0; --k) {
        axes[k] = int(rem % 3);
        rem /= 3;
      }
      for (Index o = 0; o < s->outcomes_per_setting; ++o) {
        CMat term = CMat::Identity(1, 1);
        for (int k = 0; k < q; ++k) {
          const int bit = int((o >> (q - 1 - k)) & 1);
          const CMat sigma = pauli_sigma(axes[k] + 1);
          const CMat proj = 0.5 * (CMat::Identity(2, 2) + (bit == 0 ? 1.0 : -1.0) * sigma);
          term = kron(term, CMat(3.0 * proj - CMat::Identity(2, 2))).eval();
        }
        direct += fp[r++] * term;
      }
    }
    const LsqEstimate est = lsq_pauli_analytic(q, f);
    CHECK((est.rho_hat - direct).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("analytic and pseudo-inverse estimators agree") {
  RngStream rng(23, 0);
  int tested = 0;
  for (int q : {1, 2, 3}) {
    const SchemePtr s = build_pauli_scheme(q);
    for (int rep = 0; rep < 34; ++rep) {
      const DensityMatrix rho = haar_random_pure(s->dim, rng);
      const FrequencyData f = s->sample_counts(rho, 200, rng);
      const LsqEstimate a = lsq_general(*s, f);
      const LsqEstimate b = lsq_pauli_analytic(q, f);
      CHECK((a.rho_hat - b.rho_hat).norm() < 1e-8);
      CHECK(std::abs(a.rho_hat.trace().real() - 1.0) < 1e-10);
      CHECK(hermiticity_defect(a.rho_hat) < 1e-12);
      ++tested;
    }
  }
  CHECK(tested >= 100);
}

TEST_CASE("local optimality of the least-squares solution") {
  RngStream rng(24, 0);
  const SchemePtr s = build_pauli_scheme(2);
  const DensityMatrix rho = haar_random_pure(4, rng);
  const FrequencyData f = s->sample_counts(rho, 150, rng);
  const LsqEstimate est = lsq_general(*s, f);
  const double base = povm_objective(*s, f, est.rho_hat);
  for (int rep = 0; rep < 100; ++rep) {
    // random unit-trace-preserving (traceless Hermitian) direction
    CMat delta(4, 4);
    for (Index i = 0; i < 4; ++i)
      for (Index j = 0; j < 4; ++j) delta(i, j) = Complex(rng.normal(), rng.normal());
    delta = 0.5 * (delta + delta.adjoint());
    delta -= (delta.trace() / 4.0) * CMat::Identity(4, 4);
    CHECK(base <= povm_objective(*s, f, est.rho_hat + 1e-4 * delta) + 1e-15);
  }
}

TEST_CASE("estimator is unbiased") {
  RngStream rng(25, 0);
  const SchemePtr s = build_pauli_scheme(1);
  const DensityMatrix rho = haar_random_pure(2, rng);
  const auto probs = s->born_probabilities(rho.matrix());
  const int reps = 10000;
  const std::int64_t n = 60;
  RVec mean = RVec::Zero(4);
  RVec m2 = RVec::Zero(4);
  for (int i = 0; i < reps; ++i) {
    const FrequencyData f = s->sample_counts(probs, n, rng);
    const RVec x = lsq_general_bloch(*s, f);
    mean += x;
    m2 += x.cwiseProduct(x);
  }
  mean /= double(reps);
  m2 /= double(reps);
  const RVec truth = bloch_project(rho.matrix());
  for (Index i = 0; i < 4; ++i) {
    const double se = std::sqrt(std::max(m2[i] - mean[i] * mean[i], 1e-30) / double(reps));
    CHECK(std::abs(mean[i] - truth[i]) <= 4.0 * se + 1e-12);
  }
}

TEST_CASE("estimator input validation") {
  RngStream rng(26, 0);
  const SchemePtr sic = build_local_sic_scheme(1);
  const FrequencyData f = sic->sample_counts(haar_random_pure(2, rng), 100, rng);
  CHECK_THROWS_AS(lsq_pauli_analytic(1, f), std::invalid_argument);
  const SchemePtr pauli2 = build_pauli_scheme(2);
  CHECK_THROWS_AS(lsq_general(*pauli2, f), std::invalid_argument);
}
