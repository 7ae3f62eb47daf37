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

#ifndef TOMOCR_ESTIMATORS_HPP_
#define TOMOCR_ESTIMATORS_HPP_

#include "tomocr/measurement.hpp"

namespace tomocr {

/// Free least-squares point estimate: unit-trace Hermitian, not necessarily
/// positive semidefinite.
struct LsqEstimate {
  CMat rho_hat;
  SchemeKind scheme_kind;
  std::int64_t N = 0;
};

/// Minimizer of sum_i (f_i - tr(E_i X))^2 over unit-trace Hermitian X, where
/// the sum runs over every outcome of the scheme's single-POVM view.
LsqEstimate lsq_general(const MeasurementScheme& scheme, const FrequencyData& f);

/// Same estimate in Bloch coordinates, without forming the matrix.
RVec lsq_general_bloch(const MeasurementScheme& scheme, const FrequencyData& f);

/// Analytic form of the free least-squares solution for local Pauli-basis
/// data, sum_{m,o} f_{m,o} tensor_j (3|w><w| - 1). Agrees with lsq_general.
LsqEstimate lsq_pauli_analytic(int q, const FrequencyData& f);
RVec lsq_pauli_analytic_bloch(int q, const FrequencyData& f);

}  // namespace tomocr

#endif  // TOMOCR_ESTIMATORS_HPP_
