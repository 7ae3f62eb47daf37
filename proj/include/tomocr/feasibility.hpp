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

#ifndef TOMOCR_FEASIBILITY_HPP_
#define TOMOCR_FEASIBILITY_HPP_

#include <variant>

#include "tomocr/regions.hpp"

namespace tomocr {

/// Frobenius-nearest density matrix: eigendecomposition plus projection of
/// the spectrum onto the probability simplex.
DensityMatrix project_state_set(const CMat& h);

/// Eigenvalues of (h - center) clipped to [-epsilon, epsilon].
CMat project_opnorm_ball(const CMat& h, const CMat& center, double epsilon);

/// Frobenius-nearest unit-trace Hermitian with ||p(x) - p_hat|| <= epsilon in
/// the scheme's stat coordinates; 1-D dual secular equation in the Lagrange
/// multiplier.
CMat project_prob_ball(const CMat& h, const MeasurementScheme& scheme, const RVec& p_hat,
                       double epsilon);

/// Projection onto {x : tr(effect x) <= bound}.
CMat project_halfspace(const CMat& h, const CMat& effect, double bound);

enum class FeasStatus { feasible, infeasible, undecided };
std::string to_string(FeasStatus s);

struct FeasibilityVerdict {
  FeasStatus status = FeasStatus::undecided;
  CMat witness;  // near-physical state meeting every constraint, when feasible
  double max_violation = 0.0;
  int iterations = 0;
};

struct FeasibilityOptions {
  double feas_tol = 1e-7;
  double sep_tol = 1e-6;
  int max_iterations = 20000;
  int plateau_window = 50;
  double plateau_rel_tol = 1e-9;
};

using Region = std::variant<RegionA, RegionB, RegionC2>;

/// Does a physical state lie in both regions? Dykstra-corrected cyclic
/// projections over the state set and both regions' constraint sets.
/// Verdicts: feasible when every violation drops below feas_tol; infeasible
/// when the max-violation plateaus above sep_tol; undecided at the iteration
/// cap. Undecided is surfaced, never coerced.
FeasibilityVerdict decide_intersection(const Region& r1, const Region& r2,
                                       const FeasibilityOptions& options = {});

/// Exhaustive 1-qubit oracle: low-discrepancy sampling of the Bloch ball,
/// true iff some sampled state lies in both regions. `samples` counts points
/// inside the ball.
bool brute_force_intersect_1q(const Region& r1, const Region& r2,
                              std::int64_t samples = 1'000'000);

/// Signed margin of a 1-qubit instance over the sampled ball: positive values
/// are the smallest joint violation when no sampled state fits both regions,
/// negative values are minus the best joint slack when one does. Near-zero
/// margins mark instances too close to the boundary to adjudicate.
double brute_force_margin_1q(const Region& r1, const Region& r2,
                             std::int64_t samples = 1'000'000);

}  // namespace tomocr

#endif  // TOMOCR_FEASIBILITY_HPP_
