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

#ifndef TOMOCR_SPECIAL_HPP_
#define TOMOCR_SPECIAL_HPP_

namespace tomocr {

/// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a).
/// Series expansion for x < a + 1, continued fraction otherwise.
double gamma_q(double a, double x);

/// Survival function of the central chi-square law with k degrees of freedom,
/// P_k(x) = Pr[chi2_k > x] = Q(k/2, x/2).
double chi2_survival(int k, double x);

/// Inverse survival: the value y with chi2_survival(k, y) = p, i.e. the
/// (1-p)-quantile of chi2_k. Bracketing bisection refined by Newton.
double chi2_survival_inv(int k, double p);

/// Relative binary entropy D(x||y) = x log(x/y) + (1-x) log((1-x)/(1-y)),
/// natural logarithm, with the continuity convention 0 log 0 = 0.
/// Returns +infinity when y is 0 or 1 while x differs from it.
double binary_relative_entropy(double x, double y);

}  // namespace tomocr

#endif  // TOMOCR_SPECIAL_HPP_
