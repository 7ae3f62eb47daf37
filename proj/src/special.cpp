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

#include "tomocr/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace tomocr {

namespace {

constexpr double kRelTol = 1e-14;
constexpr int kMaxIter = 500;

// Lower regularized gamma P(a, x) by power series, x < a + 1.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int i = 0; i < kMaxIter; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * kRelTol)
      return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  throw std::runtime_error("gamma_p_series: no convergence");
}

// Upper regularized gamma Q(a, x) by Lentz continued fraction, x >= a + 1.
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    double an = -double(i) * (double(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kRelTol)
      return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  throw std::runtime_error("gamma_q_cf: no convergence");
}

}  // namespace

double gamma_q(double a, double x) {
  if (a <= 0.0 || x < 0.0) throw std::invalid_argument("gamma_q: need a > 0, x >= 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double chi2_survival(int k, double x) {
  if (k < 1) throw std::invalid_argument("chi2_survival: k must be >= 1");
  if (x < 0.0) throw std::invalid_argument("chi2_survival: x must be >= 0");
  return gamma_q(0.5 * k, 0.5 * x);
}

double chi2_survival_inv(int k, double p) {
  if (k < 1) throw std::invalid_argument("chi2_survival_inv: k must be >= 1");
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("chi2_survival_inv: p must be in (0,1)");
  // bracket: survival is strictly decreasing from 1 at x=0
  double lo = 0.0;
  double hi = std::max(4.0 * k, 16.0);
  while (chi2_survival(k, hi) > p) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (chi2_survival(k, mid) > p) lo = mid;
    else hi = mid;
    if (hi - lo < 1e-13 * std::max(1.0, hi)) break;
  }
  double x = 0.5 * (lo + hi);
  // Newton polish on log survival; density = x^{k/2-1} e^{-x/2} / (2^{k/2} Gamma(k/2))
  for (int i = 0; i < 8; ++i) {
    double s = chi2_survival(k, x);
    double log_pdf = (0.5 * k - 1.0) * std::log(x) - 0.5 * x -
                     0.5 * k * std::log(2.0) - std::lgamma(0.5 * k);
    double step = (s - p) / std::exp(log_pdf);
    double next = x + step;
    if (!(next > lo && next < hi)) break;
    x = next;
    if (std::abs(step) < 1e-14 * std::max(1.0, x)) break;
  }
  return x;
}

double binary_relative_entropy(double x, double y) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("binary_relative_entropy: x not in [0,1]");
  if (!(y >= 0.0 && y <= 1.0)) throw std::invalid_argument("binary_relative_entropy: y not in [0,1]");
  if (y <= 0.0) return x == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  if (y >= 1.0) return x == 1.0 ? 0.0 : std::numeric_limits<double>::infinity();
  double out = 0.0;
  if (x > 0.0) out += x * std::log(x / y);
  if (x < 1.0) out += (1.0 - x) * std::log((1.0 - x) / (1.0 - y));
  return out;
}

}  // namespace tomocr
