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

#include <cmath>

namespace tomocr {

namespace {

RVec with_trace_component(const RVec& traceless, int q) {
  RVec out(traceless.size() + 1);
  out[0] = std::pow(2.0, -0.5 * q);
  out.tail(traceless.size()) = traceless;
  return out;
}

}  // namespace

RVec lsq_general_bloch(const MeasurementScheme& scheme, const FrequencyData& f) {
  if (f.kind != scheme.kind || f.q != scheme.q)
    throw std::invalid_argument("lsq_general: scheme and data are incompatible");
  RVec residual = f.frequencies_full() - scheme.estimation.offset;
  return with_trace_component(scheme.estimation.pinv * residual, scheme.q);
}

LsqEstimate lsq_general(const MeasurementScheme& scheme, const FrequencyData& f) {
  return {bloch_expand(lsq_general_bloch(scheme, f)), scheme.kind, f.N};
}

RVec lsq_pauli_analytic_bloch(int q, const FrequencyData& f) {
  if (f.kind != SchemeKind::pauli)
    throw std::invalid_argument("lsq_pauli_analytic: data is not from a Pauli scheme");
  const Index d = Index(1) << q;
  const Index num_settings = Index(std::llround(std::pow(3.0, q)));
  if (Index(f.counts.size()) != num_settings)
    throw std::invalid_argument("lsq_pauli_analytic: wrong setting count");

  // Per setting m, the Walsh transform of the outcome frequencies gives the
  // correlators phi^m_S = sum_o f_{m,o} prod_{k in S} o_k. The Bloch
  // coefficient of a Pauli string is the average of phi over the settings
  // that cover it.
  RVec coeff_sum = RVec::Zero(Index(1) << (2 * q));
  RVec walsh(d);
  for (Index set = 0; set < num_settings; ++set) {
    walsh = f.counts[set].cast<double>() / double(f.n);
    // in-place Walsh-Hadamard over outcome bits (+1 outcome first)
    for (int k = 0; k < q; ++k) {
      const Index stride = Index(1) << (q - 1 - k);
      for (Index base = 0; base < d; base += 2 * stride)
        for (Index off = 0; off < stride; ++off) {
          double a = walsh[base + off];
          double b = walsh[base + stride + off];
          walsh[base + off] = a + b;
          walsh[base + stride + off] = a - b;
        }
    }
    // setting digits: 0,1,2 -> x,y,z per qubit, most significant first
    std::vector<int> axes(q);
    Index rem = set;
    for (int k = q - 1; k >= 0; --k) {
      axes[k] = int(rem % 3) + 1;
      rem /= 3;
    }
    // scatter: subset S of qubits (bitmask over outcome bits) -> Pauli string
    for (Index mask = 0; mask < d; ++mask) {
      Index string = 0;
      for (int k = 0; k < q; ++k) {
        int digit = (mask >> (q - 1 - k)) & 1 ? axes[k] : 0;
        string = string * 4 + digit;
      }
      coeff_sum[string] += walsh[mask];
    }
  }
  RVec coords(coeff_sum.size());
  const double scale = std::pow(2.0, -0.5 * q);
  for (Index i = 0; i < coords.size(); ++i) {
    int weight = 0;
    for (Index rem = i; rem > 0; rem /= 4)
      if (rem % 4 != 0) ++weight;
    // a weight-w string is covered by 3^{q-w} settings
    coords[i] = scale * coeff_sum[i] / std::pow(3.0, q - weight);
  }
  return coords;
}

LsqEstimate lsq_pauli_analytic(int q, const FrequencyData& f) {
  return {bloch_expand(lsq_pauli_analytic_bloch(q, f)), SchemeKind::pauli,
          f.n * std::int64_t(f.counts.size())};
}

}  // namespace tomocr
