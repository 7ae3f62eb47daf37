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

#include "tomocr/measurement.hpp"

#include <cmath>

#include <json.hpp>

namespace tomocr {

std::string to_string(SchemeKind kind) {
  return kind == SchemeKind::pauli ? "pauli" : "local-sic";
}

SchemeKind scheme_kind_from_string(const std::string& s) {
  if (s == "pauli") return SchemeKind::pauli;
  if (s == "local-sic" || s == "local_sic" || s == "sic") return SchemeKind::local_sic;
  throw std::invalid_argument("unknown scheme kind: " + s);
}

RVec FrequencyData::frequencies_full() const {
  const Index per = counts.empty() ? 0 : counts.front().size();
  RVec out(Index(counts.size()) * per);
  for (Index s = 0; s < Index(counts.size()); ++s)
    out.segment(s * per, per) = counts[s].cast<double>() / double(n);
  return out;
}

RVec FrequencyData::frequencies_reduced() const {
  const Index per = counts.empty() ? 0 : counts.front().size();
  RVec out(Index(counts.size()) * (per - 1));
  for (Index s = 0; s < Index(counts.size()); ++s)
    out.segment(s * (per - 1), per - 1) = counts[s].head(per - 1).cast<double>() / double(n);
  return out;
}

RVec FrequencyData::frequencies_povm() const {
  const Index per = counts.empty() ? 0 : counts.front().size();
  RVec out(Index(counts.size()) * per);
  for (Index s = 0; s < Index(counts.size()); ++s)
    out.segment(s * per, per) = counts[s].cast<double>() / double(N);
  return out;
}

std::string FrequencyData::to_json() const {
  nlohmann::json j;
  j["kind"] = to_string(kind);
  j["q"] = q;
  j["n"] = n;
  std::vector<std::vector<std::int64_t>> c;
  for (const auto& v : counts) c.emplace_back(v.data(), v.data() + v.size());
  j["counts"] = c;
  return j.dump();
}

FrequencyData FrequencyData::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  FrequencyData out;
  out.kind = scheme_kind_from_string(j.at("kind").get<std::string>());
  out.q = j.at("q").get<int>();
  out.n = j.at("n").get<std::int64_t>();
  for (const auto& row : j.at("counts")) {
    IVec v(Index(row.size()));
    Index i = 0;
    for (const auto& x : row) v[i++] = x.get<std::int64_t>();
    out.counts.push_back(std::move(v));
  }
  out.N = out.n * std::int64_t(out.counts.size());
  return out;
}

namespace {

Index ipow(Index base, int exp) {
  Index out = 1;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

// Eigenvectors |w_{j,o}> of sigma_j; o = 0 is the +1 eigenvalue.
CVec pauli_eigvec(int axis, int outcome) {
  CVec v(2);
  const double s = std::sqrt(0.5);
  switch (axis) {
    case 1: v << s, (outcome == 0 ? s : -s); break;
    case 2: v << s, (outcome == 0 ? Complex(0, s) : Complex(0, -s)); break;
    case 3:
      if (outcome == 0) v << 1, 0;
      else v << 0, 1;
      break;
    default: throw std::invalid_argument("pauli_eigvec: axis must be 1..3");
  }
  return v;
}

std::vector<CVec> sic_kets() {
  const double a = 1.0 / std::sqrt(3.0);
  const double b = std::sqrt(2.0 / 3.0);
  std::vector<CVec> kets(4, CVec(2));
  kets[0] << 1, 0;
  kets[1] << a, b;
  kets[2] << a, b * std::exp(Complex(0, 2.0 * M_PI / 3.0));
  kets[3] << a, b * std::exp(Complex(0, 4.0 * M_PI / 3.0));
  return kets;
}

MeasurementMap make_map(const RMat& rows_full, int q) {
  MeasurementMap map;
  map.full = rows_full;
  map.traceless = rows_full.rightCols(rows_full.cols() - 1);
  map.offset = rows_full.col(0) * std::pow(2.0, -0.5 * q);
  Eigen::BDCSVD<RMat> svd(map.traceless, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVec& sv = svd.singularValues();
  map.mu = sv[sv.size() - 1];
  if (map.mu <= 0) throw std::runtime_error("measurement map is rank deficient");
  RVec inv_sv = sv.cwiseInverse();
  map.pinv = svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose();
  map.svd_u = svd.matrixU();
  map.svd_s = sv;
  map.svd_v = svd.matrixV();
  return map;
}

void finalize_scheme(MeasurementScheme& s) {
  const Index d4 = ipow(4, s.q);
  const Index rows = s.num_settings * s.outcomes_per_setting;
  s.effect_bloch.resize(rows, d4);
  Index r = 0;
  for (const auto& setting : s.effects)
    for (const auto& e : setting) s.effect_bloch.row(r++) = bloch_project(e).transpose();

  // reduced map: drop the last outcome of every setting
  const Index per = s.outcomes_per_setting;
  RMat red(s.num_settings * (per - 1), d4);
  for (Index set = 0; set < s.num_settings; ++set)
    red.middleRows(set * (per - 1), per - 1) = s.effect_bloch.middleRows(set * per, per - 1);
  s.reduced = make_map(red, s.q);
  s.stat = s.kind == SchemeKind::pauli ? s.reduced : make_map(s.effect_bloch, s.q);
  s.estimation = make_map(s.effect_bloch, s.q);
}

}  // namespace

double MeasurementScheme::sigma2_max(std::int64_t n) const {
  if (n < 1) throw std::invalid_argument("sigma2_max: n must be >= 1");
  if (kind == SchemeKind::pauli) return 0.5 / double(n);
  return std::pow(2.0, -q) / double(n);
}

std::vector<RVec> MeasurementScheme::born_probabilities(const CMat& rho) const {
  if (rho.rows() != dim) throw std::invalid_argument("born_probabilities: dimension mismatch");
  RVec x = bloch_project(rho);
  RVec flat = effect_bloch * x;
  std::vector<RVec> out(num_settings);
  for (Index s = 0; s < num_settings; ++s) {
    RVec p = flat.segment(s * outcomes_per_setting, outcomes_per_setting);
    for (Index i = 0; i < p.size(); ++i) {
      if (p[i] < -1e-12 || p[i] > 1.0 + 1e-12)
        throw std::runtime_error("born_probabilities: probability out of range");
      p[i] = std::min(1.0, std::max(0.0, p[i]));
    }
    out[s] = p;
  }
  return out;
}

RVec MeasurementScheme::stat_probabilities(const CMat& rho) const {
  RVec x = bloch_project(rho);
  return stat.traceless * x.tail(x.size() - 1) + stat.offset;
}

FrequencyData MeasurementScheme::sample_counts(const DensityMatrix& rho, std::int64_t n,
                                               RngStream& rng) const {
  return sample_counts(born_probabilities(rho.matrix()), n, rng);
}

FrequencyData MeasurementScheme::sample_counts(const std::vector<RVec>& probs, std::int64_t n,
                                               RngStream& rng) const {
  if (n < 1) throw std::invalid_argument("sample_counts: n must be >= 1");
  FrequencyData data;
  data.kind = kind;
  data.q = q;
  data.n = n;
  data.N = n * num_settings;
  data.counts.reserve(probs.size());
  for (const RVec& p : probs) {
    IVec c(p.size());
    std::int64_t remaining = n;
    double mass = p.sum();
    for (Index i = 0; i + 1 < p.size(); ++i) {
      if (remaining == 0 || mass <= 0.0) {
        c[i] = 0;
        continue;
      }
      double cond = std::min(1.0, std::max(0.0, p[i] / mass));
      std::int64_t draw = rng.binomial(remaining, cond);
      c[i] = draw;
      remaining -= draw;
      mass -= p[i];
    }
    c[p.size() - 1] = remaining;
    data.counts.push_back(std::move(c));
  }
  return data;
}

SchemePtr build_pauli_scheme(int q) {
  if (q < 1) throw std::invalid_argument("build_pauli_scheme: q must be >= 1");
  auto s = std::make_shared<MeasurementScheme>();
  s->kind = SchemeKind::pauli;
  s->q = q;
  s->dim = ipow(2, q);
  s->num_settings = ipow(3, q);
  s->outcomes_per_setting = s->dim;
  s->povm_weight = std::pow(3.0, -q);
  s->effects.resize(s->num_settings);
  for (Index set = 0; set < s->num_settings; ++set) {
    // base-3 digits of the setting, qubit 0 most significant; 0,1,2 -> x,y,z
    std::vector<int> axes(q);
    Index rem = set;
    for (int k = q - 1; k >= 0; --k) {
      axes[k] = int(rem % 3) + 1;
      rem /= 3;
    }
    s->effects[set].reserve(s->outcomes_per_setting);
    for (Index o = 0; o < s->outcomes_per_setting; ++o) {
      CMat e = CMat::Identity(1, 1);
      for (int k = 0; k < q; ++k) {
        int bit = int((o >> (q - 1 - k)) & 1);
        CVec w = pauli_eigvec(axes[k], bit);
        e = kron(e, CMat(w * w.adjoint())).eval();
      }
      s->effects[set].push_back(std::move(e));
    }
  }
  finalize_scheme(*s);
  return s;
}

SchemePtr build_local_sic_scheme(int q) {
  if (q < 1) throw std::invalid_argument("build_local_sic_scheme: q must be >= 1");
  auto s = std::make_shared<MeasurementScheme>();
  s->kind = SchemeKind::local_sic;
  s->q = q;
  s->dim = ipow(2, q);
  s->num_settings = 1;
  s->outcomes_per_setting = ipow(4, q);
  s->povm_weight = 1.0;
  auto kets = sic_kets();
  std::vector<CMat> single;
  for (const CVec& k : kets) single.push_back(0.5 * (k * k.adjoint()));
  s->effects.resize(1);
  s->effects[0].reserve(s->outcomes_per_setting);
  for (Index o = 0; o < s->outcomes_per_setting; ++o) {
    CMat e = CMat::Identity(1, 1);
    Index rem = o;
    std::vector<int> digits(q);
    for (int k = q - 1; k >= 0; --k) {
      digits[k] = int(rem % 4);
      rem /= 4;
    }
    for (int k = 0; k < q; ++k) e = kron(e, single[digits[k]]).eval();
    s->effects[0].push_back(std::move(e));
  }
  finalize_scheme(*s);
  return s;
}

SchemePtr build_scheme(SchemeKind kind, int q) {
  return kind == SchemeKind::pauli ? build_pauli_scheme(q) : build_local_sic_scheme(q);
}

CovarianceModel covariance(const MeasurementScheme& scheme, const DensityMatrix& rho,
                           std::int64_t n) {
  CovarianceModel model;
  model.n = n;
  model.probs = scheme.born_probabilities(rho.matrix());
  model.rank = 0;
  model.max_eigenvalue = 0.0;
  for (const RVec& p : model.probs) {
    const Index m = p.size() - 1;
    RVec pr = p.head(m);
    RMat block = (RMat(pr.asDiagonal()) - pr * pr.transpose()) / double(n);
    Eigen::SelfAdjointEigenSolver<RMat> es(block, Eigen::EigenvaluesOnly);
    model.max_eigenvalue = std::max(model.max_eigenvalue, es.eigenvalues().maxCoeff());
    Index support = 0;
    for (Index i = 0; i < p.size(); ++i)
      if (p[i] > 1e-12) ++support;
    model.rank += std::max<Index>(support - 1, 0);
    model.blocks.push_back(std::move(block));
  }
  return model;
}

}  // namespace tomocr
