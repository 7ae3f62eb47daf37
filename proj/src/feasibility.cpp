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

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <memory>
#include <mutex>

namespace tomocr {

namespace {

constexpr double kSqrt2Inv = 0.70710678118654752440;

// Projection of a real vector onto the probability simplex; also reports the
// Euclidean distance moved, which equals the Frobenius distance to the state
// set when applied to eigenvalues.
RVec simplex_project(const RVec& lambda, double* dist = nullptr) {
  RVec sorted = lambda;
  std::sort(sorted.data(), sorted.data() + sorted.size(), std::greater<double>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (Index k = 0; k < sorted.size(); ++k) {
    cumsum += sorted[k];
    const double t = (cumsum - 1.0) / double(k + 1);
    if (sorted[k] - t > 0.0) theta = t;
  }
  RVec out = (lambda.array() - theta).cwiseMax(0.0);
  if (dist) *dist = (out - lambda).norm();
  return out;
}

RVec eig_rebuild_coords(const Eigen::SelfAdjointEigenSolver<CMat>& es, const RVec& new_evals) {
  const CMat rebuilt =
      es.eigenvectors() * new_evals.asDiagonal() * es.eigenvectors().adjoint();
  return bloch_project(rebuilt);
}

// --- coordinate-level projections -----------------------------------------

RVec project_state_coords(const RVec& x, double* dist = nullptr) {
  Eigen::SelfAdjointEigenSolver<CMat> es(bloch_expand(x));
  RVec evals = es.eigenvalues();
  RVec proj = simplex_project(evals, dist);
  return eig_rebuild_coords(es, proj);
}

double state_violation_coords(const RVec& x) {
  Eigen::SelfAdjointEigenSolver<CMat> es(bloch_expand(x), Eigen::EigenvaluesOnly);
  double dist = 0.0;
  simplex_project(es.eigenvalues(), &dist);
  return dist;
}

RVec project_opnorm_coords(const RVec& x, const RVec& center, double eps) {
  Eigen::SelfAdjointEigenSolver<CMat> es(bloch_expand(x - center));
  RVec evals = es.eigenvalues();
  if (evals.cwiseAbs().maxCoeff() <= eps) return x;
  RVec clipped = evals.cwiseMax(-eps).cwiseMin(eps);
  return center + eig_rebuild_coords(es, clipped);
}

// Ellipsoid {x : ||M x_t - b|| <= eps, x_0 = t0} with M = map.traceless and
// b expressed through g = U^T b in the SVD basis of M.
struct EllipsoidSet {
  const MeasurementMap* map = nullptr;
  RVec b;        // center minus offset, probability coordinates
  RVec g;        // U^T b
  double b_perp2 = 0.0;
  double eps = 0.0;
  double t0 = 0.0;  // fixed trace coordinate

  RVec project(const RVec& x) const {
    const auto& svd_v = map->svd_v;
    const auto& s = map->svd_s;
    RVec xt = x.tail(x.size() - 1);
    RVec hv = svd_v.transpose() * xt;
    RVec w = s.cwiseProduct(hv) - g;
    const double r2 = w.squaredNorm() + b_perp2;
    RVec out = x;
    out[0] = t0;
    if (r2 <= eps * eps) return out;
    if (b_perp2 >= eps * eps)
      throw std::invalid_argument("project_prob_ball: target ball misses the model range");
    // phi(lam) = sum w_i^2/(1+lam s_i^2)^2 - (eps^2 - b_perp2), decreasing in lam
    const double target = eps * eps - b_perp2;
    const auto phi = [&](double lam) {
      double acc = 0.0;
      for (Index i = 0; i < w.size(); ++i) {
        const double den = 1.0 + lam * s[i] * s[i];
        acc += w[i] * w[i] / (den * den);
      }
      return acc - target;
    };
    const auto dphi = [&](double lam) {
      double acc = 0.0;
      for (Index i = 0; i < w.size(); ++i) {
        const double s2 = s[i] * s[i];
        const double den = 1.0 + lam * s2;
        acc += -2.0 * s2 * w[i] * w[i] / (den * den * den);
      }
      return acc;
    };
    double lo = 0.0, hi = 1.0;
    while (phi(hi) > 0.0) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e18) throw std::runtime_error("project_prob_ball: multiplier bracket failed");
    }
    double lam = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
      const double val = phi(lam);
      if (val > 0.0) lo = lam;
      else hi = lam;
      double step = val / dphi(lam);
      double next = lam - step;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - lam) < 1e-12 * std::max(1.0, lam)) {
        lam = next;
        break;
      }
      lam = next;
    }
    RVec yv = (hv + lam * s.cwiseProduct(g)).cwiseQuotient(
        (RVec::Ones(s.size()) + lam * s.cwiseProduct(s)));
    out.tail(x.size() - 1) = svd_v * yv;
    return out;
  }

  double violation(const RVec& x) const {
    RVec xt = x.tail(x.size() - 1);
    return std::max(0.0, (map->traceless * xt - b).norm() - eps);
  }
};

struct HalfspaceSet {
  RVec e;
  double bound = 0.0;
  double norm2 = 0.0;
};

struct OpnormSet {
  RVec center;
  double eps = 0.0;
};

struct SetOp {
  enum class Type { state, opnorm, ellipsoid, halfspace };
  Type type;
  OpnormSet ball;
  EllipsoidSet ellipsoid;
  HalfspaceSet halfspace;
};

RVec apply_projection(const SetOp& op, const RVec& x) {
  switch (op.type) {
    case SetOp::Type::state: return project_state_coords(x);
    case SetOp::Type::opnorm: return project_opnorm_coords(x, op.ball.center, op.ball.eps);
    case SetOp::Type::ellipsoid: return op.ellipsoid.project(x);
    case SetOp::Type::halfspace: {
      const double v = op.halfspace.e.dot(x) - op.halfspace.bound;
      if (v <= 0.0) return x;
      return x - (v / op.halfspace.norm2) * op.halfspace.e;
    }
  }
  return x;
}

double op_violation(const SetOp& op, const RVec& x) {
  switch (op.type) {
    case SetOp::Type::state: return state_violation_coords(x);
    case SetOp::Type::opnorm: {
      Eigen::SelfAdjointEigenSolver<CMat> es(bloch_expand(x - op.ball.center),
                                             Eigen::EigenvaluesOnly);
      return std::max(0.0, es.eigenvalues().cwiseAbs().maxCoeff() - op.ball.eps);
    }
    case SetOp::Type::ellipsoid: return op.ellipsoid.violation(x);
    case SetOp::Type::halfspace:
      return std::max(0.0, op.halfspace.e.dot(x) - op.halfspace.bound);
  }
  return 0.0;
}

EllipsoidSet make_ellipsoid(const RegionC2& region) {
  EllipsoidSet set;
  set.map = &region.scheme->stat;
  set.b = region.center - set.map->offset;
  set.g = set.map->svd_u.transpose() * set.b;
  set.b_perp2 = std::max(0.0, set.b.squaredNorm() - set.g.squaredNorm());
  set.eps = region.epsilon;
  set.t0 = std::pow(2.0, -0.5 * region.scheme->q);
  return set;
}

struct RegionOps {
  std::vector<SetOp> ops;
  RVec center_guess;     // a state-space point near the region
  int skipped_facets = 0;
};

RegionOps region_ops(const Region& region, int q) {
  RegionOps out;
  const Index nc = Index(1) << (2 * q);
  if (const auto* a = std::get_if<RegionA>(&region)) {
    SetOp op;
    op.type = SetOp::Type::opnorm;
    op.ball.center = bloch_project(a->center);
    op.ball.eps = a->epsilon;
    out.center_guess = op.ball.center;
    out.ops.push_back(std::move(op));
  } else if (const auto* b = std::get_if<RegionB>(&region)) {
    for (const RegionBFacet& facet : b->facets) {
      // facets implied by the state set are inert for physical iterates
      if (facet.trivial || facet.bound >= facet.effect_lambda_max) {
        ++out.skipped_facets;
        continue;
      }
      SetOp op;
      op.type = SetOp::Type::halfspace;
      op.halfspace.e = facet.effect_bloch;
      op.halfspace.bound = facet.bound;
      op.halfspace.norm2 = facet.effect_norm2;
      out.ops.push_back(std::move(op));
    }
    out.center_guess = RVec::Zero(nc);
    out.center_guess[0] = std::pow(2.0, -0.5 * q);
  } else {
    const auto& c2 = std::get<RegionC2>(region);
    SetOp op;
    op.type = SetOp::Type::ellipsoid;
    op.ellipsoid = make_ellipsoid(c2);
    // reconstruct the center state from its probability image
    out.center_guess = RVec(nc);
    out.center_guess[0] = op.ellipsoid.t0;
    out.center_guess.tail(nc - 1) = c2.scheme->stat.pinv * op.ellipsoid.b;
    out.ops.push_back(std::move(op));
  }
  return out;
}

int region_qubits(const Region& region) {
  if (const auto* a = std::get_if<RegionA>(&region)) return a->q;
  if (const auto* b = std::get_if<RegionB>(&region)) return b->q;
  return std::get<RegionC2>(region).scheme->q;
}

}  // namespace

std::string to_string(FeasStatus s) {
  switch (s) {
    case FeasStatus::feasible: return "feasible";
    case FeasStatus::infeasible: return "infeasible";
    case FeasStatus::undecided: return "undecided";
  }
  return "?";
}

DensityMatrix project_state_set(const CMat& h) {
  if (hermiticity_defect(h) > 1e-10)
    throw std::invalid_argument("project_state_set: input is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMat> es(h);
  if (es.info() != Eigen::Success) throw std::runtime_error("project_state_set: eig failed");
  RVec proj = simplex_project(es.eigenvalues());
  CMat out = es.eigenvectors() * proj.asDiagonal() * es.eigenvectors().adjoint();
  out = 0.5 * (out + out.adjoint());
  return DensityMatrix(out);
}

CMat project_opnorm_ball(const CMat& h, const CMat& center, double epsilon) {
  Eigen::SelfAdjointEigenSolver<CMat> es(h - center);
  if (es.info() != Eigen::Success) throw std::runtime_error("project_opnorm_ball: eig failed");
  RVec clipped = es.eigenvalues().cwiseMax(-epsilon).cwiseMin(epsilon);
  return center + CMat(es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().adjoint());
}

CMat project_prob_ball(const CMat& h, const MeasurementScheme& scheme, const RVec& p_hat,
                       double epsilon) {
  EllipsoidSet set;
  set.map = &scheme.stat;
  set.b = p_hat - scheme.stat.offset;
  set.g = scheme.stat.svd_u.transpose() * set.b;
  set.b_perp2 = std::max(0.0, set.b.squaredNorm() - set.g.squaredNorm());
  set.eps = epsilon;
  set.t0 = std::pow(2.0, -0.5 * scheme.q);
  return bloch_expand(set.project(bloch_project(h)));
}

CMat project_halfspace(const CMat& h, const CMat& effect, double bound) {
  const double v = real_trace_product(effect, h) - bound;
  if (v <= 0.0) return h;
  return h - (v / effect.squaredNorm()) * effect;
}

FeasibilityVerdict decide_intersection(const Region& r1, const Region& r2,
                                       const FeasibilityOptions& options) {
  const int q = region_qubits(r1);
  if (region_qubits(r2) != q)
    throw std::invalid_argument("decide_intersection: regions have different qubit counts");
  RegionOps ops1 = region_ops(r1, q);
  RegionOps ops2 = region_ops(r2, q);

  // Ball-gap certificate: if the two balls cannot even touch, any point
  // violates one of them by at least half the gap.
  {
    const auto* a1 = std::get_if<RegionA>(&r1);
    const auto* a2 = std::get_if<RegionA>(&r2);
    if (a1 && a2) {
      const double gap = operator_norm(a1->center - a2->center) - a1->epsilon - a2->epsilon;
      if (0.5 * gap > options.sep_tol)
        return {FeasStatus::infeasible, CMat(), 0.5 * gap, 0};
    }
    const auto* c1 = std::get_if<RegionC2>(&r1);
    const auto* c2 = std::get_if<RegionC2>(&r2);
    if (c1 && c2 && c1->scheme->kind == c2->scheme->kind) {
      const double gap = (c1->center - c2->center).norm() - c1->epsilon - c2->epsilon;
      if (0.5 * gap > options.sep_tol)
        return {FeasStatus::infeasible, CMat(), 0.5 * gap, 0};
    }
  }

  std::vector<SetOp> sets;
  {
    SetOp st;
    st.type = SetOp::Type::state;
    sets.push_back(std::move(st));
  }
  for (auto& op : ops1.ops) sets.push_back(std::move(op));
  for (auto& op : ops2.ops) sets.push_back(std::move(op));

  const auto max_violation = [&](const RVec& x) {
    double v = 0.0;
    for (const SetOp& op : sets) v = std::max(v, op_violation(op, x));
    return v;
  };

  // cheap candidate witnesses before iterating
  const RVec mid = 0.5 * (ops1.center_guess + ops2.center_guess);
  const std::array<const RVec*, 3> candidates = {&mid, &ops1.center_guess,
                                                 &ops2.center_guess};
  for (const RVec* cand : candidates) {
    const RVec x = project_state_coords(*cand);
    const double v = max_violation(x);
    if (v < options.feas_tol) return {FeasStatus::feasible, bloch_expand(x), v, 0};
  }

  RVec x = project_state_coords(mid);
  std::vector<RVec> corrections(sets.size(), RVec::Zero(x.size()));
  std::deque<double> history;
  for (int it = 1; it <= options.max_iterations; ++it) {
    for (std::size_t i = 0; i < sets.size(); ++i) {
      const RVec y = x + corrections[i];
      RVec z = apply_projection(sets[i], y);
      corrections[i] = y - z;
      x = std::move(z);
    }
    const double v = max_violation(x);
    if (v < options.feas_tol) return {FeasStatus::feasible, bloch_expand(x), v, it};
    history.push_back(v);
    if (int(history.size()) > options.plateau_window + 1) history.pop_front();
    if (int(history.size()) == options.plateau_window + 1 && v > options.sep_tol &&
        std::abs(history.back() - history.front()) <
            options.plateau_rel_tol * std::max(v, 1e-300)) {
      return {FeasStatus::infeasible, CMat(), v, it};
    }
  }
  return {FeasStatus::undecided, CMat(), history.empty() ? 0.0 : history.back(),
          options.max_iterations};
}

// ---------------------------------------------------------------------------
// 1-qubit brute-force oracle
// ---------------------------------------------------------------------------

namespace {

double radical_inverse(std::int64_t i, int base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * double(i % base);
    i /= base;
  }
  return r;
}

// Bloch vectors (3 x P) of a low-discrepancy filling of the unit ball.
const RMat& ball_points(std::int64_t samples) {
  static std::mutex mu;
  static RMat cache;
  static std::int64_t cached = 0;
  std::lock_guard<std::mutex> lock(mu);
  if (cached != samples) {
    cache.resize(3, samples);
    std::int64_t found = 0, i = 1;
    while (found < samples) {
      const double x = 2.0 * radical_inverse(i, 2) - 1.0;
      const double y = 2.0 * radical_inverse(i, 3) - 1.0;
      const double z = 2.0 * radical_inverse(i, 5) - 1.0;
      ++i;
      if (x * x + y * y + z * z <= 1.0) {
        cache(0, found) = x;
        cache(1, found) = y;
        cache(2, found) = z;
        ++found;
      }
    }
    cached = samples;
  }
  return cache;
}

// Signed constraint value of a region for 1-qubit states given as Bloch
// vectors r (state coordinates r / sqrt 2, trace coordinate 1 / sqrt 2):
// positive is the violation, negative the slack to the boundary.
struct PointEvaluator {
  virtual ~PointEvaluator() = default;
  virtual void signed_values(const RMat& pts, RVec& out) const = 0;
};

struct EvalA : PointEvaluator {
  RVec center;  // bloch coords of rho_hat (length 4)
  double eps = 0.0;
  void signed_values(const RMat& pts, RVec& out) const override {
    const double d0 = kSqrt2Inv - center[0];
    const RVec ct = center.tail(3);
    for (Index j = 0; j < pts.cols(); ++j) {
      const double dist = (pts.col(j) * kSqrt2Inv - ct).norm();
      out[j] = (std::abs(d0) + dist) * kSqrt2Inv - eps;
    }
  }
};

struct EvalB : PointEvaluator {
  RMat et;   // facets x 3 (traceless parts)
  RVec rhs;  // bound - e0 / sqrt 2
  void signed_values(const RMat& pts, RVec& out) const override {
    RMat v = et * (pts * kSqrt2Inv);  // facets x P
    for (Index j = 0; j < pts.cols(); ++j) out[j] = (v.col(j) - rhs).maxCoeff();
  }
};

struct EvalC2 : PointEvaluator {
  RMat m;    // stat rows x 3
  RVec off;  // offset - center
  double eps = 0.0;
  void signed_values(const RMat& pts, RVec& out) const override {
    RMat v = m * (pts * kSqrt2Inv);
    for (Index j = 0; j < pts.cols(); ++j) out[j] = (v.col(j) + off).norm() - eps;
  }
};

std::unique_ptr<PointEvaluator> make_evaluator(const Region& region) {
  if (const auto* a = std::get_if<RegionA>(&region)) {
    auto ev = std::make_unique<EvalA>();
    ev->center = bloch_project(a->center);
    ev->eps = a->epsilon;
    return ev;
  }
  if (const auto* b = std::get_if<RegionB>(&region)) {
    auto ev = std::make_unique<EvalB>();
    const Index m = Index(b->facets.size());
    ev->et.resize(m, 3);
    ev->rhs.resize(m);
    for (Index i = 0; i < m; ++i) {
      ev->et.row(i) = b->facets[i].effect_bloch.tail(3).transpose();
      ev->rhs[i] = b->facets[i].bound - b->facets[i].effect_bloch[0] * kSqrt2Inv;
    }
    return ev;
  }
  const auto& c2 = std::get<RegionC2>(region);
  auto ev = std::make_unique<EvalC2>();
  ev->m = c2.scheme->stat.traceless;
  ev->off = c2.scheme->stat.offset - c2.center;
  ev->eps = c2.epsilon;
  return ev;
}

// min over sampled states of max(signed_1, signed_2)
double brute_force_scan(const Region& r1, const Region& r2, std::int64_t samples) {
  if (region_qubits(r1) != 1 || region_qubits(r2) != 1)
    throw std::invalid_argument("brute force oracle: regions must be 1-qubit");
  const RMat& pts = ball_points(samples);
  auto ev1 = make_evaluator(r1);
  auto ev2 = make_evaluator(r2);
  constexpr Index chunk = 1 << 14;
  RVec v1(chunk), v2(chunk);
  double best = std::numeric_limits<double>::infinity();
  for (Index start = 0; start < pts.cols(); start += chunk) {
    const Index len = std::min<Index>(chunk, pts.cols() - start);
    const RMat block = pts.middleCols(start, len);
    v1.resize(len);
    v2.resize(len);
    ev1->signed_values(block, v1);
    ev2->signed_values(block, v2);
    best = std::min(best, v1.cwiseMax(v2).minCoeff());
  }
  return best;
}

}  // namespace

bool brute_force_intersect_1q(const Region& r1, const Region& r2, std::int64_t samples) {
  return brute_force_scan(r1, r2, samples) <= 0.0;
}

double brute_force_margin_1q(const Region& r1, const Region& r2, std::int64_t samples) {
  return brute_force_scan(r1, r2, samples);
}

}  // namespace tomocr
