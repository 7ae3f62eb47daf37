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

#include "tomocr/linalg.hpp"

#include <cmath>

namespace tomocr {

namespace {
constexpr double kSqrt2Inv = 0.70710678118654752440;
}

CMat pauli_sigma(int axis) {
  CMat m(2, 2);
  switch (axis) {
    case 0: m << 1, 0, 0, 1; break;
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, Complex(0, -1), Complex(0, 1), 0; break;
    case 3: m << 1, 0, 0, -1; break;
    default: throw std::invalid_argument("pauli_sigma: axis must be in 0..3");
  }
  return m;
}

CMat identity_matrix(Index d) { return CMat::Identity(d, d); }

double hermiticity_defect(const CMat& h) {
  return (h - h.adjoint()).cwiseAbs().maxCoeff();
}

EigH eig_hermitian(const CMat& h) {
  if (hermiticity_defect(h) > 1e-10)
    throw std::invalid_argument("eig_hermitian: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMat> solver(h);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eig_hermitian: eigensolver did not converge");
  EigH out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

double operator_norm(const CMat& h) {
  Eigen::SelfAdjointEigenSolver<CMat> solver(h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("operator_norm: eigensolver did not converge");
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

DensityMatrix::DensityMatrix(CMat m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw std::invalid_argument("DensityMatrix: not square");
  if (hermiticity_defect(m_) > 1e-12)
    throw std::invalid_argument("DensityMatrix: not Hermitian");
  if (std::abs(m_.trace().real() - 1.0) > 1e-10 || std::abs(m_.trace().imag()) > 1e-10)
    throw std::invalid_argument("DensityMatrix: trace != 1");
  Eigen::SelfAdjointEigenSolver<CMat> solver(m_, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -1e-10)
    throw std::invalid_argument("DensityMatrix: negative eigenvalue");
}

double real_trace_product(const CMat& a, const CMat& b) {
  return (a.transpose().cwiseProduct(b)).sum().real();
}

double overlap(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("overlap: dimension mismatch");
  return real_trace_product(a.matrix(), b.matrix());
}

int qubits_from_coords(Index len) {
  int q = 0;
  Index v = 1;
  while (v < len) { v *= 4; ++q; }
  if (v != len) throw std::invalid_argument("bloch coordinates: length is not 4^q");
  return q;
}

int qubits_from_dim(Index d) {
  int q = 0;
  Index v = 1;
  while (v < d) { v *= 2; ++q; }
  if (v != d) throw std::invalid_argument("dimension is not a power of 2");
  return q;
}

namespace {

// Flat working layout: digit k (qubit 0 most significant) encodes the index
// pair (i_k, j_k) as 2*i_k + j_k before the butterfly, the Pauli label after.
// Matrix entry (i, j) lives at L = sum_k 4^{q-1-k} (2 i_k + j_k), which equals
// interleaving the bits of i and j.
Index matrix_to_flat(Index i, Index j, int q) {
  Index L = 0;
  for (int k = 0; k < q; ++k) {
    Index ib = (i >> (q - 1 - k)) & 1;
    Index jb = (j >> (q - 1 - k)) & 1;
    L = 4 * L + 2 * ib + jb;
  }
  return L;
}

void butterflies(CVec& w, int q, bool forward) {
  const Index n = w.size();
  const Complex im(0, 1);
  for (int k = 0; k < q; ++k) {
    const Index stride = Index(1) << (2 * (q - 1 - k));
    const Index block = stride * 4;
    for (Index base = 0; base < n; base += block) {
      for (Index off = 0; off < stride; ++off) {
        Complex v0 = w[base + off];               // (0,0) or I
        Complex v1 = w[base + stride + off];      // (0,1) or X
        Complex v2 = w[base + 2 * stride + off];  // (1,0) or Y
        Complex v3 = w[base + 3 * stride + off];  // (1,1) or Z
        if (forward) {
          w[base + off] = (v0 + v3) * kSqrt2Inv;
          w[base + stride + off] = (v1 + v2) * kSqrt2Inv;
          w[base + 2 * stride + off] = im * (v1 - v2) * kSqrt2Inv;
          w[base + 3 * stride + off] = (v0 - v3) * kSqrt2Inv;
        } else {
          w[base + off] = (v0 + v3) * kSqrt2Inv;
          w[base + stride + off] = (v1 - im * v2) * kSqrt2Inv;
          w[base + 2 * stride + off] = (v1 + im * v2) * kSqrt2Inv;
          w[base + 3 * stride + off] = (v0 - v3) * kSqrt2Inv;
        }
      }
    }
  }
}

}  // namespace

void pauli_transform_forward(CVec& flat, int q) { butterflies(flat, q, true); }
void pauli_transform_inverse(CVec& flat, int q) { butterflies(flat, q, false); }

RVec bloch_project(const CMat& h) {
  const Index d = h.rows();
  const int q = qubits_from_dim(d);
  CVec w(d * d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) w[matrix_to_flat(i, j, q)] = h(i, j);
  pauli_transform_forward(w, q);
  return w.real();
}

CMat bloch_expand(const RVec& coords) {
  const int q = qubits_from_coords(coords.size());
  const Index d = Index(1) << q;
  CVec w = coords.cast<Complex>();
  pauli_transform_inverse(w, q);
  CMat h(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) h(i, j) = w[matrix_to_flat(i, j, q)];
  return h;
}

CMat bloch_basis_element(int q, Index i) {
  CMat out = CMat::Identity(1, 1);
  Index rem = i;
  std::vector<int> digits(q);
  for (int k = q - 1; k >= 0; --k) {
    digits[k] = int(rem % 4);
    rem /= 4;
  }
  const double scale = std::pow(2.0, -0.5 * q);
  for (int k = 0; k < q; ++k) out = kron(out, pauli_sigma(digits[k])).eval();
  return scale * out;
}

DensityMatrix haar_random_pure(Index d, RngStream& rng) {
  if (d < 2) throw std::invalid_argument("haar_random_pure: d must be >= 2");
  CVec v(d);
  for (Index i = 0; i < d; ++i) v[i] = Complex(rng.normal(), rng.normal());
  v /= v.norm();
  return DensityMatrix(v * v.adjoint());
}

CMat haar_random_su2(RngStream& rng) {
  CVec v(2);
  do {
    v[0] = Complex(rng.normal(), rng.normal());
    v[1] = Complex(rng.normal(), rng.normal());
  } while (v.norm() < 1e-12);
  v /= v.norm();
  CMat u(2, 2);
  // second column chosen so that det(u) = 1
  u << v[0], -std::conj(v[1]), v[1], std::conj(v[0]);
  return u;
}

}  // namespace tomocr
