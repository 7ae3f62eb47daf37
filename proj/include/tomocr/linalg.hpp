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

#ifndef TOMOCR_LINALG_HPP_
#define TOMOCR_LINALG_HPP_

#include <stdexcept>
#include <vector>

#include "tomocr/types.hpp"

namespace tomocr {

// Pauli matrices sigma_x, sigma_y, sigma_z and the 2x2 identity.
CMat pauli_sigma(int axis);  // 0 -> identity, 1..3 -> x, y, z
CMat identity_matrix(Index d);

/// Max absolute deviation from Hermiticity, max_ij |H - H^dagger|.
double hermiticity_defect(const CMat& h);

/// Kronecker product, dim = dim(a) * dim(b).
template <typename DerivedA, typename DerivedB>
auto kron(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.rows() * b.rows(),
                                                            a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

struct EigH {
  RVec values;   // descending
  CMat vectors;  // orthonormal columns, h = V diag(values) V^dagger
};

/// Hermitian eigendecomposition with eigenvalues sorted descending.
/// Throws std::runtime_error if the solver fails to converge.
EigH eig_hermitian(const CMat& h);

/// Largest absolute eigenvalue of a Hermitian matrix.
double operator_norm(const CMat& h);

/// Unit-trace positive semidefinite Hermitian matrix.
class DensityMatrix {
 public:
  explicit DensityMatrix(CMat m);
  const CMat& matrix() const { return m_; }
  Index dim() const { return m_.rows(); }

 private:
  CMat m_;
};

/// tr(a b), real for Hermitian arguments.
double overlap(const DensityMatrix& a, const DensityMatrix& b);
double real_trace_product(const CMat& a, const CMat& b);

// ---------------------------------------------------------------------------
// Generalized Bloch representation over mu = 2^{-q/2} (1, sx, sy, sz)^{tensor q}.
// Coordinates are indexed base-4 with qubit 0 as the most significant digit,
// index 0 being the identity (trace) component. The basis is orthonormal for
// the trace inner product, so tr(XY) = x . y.
// ---------------------------------------------------------------------------

/// Number of qubits for a 4^q coordinate vector; throws if not a power of 4.
int qubits_from_coords(Index len);
int qubits_from_dim(Index d);

/// Hermitian matrix -> real Bloch coordinates (length 4^q).
RVec bloch_project(const CMat& h);

/// Real Bloch coordinates (length 4^q) -> Hermitian matrix.
CMat bloch_expand(const RVec& coords);

/// The (complex) change of basis used by the two functions above, exposed for
/// callers that keep data in Bloch coordinates through hot loops.
void pauli_transform_forward(CVec& flat, int q);  // matrix entries (row-major) -> coefficients
void pauli_transform_inverse(CVec& flat, int q);  // coefficients -> matrix entries (row-major)

/// Explicit Bloch basis matrix mu_i for tests and one-off constructions.
CMat bloch_basis_element(int q, Index i);

/// Haar-random pure state of dimension d (via normalized complex Gaussian vector).
DensityMatrix haar_random_pure(Index d, RngStream& rng);

/// Haar-random SU(2) element (normalized complex 2-vector column, det fixed to 1).
CMat haar_random_su2(RngStream& rng);

}  // namespace tomocr

#endif  // TOMOCR_LINALG_HPP_
