// Copyright 2026 The Retroq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace retroq {

using complexd = std::complex<double>;
using CMatrix =
    Eigen::Matrix<complexd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CVector = Eigen::VectorXcd;

/// Ordered tensor factorization of a Hilbert space, slot 0 leftmost.
struct HilbertFactorization {
  std::vector<Eigen::Index> factor_dims;

  Eigen::Index total_dim() const;
  Eigen::Index n_factors() const {
    return static_cast<Eigen::Index>(factor_dims.size());
  }
};

struct PsdReport {
  bool psd = false;
  double min_eigenvalue = 0.0;
};

CMatrix identity(Eigen::Index dim);

/// Kronecker product a (x) b with slot 0 = a.
CMatrix tensor_product(const CMatrix& a, const CMatrix& b);

/// Left fold of tensor_product over a nonempty list.
CMatrix tensor_chain(const std::vector<CMatrix>& ops);

/// Trace out every slot not listed in `keep`. Kept slots stay in slot order.
/// Requires keep to be sorted, duplicate free and nonempty.
CMatrix partial_trace(const CMatrix& a, const HilbertFactorization& f,
                      const std::vector<int>& keep);

/// Lift an operator acting on the listed slots (in the given order, which may
/// permute and need not be contiguous) to the full space, identity elsewhere.
CMatrix embed_operator(const CMatrix& op, const HilbertFactorization& f,
                       const std::vector<int>& slots);

/// Eigenvalue check for positive semidefiniteness of a Hermitian matrix.
/// Throws DimensionError for non-square input and std::invalid_argument if
/// the Hermiticity defect ||a - a^dag||_F exceeds tol.
PsdReport check_psd(const CMatrix& a, double tol = 1e-10);

double hermiticity_defect(const CMatrix& a);
bool is_hermitian(const CMatrix& a, double tol = 1e-10);

/// ||a^dag a - 1||_2 (spectral norm), zero iff a is an isometry.
double unitarity_defect(const CMatrix& a);

/// (a + a^dag) / 2
CMatrix hermitize(const CMatrix& a);

double frobenius_distance(const CMatrix& a, const CMatrix& b);

/// 0.5 * ||a - b||_1 for Hermitian a, b.
double trace_distance(const CMatrix& a, const CMatrix& b);

/// Smallest eigenvalue of the Hermitian part of a.
double min_eigenvalue(const CMatrix& a);

/// tr(a b) without forming the product.
complexd trace_of_product(const CMatrix& a, const CMatrix& b);

CVector basis_ket(Eigen::Index i, Eigen::Index dim);
CMatrix basis_projector(Eigen::Index i, Eigen::Index dim);
CMatrix projector(const CVector& psi);

CMatrix pauli_x();
CMatrix pauli_y();
CMatrix pauli_z();
CMatrix sigma_plus();   // |1><0|
CMatrix sigma_minus();  // |0><1|

}  // namespace retroq
