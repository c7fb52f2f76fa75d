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

#include "retroq/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include "retroq/errors.hpp"

namespace retroq {

namespace {

void require_square(const CMatrix& a, const char* who) {
  if (a.rows() != a.cols()) {
    throw DimensionError(std::string(who) + ": matrix must be square, got " +
                         std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()));
  }
}

// Row-major strides of a multi-index with the given factor dimensions.
std::vector<Eigen::Index> strides_of(const std::vector<Eigen::Index>& dims) {
  std::vector<Eigen::Index> s(dims.size(), 1);
  for (int i = static_cast<int>(dims.size()) - 2; i >= 0; --i) {
    s[i] = s[i + 1] * dims[i + 1];
  }
  return s;
}

}  // namespace

Eigen::Index HilbertFactorization::total_dim() const {
  Eigen::Index d = 1;
  for (Eigen::Index f : factor_dims) {
    if (f < 1) throw DimensionError("factor dimensions must be positive");
    d *= f;
  }
  return d;
}

CMatrix identity(Eigen::Index dim) { return CMatrix::Identity(dim, dim); }

CMatrix tensor_product(const CMatrix& a, const CMatrix& b) {
  return Eigen::kroneckerProduct(a, b);
}

CMatrix tensor_chain(const std::vector<CMatrix>& ops) {
  if (ops.empty()) throw DimensionError("tensor_chain: empty operator list");
  CMatrix out = ops.front();
  for (std::size_t i = 1; i < ops.size(); ++i) {
    out = tensor_product(out, ops[i]);
  }
  return out;
}

CMatrix partial_trace(const CMatrix& a, const HilbertFactorization& f,
                      const std::vector<int>& keep) {
  require_square(a, "partial_trace");
  const auto& dims = f.factor_dims;
  const auto m = static_cast<int>(dims.size());
  if (f.total_dim() != a.rows()) {
    throw DimensionError("partial_trace: factorization does not match matrix");
  }
  if (keep.empty()) throw DimensionError("partial_trace: keep set is empty");
  if (!std::is_sorted(keep.begin(), keep.end()) ||
      std::adjacent_find(keep.begin(), keep.end()) != keep.end()) {
    throw DimensionError("partial_trace: keep set must be sorted and unique");
  }
  std::vector<char> kept(m, 0);
  for (int k : keep) {
    if (k < 0 || k >= m) throw DimensionError("partial_trace: slot out of range");
    kept[k] = 1;
  }

  std::vector<Eigen::Index> kdims, tdims;
  std::vector<int> kslots, tslots;
  for (int i = 0; i < m; ++i) {
    (kept[i] ? kdims : tdims).push_back(dims[i]);
    (kept[i] ? kslots : tslots).push_back(i);
  }
  const auto full_strides = strides_of(dims);
  const auto kstrides = strides_of(kdims);
  const auto tstrides = strides_of(tdims);
  Eigen::Index dk = 1, dt = 1;
  for (auto d : kdims) dk *= d;
  for (auto d : tdims) dt *= d;

  // Offset of a composite sub-index inside the full index.
  auto offset = [&](Eigen::Index composite, const std::vector<Eigen::Index>& st,
                    const std::vector<Eigen::Index>& ds,
                    const std::vector<int>& slots) {
    Eigen::Index off = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      off += ((composite / st[i]) % ds[i]) * full_strides[slots[i]];
    }
    return off;
  };

  CMatrix out = CMatrix::Zero(dk, dk);
  for (Eigen::Index r = 0; r < dk; ++r) {
    const Eigen::Index ro = offset(r, kstrides, kdims, kslots);
    for (Eigen::Index c = 0; c < dk; ++c) {
      const Eigen::Index co = offset(c, kstrides, kdims, kslots);
      complexd acc = 0.0;
      for (Eigen::Index t = 0; t < dt; ++t) {
        const Eigen::Index to = offset(t, tstrides, tdims, tslots);
        acc += a(ro + to, co + to);
      }
      out(r, c) = acc;
    }
  }
  return out;
}

CMatrix embed_operator(const CMatrix& op, const HilbertFactorization& f,
                       const std::vector<int>& slots) {
  require_square(op, "embed_operator");
  const auto& dims = f.factor_dims;
  const auto m = static_cast<int>(dims.size());
  std::vector<char> used(m, 0);
  std::vector<Eigen::Index> sdims;
  Eigen::Index ds = 1;
  for (int s : slots) {
    if (s < 0 || s >= m) throw DimensionError("embed_operator: slot out of range");
    if (used[s]) throw DimensionError("embed_operator: repeated slot");
    used[s] = 1;
    sdims.push_back(dims[s]);
    ds *= dims[s];
  }
  if (ds != op.rows()) {
    throw DimensionError("embed_operator: operator does not match slot dims");
  }

  std::vector<Eigen::Index> rdims;
  std::vector<int> rslots;
  for (int i = 0; i < m; ++i) {
    if (!used[i]) {
      rdims.push_back(dims[i]);
      rslots.push_back(i);
    }
  }
  const auto full_strides = strides_of(dims);
  const auto sstrides = strides_of(sdims);
  const auto rstrides = strides_of(rdims);
  Eigen::Index dr = 1;
  for (auto d : rdims) dr *= d;

  auto offset = [&](Eigen::Index composite, const std::vector<Eigen::Index>& st,
                    const std::vector<Eigen::Index>& ds_,
                    const std::vector<int>& where) {
    Eigen::Index off = 0;
    for (std::size_t i = 0; i < ds_.size(); ++i) {
      off += ((composite / st[i]) % ds_[i]) * full_strides[where[i]];
    }
    return off;
  };
  std::vector<int> sslots(slots.begin(), slots.end());

  CMatrix out = CMatrix::Zero(f.total_dim(), f.total_dim());
  for (Eigen::Index r = 0; r < ds; ++r) {
    const Eigen::Index ro = offset(r, sstrides, sdims, sslots);
    for (Eigen::Index c = 0; c < ds; ++c) {
      const complexd v = op(r, c);
      if (v == complexd(0.0, 0.0)) continue;
      const Eigen::Index co = offset(c, sstrides, sdims, sslots);
      for (Eigen::Index t = 0; t < dr; ++t) {
        const Eigen::Index to = offset(t, rstrides, rdims, rslots);
        out(ro + to, co + to) = v;
      }
    }
  }
  return out;
}

PsdReport check_psd(const CMatrix& a, double tol) {
  require_square(a, "check_psd");
  const double defect = hermiticity_defect(a);
  if (defect > tol) {
    throw std::invalid_argument("check_psd: input not Hermitian, defect " +
                                std::to_string(defect));
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitize(a),
                                                Eigen::EigenvaluesOnly);
  const double lo = solver.eigenvalues().minCoeff();
  return PsdReport{lo >= -tol, lo};
}

double hermiticity_defect(const CMatrix& a) {
  return (a - a.adjoint().eval()).norm();
}

bool is_hermitian(const CMatrix& a, double tol) {
  return a.rows() == a.cols() && hermiticity_defect(a) <= tol;
}

double unitarity_defect(const CMatrix& a) {
  CMatrix g = a.adjoint() * a;
  g -= CMatrix::Identity(g.rows(), g.cols());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitize(g),
                                                Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

CMatrix hermitize(const CMatrix& a) { return 0.5 * (a + a.adjoint().eval()); }

double frobenius_distance(const CMatrix& a, const CMatrix& b) {
  return (a - b).norm();
}

double trace_distance(const CMatrix& a, const CMatrix& b) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitize(a - b),
                                                Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

double min_eigenvalue(const CMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitize(a),
                                                Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

complexd trace_of_product(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.rows() || a.rows() != b.cols()) {
    throw DimensionError("trace_of_product: incompatible shapes");
  }
  return (a.array() * b.transpose().array()).sum();
}

CVector basis_ket(Eigen::Index i, Eigen::Index dim) {
  if (i < 0 || i >= dim) throw DimensionError("basis_ket: index out of range");
  CVector v = CVector::Zero(dim);
  v(i) = 1.0;
  return v;
}

CMatrix basis_projector(Eigen::Index i, Eigen::Index dim) {
  if (i < 0 || i >= dim) {
    throw DimensionError("basis_projector: index out of range");
  }
  CMatrix p = CMatrix::Zero(dim, dim);
  p(i, i) = 1.0;
  return p;
}

CMatrix projector(const CVector& psi) {
  return (psi * psi.adjoint()) / psi.squaredNorm();
}

CMatrix pauli_x() {
  CMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

CMatrix pauli_y() {
  CMatrix m(2, 2);
  m << complexd(0, 0), complexd(0, -1), complexd(0, 1), complexd(0, 0);
  return m;
}

CMatrix pauli_z() {
  CMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

CMatrix sigma_plus() {
  CMatrix m = CMatrix::Zero(2, 2);
  m(1, 0) = 1.0;
  return m;
}

CMatrix sigma_minus() {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 1) = 1.0;
  return m;
}

}  // namespace retroq
