/* Copyright 2026 The Specres Authors. All rights reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

  http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <complex>

#include "specres/error.hpp"

// Dense complex kernel used by the pencil stage: SVD, Moore-Penrose
// pseudo-inverse, general complex eigenvalues, and symmetric eigenpairs.
// Everything is templated on the real scalar; the pipeline instantiates
// `double` at its surface and `long double` inside the pencil, where the
// Hankel conditioning at the minimal sample count eats most of a double's
// mantissa.

namespace specres::linalg {

template <class Real>
using ComplexMat = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <class Real>
using ComplexVec = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <class Real>
using RealMat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
template <class Real>
using RealVec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using ComplexMatrix = ComplexMat<double>;
using ComplexVector = ComplexVec<double>;

template <class Real>
struct SvdFactorsT {
  ComplexMat<Real> U;              // orthonormal columns
  RealVec<Real> singular_values;   // nonincreasing, >= 0
  ComplexMat<Real> V;              // A = U * diag(s) * V^*
};

using SvdFactors = SvdFactorsT<double>;

template <class Real>
SvdFactorsT<Real> svd(const ComplexMat<Real>& A) {
  if (A.size() == 0) fail(Errc::size, "svd: matrix is empty");
  Eigen::JacobiSVD<ComplexMat<Real>> dec(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (dec.info() != Eigen::Success) fail(Errc::non_convergence, "svd: did not converge");
  return {dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

/// Moore-Penrose pseudo-inverse with singular values below rel_tol * sigma_max
/// treated as exactly zero. Rank policy belongs to the caller.
template <class Real>
ComplexMat<Real> pinv(const ComplexMat<Real>& A, Real rel_tol = Real(1e-8)) {
  if (!(rel_tol > Real(0) && rel_tol < Real(1)))
    fail(Errc::invalid_argument, "pinv: rel_tol must lie in (0, 1)");
  const SvdFactorsT<Real> f = svd(A);
  const Real sigma_max = f.singular_values.size() > 0 ? f.singular_values(0) : Real(0);
  RealVec<Real> inv = RealVec<Real>::Zero(f.singular_values.size());
  for (Eigen::Index i = 0; i < f.singular_values.size(); ++i) {
    if (f.singular_values(i) >= rel_tol * sigma_max && f.singular_values(i) > Real(0))
      inv(i) = Real(1) / f.singular_values(i);
  }
  return f.V * inv.template cast<std::complex<Real>>().asDiagonal() * f.U.adjoint();
}

/// All eigenvalues (with multiplicity) of a square complex matrix.
template <class Real>
ComplexVec<Real> eig_general(const ComplexMat<Real>& A) {
  if (A.rows() != A.cols()) fail(Errc::size, "eig_general: matrix must be square");
  if (A.size() == 0) fail(Errc::size, "eig_general: matrix is empty");
  Eigen::ComplexEigenSolver<ComplexMat<Real>> es(A, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) fail(Errc::non_convergence, "eig_general: did not converge");
  return es.eigenvalues();
}

template <class Real>
struct SymmetricEigenT {
  RealVec<Real> values;   // descending
  RealMat<Real> vectors;  // orthonormal columns, vectors.col(i) pairs values(i)
};

using SymmetricEigen = SymmetricEigenT<double>;

/// Eigenpairs of a real symmetric matrix, sorted by eigenvalue descending.
template <class Real>
SymmetricEigenT<Real> eig_symmetric(const RealMat<Real>& S) {
  if (S.rows() != S.cols()) fail(Errc::size, "eig_symmetric: matrix must be square");
  if (S.size() == 0) fail(Errc::size, "eig_symmetric: matrix is empty");
  const Real scale = S.norm();
  if ((S - S.transpose()).norm() > Real(1e-10) * std::max(scale, Real(1)))
    fail(Errc::not_symmetric, "eig_symmetric: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<RealMat<Real>> es(S);
  if (es.info() != Eigen::Success) fail(Errc::non_convergence, "eig_symmetric: did not converge");
  // Eigen sorts ascending; flip to descending.
  const Eigen::Index n = S.rows();
  SymmetricEigenT<Real> out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i) = es.eigenvalues()(n - 1 - i);
    out.vectors.col(i) = es.eigenvectors().col(n - 1 - i);
  }
  return out;
}

}  // namespace specres::linalg
