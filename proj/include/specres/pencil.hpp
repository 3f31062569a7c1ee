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

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <utility>
#include <vector>

#include "specres/error.hpp"
#include "specres/linalg.hpp"
#include "specres/model.hpp"

// Step 1 of the recovery: the intensity sequence is itself a sparse
// exponential sum
//
//   y[k] = sum_{i,l} a_i conj(a_l) exp(-j 2 pi (t_i - t_l) k),
//
// with at most K = r^2 - r + 1 distinct frequencies (the r diagonal terms
// merge at tau = 0). A matrix pencil on the enhanced Hankel matrix of y
// recovers the unlabeled difference set {t_i - t_l} and, via least squares,
// the correlation coefficients a_i conj(a_l).

namespace specres {

/// Enhanced (m_c + 1) x m_c Hankel matrix with Y(p, q) = y[p + q - m_c].
struct HankelPencil {
  linalg::ComplexMatrix Y;
  int m_c = 0;

  auto Y1() const { return Y.topRows(m_c); }      // rows 0 .. m_c-1
  auto Y2() const { return Y.bottomRows(m_c); }   // rows 1 .. m_c
};

/// One exponential component of the intensity sequence: coefficient `coeff`
/// at difference frequency `tau`.
struct CorrelationComponent {
  double tau = 0.0;
  Complex coeff{0.0, 0.0};
};

/// The unlabeled correlation data recovered by the pencil: the tau = 0
/// coefficient sum |a_i|^2 is split off as dc_power, the remaining components
/// come in conjugate pairs (tau, c), (-tau, conj(c)).
struct CorrelationSet {
  std::vector<CorrelationComponent> components;  // excludes the DC term
  double dc_power = 0.0;
  int order = 0;  // number of exponentials including DC

  /// Unordered-pair product moduli |a_i a_l|, one per conjugate pair,
  /// sorted descending.
  std::vector<double> product_moduli() const {
    std::vector<double> mods;
    for (const CorrelationComponent& c : components) {
      if (c.tau > 0.0) mods.push_back(std::abs(c.coeff));
    }
    std::sort(mods.begin(), mods.end(), std::greater<>());
    return mods;
  }
};

inline HankelPencil build_hankel(const IntensitySamples& samples) {
  const int m_c = samples.m_c;
  if (m_c < 2) fail(Errc::size, "build_hankel: m_c must be >= 2");
  if (static_cast<int>(samples.values.size()) != 2 * m_c)
    fail(Errc::invalid_argument, "build_hankel: values length must equal 2 m_c");
  linalg::ComplexMatrix Y(m_c + 1, m_c);
  for (int p = 0; p <= m_c; ++p)
    for (int q = 0; q < m_c; ++q) Y(p, q) = samples.at(p + q - m_c);
  return {std::move(Y), m_c};
}

namespace detail {

using LongCMat = linalg::ComplexMat<long double>;
using LongCVec = linalg::ComplexVec<long double>;

inline std::vector<std::complex<long double>> sorted_by_modulus(const LongCVec& eig) {
  std::vector<std::complex<long double>> v(eig.data(), eig.data() + eig.size());
  std::stable_sort(v.begin(), v.end(),
                   [](const auto& a, const auto& b) { return std::abs(a) > std::abs(b); });
  return v;
}

inline long double top_unit_deviation(const std::vector<std::complex<long double>>& eig, int K) {
  long double dev = 0.0L;
  for (int i = 0; i < K && i < static_cast<int>(eig.size()); ++i)
    dev = std::max(dev, std::abs(std::abs(eig[static_cast<std::size_t>(i)]) - 1.0L));
  return dev;
}

// Signal-subspace variant of the pencil: with U_K the top-K left singular
// vectors of Y, the spectra of pinv(U_K[0:m_c]) * U_K[1:m_c+1] and of
// pinv(Y1) * Y2 coincide on the signal modes, but the orthonormal basis
// avoids squaring the Hankel condition number.
inline std::vector<std::complex<long double>> subspace_eigenvalues(const LongCMat& Y, int m_c,
                                                                   int K) {
  const linalg::SvdFactorsT<long double> f = linalg::svd<long double>(Y);
  const LongCMat UK = f.U.leftCols(std::min<Eigen::Index>(K, f.U.cols()));
  const LongCMat U1 = UK.topRows(m_c);
  const LongCMat U2 = UK.bottomRows(m_c);
  return sorted_by_modulus(
      linalg::eig_general<long double>(linalg::pinv<long double>(U1) * U2));
}

}  // namespace detail

/// Eigenvalues of pinv(Y1) * Y2, the K of largest modulus. On exact data from
/// an admissible signal these lie on the unit circle and their arguments give
/// the difference set. Falls back to the signal-subspace pencil when the
/// pseudo-inverse route drifts off the unit circle.
inline std::vector<Complex> pencil_eigenvalues(const HankelPencil& pencil, int K,
                                               double rank_rel_tol = 1e-8) {
  if (K < 1) fail(Errc::invalid_argument, "pencil_eigenvalues: K must be >= 1");
  if (K > pencil.m_c) fail(Errc::invalid_argument, "pencil_eigenvalues: K must be <= m_c");
  if (!(rank_rel_tol > 0.0 && rank_rel_tol < 1.0))
    fail(Errc::invalid_argument, "pencil_eigenvalues: rank_rel_tol must lie in (0, 1)");

  const detail::LongCMat Y = pencil.Y.cast<std::complex<long double>>();
  const detail::LongCMat Y1 = Y.topRows(pencil.m_c);
  const detail::LongCMat Y2 = Y.bottomRows(pencil.m_c);

  std::vector<std::complex<long double>> eig = detail::sorted_by_modulus(
      linalg::eig_general<long double>(
          linalg::pinv<long double>(Y1, static_cast<long double>(rank_rel_tol)) * Y2));

  // 1e-6 is the internal trigger; extract_differences tolerates 1e-3.
  if (detail::top_unit_deviation(eig, K) > 1e-6L) {
    std::vector<std::complex<long double>> alt = detail::subspace_eigenvalues(Y, pencil.m_c, K);
    if (detail::top_unit_deviation(alt, K) < detail::top_unit_deviation(eig, K)) eig = std::move(alt);
  }

  int large = 0;
  for (const auto& lambda : eig)
    if (std::abs(lambda) >= 0.5L) ++large;
  if (large < K)
    fail(Errc::model_order, "pencil_eigenvalues: only " + std::to_string(large) +
                                " eigenvalues of modulus >= 0.5 for requested order " +
                                std::to_string(K));

  std::vector<Complex> out;
  out.reserve(static_cast<std::size_t>(K));
  for (int i = 0; i < K; ++i) {
    const auto& lambda = eig[static_cast<std::size_t>(i)];
    out.emplace_back(static_cast<double>(lambda.real()), static_cast<double>(lambda.imag()));
  }
  return out;
}

/// tau_k = arg(lambda_k) / (2 pi), folded into (-0.5, 0.5). The set comes out
/// unlabeled; pairing taus with index pairs happens in the disentangle stage.
inline std::vector<double> extract_differences(const std::vector<Complex>& eigenvalues) {
  std::vector<double> taus;
  taus.reserve(eigenvalues.size());
  for (const Complex& lambda : eigenvalues) {
    const double dev = std::abs(std::abs(lambda) - 1.0);
    if (dev > 1e-3)
      fail(Errc::modulus, "extract_differences: eigenvalue modulus deviates from 1 by " +
                              std::to_string(dev));
    double tau = std::arg(lambda) / (2.0 * std::numbers::pi);
    if (tau >= 0.5) tau -= 1.0;  // arg returns (-pi, pi]; fold the +0.5 boundary
    taus.push_back(tau);
  }
  return taus;
}

/// Least-squares fit of y[k] = sum_q c_q exp(-j 2 pi tau_q k) over all m
/// samples, then separation of the DC term and conjugate-pair symmetrization.
inline CorrelationSet solve_coefficients(const IntensitySamples& samples,
                                         const std::vector<double>& taus) {
  const int m = samples.m();
  const int K = static_cast<int>(taus.size());
  if (K < 1) fail(Errc::invalid_argument, "solve_coefficients: need at least one tau");
  if (K > m) fail(Errc::invalid_argument, "solve_coefficients: more taus than samples");
  {
    std::vector<double> sorted(taus);
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 1; i < sorted.size(); ++i)
      if (sorted[i] - sorted[i - 1] < 1e-9)
        fail(Errc::invalid_argument, "solve_coefficients: taus must be pairwise distinct");
  }

  detail::LongCMat E(m, K);
  detail::LongCVec y(m);
  for (int k = -samples.m_c; k < samples.m_c; ++k) {
    const int row = k + samples.m_c;
    y(row) = static_cast<long double>(samples.at(k));
    for (int q = 0; q < K; ++q) {
      const long double phase = -2.0L * std::numbers::pi_v<long double> *
                                static_cast<long double>(taus[static_cast<std::size_t>(q)]) *
                                static_cast<long double>(k);
      E(row, q) = std::complex<long double>(std::cos(phase), std::sin(phase));
    }
  }

  Eigen::JacobiSVD<detail::LongCMat> dec(E, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (dec.info() != Eigen::Success)
    fail(Errc::non_convergence, "solve_coefficients: SVD did not converge");
  const long double sigma_max = dec.singularValues()(0);
  const long double sigma_min = dec.singularValues()(dec.singularValues().size() - 1);
  if (!(sigma_min > 0.0L) || sigma_max / sigma_min > 1e12L)
    fail(Errc::ill_conditioned, "solve_coefficients: exponential system condition number over 1e12");
  const detail::LongCVec c = dec.solve(y);

  // DC term: the tau closest to zero, required within 1e-6.
  int dc_index = 0;
  for (int q = 1; q < K; ++q)
    if (std::abs(taus[static_cast<std::size_t>(q)]) <
        std::abs(taus[static_cast<std::size_t>(dc_index)]))
      dc_index = q;
  if (std::abs(taus[static_cast<std::size_t>(dc_index)]) >= 1e-6)
    fail(Errc::missing_dc, "solve_coefficients: no tau within 1e-6 of zero");

  CorrelationSet out;
  out.order = K;
  out.dc_power = static_cast<double>(c(dc_index).real());

  // Enforce the (tau, c) -> (-tau, conj(c)) closure by averaging each
  // positive tau with its mirrored partner.
  struct Raw {
    double tau;
    std::complex<long double> coeff;
  };
  std::vector<Raw> pos, neg;
  for (int q = 0; q < K; ++q) {
    if (q == dc_index) continue;
    const double tau = taus[static_cast<std::size_t>(q)];
    (tau > 0.0 ? pos : neg).push_back({tau, c(q)});
  }
  std::vector<bool> used(neg.size(), false);
  std::sort(pos.begin(), pos.end(), [](const Raw& a, const Raw& b) { return a.tau < b.tau; });
  for (const Raw& p : pos) {
    int best = -1;
    double best_gap = 0.0;
    for (std::size_t j = 0; j < neg.size(); ++j) {
      if (used[j]) continue;
      const double gap = std::abs(neg[j].tau + p.tau);
      if (best < 0 || gap < best_gap) {
        best = static_cast<int>(j);
        best_gap = gap;
      }
    }
    if (best >= 0 && best_gap <= 1e-6) {
      used[static_cast<std::size_t>(best)] = true;
      const Raw& n = neg[static_cast<std::size_t>(best)];
      const double tau_bar = 0.5 * (p.tau - n.tau);
      const std::complex<long double> c_bar = 0.5L * (p.coeff + std::conj(n.coeff));
      out.components.push_back(
          {tau_bar, Complex(static_cast<double>(c_bar.real()), static_cast<double>(c_bar.imag()))});
      out.components.push_back({-tau_bar, Complex(static_cast<double>(c_bar.real()),
                                                  -static_cast<double>(c_bar.imag()))});
    } else {
      out.components.push_back({p.tau, Complex(static_cast<double>(p.coeff.real()),
                                                static_cast<double>(p.coeff.imag()))});
    }
  }
  for (std::size_t j = 0; j < neg.size(); ++j) {
    if (!used[j])
      out.components.push_back({neg[j].tau, Complex(static_cast<double>(neg[j].coeff.real()),
                                                    static_cast<double>(neg[j].coeff.imag()))});
  }
  std::sort(out.components.begin(), out.components.end(),
            [](const CorrelationComponent& a, const CorrelationComponent& b) { return a.tau < b.tau; });
  return out;
}

/// Count of singular values above rel_tol * sigma_max.
inline int numerical_rank(const HankelPencil& pencil, double rel_tol = 1e-8) {
  const linalg::SvdFactors f = linalg::svd<double>(pencil.Y);
  if (f.singular_values.size() == 0) return 0;
  const double cutoff = rel_tol * f.singular_values(0);
  int rank = 0;
  for (Eigen::Index i = 0; i < f.singular_values.size(); ++i)
    if (f.singular_values(i) > cutoff) ++rank;
  return rank;
}

}  // namespace specres
