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
#include <vector>

#include "specres/disentangle.hpp"
#include "specres/error.hpp"
#include "specres/model.hpp"

// Brute-force verifiers that deliberately share no code path with the
// recovery pipeline. The moduli search backtracks over raw product
// assignments instead of using the greedy max property, and the residual
// evaluator expands the autocorrelation double sum instead of squaring the
// Fourier series.

namespace specres::oracle {

struct OracleResult {
  std::vector<std::vector<double>> consistent_assignments;  // strictly decreasing vectors
  bool parametric_family = false;  // r = 2: one product constrains two moduli only up to a curve

  int count() const { return static_cast<int>(consistent_assignments.size()); }
};

namespace detail {

inline constexpr double kMatchRelTol = 1e-9;

inline bool close(double a, double b) {
  return std::abs(a - b) <= kMatchRelTol * std::max(std::abs(a), std::abs(b));
}

// Extends `chosen` one modulus at a time: every unused product element is
// tried as |a_1 a_next|, and the candidate survives only if all its products
// with the already chosen moduli can be consumed from the multiset.
inline void extend(const std::vector<double>& entries, std::vector<bool>& used,
                   std::vector<double>& chosen, int r,
                   std::vector<std::vector<double>>& results) {
  if (static_cast<int>(chosen.size()) == r) {
    if (std::find(used.begin(), used.end(), false) == used.end())
      results.push_back(chosen);
    return;
  }
  const double a1 = chosen.front();
  for (std::size_t u = 0; u < entries.size(); ++u) {
    if (used[u]) continue;
    const double next = entries[u] / a1;
    if (!(next < chosen.back())) continue;  // moduli must stay strictly decreasing
    std::vector<std::size_t> taken;
    bool ok = true;
    for (double prev : chosen) {
      const double target = prev * next;
      std::size_t best = entries.size();
      double best_gap = 0.0;
      for (std::size_t j = 0; j < entries.size(); ++j) {
        if (used[j]) continue;
        const double gap = std::abs(entries[j] - target);
        if (best == entries.size() || gap < best_gap) {
          best = j;
          best_gap = gap;
        }
      }
      if (best == entries.size() || !close(entries[best], target)) {
        ok = false;
        break;
      }
      used[best] = true;
      taken.push_back(best);
    }
    if (ok) {
      chosen.push_back(next);
      extend(entries, used, chosen, r, results);
      chosen.pop_back();
    }
    for (std::size_t j : taken) used[j] = false;
  }
}

inline bool same_vector(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!close(a[i], b[i])) return false;
  return true;
}

}  // namespace detail

/// Exhaustive search for every strictly decreasing moduli vector whose
/// pairwise-product multiset reproduces A. Anchored on ordered triples of
/// product elements hypothesized as (|a_1 a_2|, |a_1 a_3|, |a_2 a_3|); the
/// remaining moduli are found by backtracking over all unused elements.
inline OracleResult brute_force_moduli(const ProductSet& A, int r) {
  if (r > 6) fail(Errc::size, "brute_force_moduli: r > 6 is too expensive");
  if (r < 2) fail(Errc::invalid_argument, "brute_force_moduli: r must be >= 2");
  if (A.entries.size() != static_cast<std::size_t>(r) * (static_cast<std::size_t>(r) - 1) / 2)
    fail(Errc::invalid_argument, "brute_force_moduli: product set size does not match r");

  OracleResult result;
  if (r == 2) {
    // A single product |a_1 a_2| leaves (x, P/x) free for any x > sqrt(P).
    result.parametric_family = true;
    return result;
  }

  const std::vector<double> entries(A.entries);
  const std::size_t n = entries.size();
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v) {
      if (v == u || entries[v] > entries[u]) continue;  // need |a1 a2| >= |a1 a3|
      for (std::size_t w = 0; w < n; ++w) {
        if (w == u || w == v) continue;
        const double a1 = std::sqrt(entries[u] * entries[v] / entries[w]);
        const double a2 = entries[u] / a1;
        const double a3 = entries[v] / a1;
        if (!(a1 > a2 && a2 > a3 && a3 > 0.0)) continue;
        if (!detail::close(a2 * a3, entries[w])) continue;
        std::vector<bool> used(n, false);
        used[u] = used[v] = used[w] = true;
        std::vector<double> chosen{a1, a2, a3};
        detail::extend(entries, used, chosen, r, result.consistent_assignments);
      }
    }
  }

  // Deduplicate assignments reached through different anchors.
  std::vector<std::vector<double>> unique;
  for (const auto& vec : result.consistent_assignments) {
    const bool seen = std::any_of(unique.begin(), unique.end(), [&vec](const auto& other) {
      return detail::same_vector(vec, other);
    });
    if (!seen) unique.push_back(vec);
  }
  std::sort(unique.begin(), unique.end());
  result.consistent_assignments = std::move(unique);
  return result;
}

/// Residual of a signal against measurements, evaluated through the
/// autocorrelation expansion y[k] = sum_{i,l} a_i conj(a_l) e^{-j2pi(t_i-t_l)k}
/// rather than |sum_l a_l e^{-j2pi k t_l}|^2. Same normalization as
/// pipeline::validate_candidate; agreement between the two routes is itself a
/// test target.
inline double independent_residual(const SparseSignal& signal, const IntensitySamples& samples) {
  const int r = signal.sparsity();
  double max_y = 0.0;
  for (double v : samples.values) max_y = std::max(max_y, v);
  double worst = 0.0;
  for (int k = -samples.m_c; k < samples.m_c; ++k) {
    std::complex<double> acc{0.0, 0.0};
    for (int i = 0; i < r; ++i) {
      for (int l = 0; l < r; ++l) {
        const double tau = signal.locations[static_cast<std::size_t>(i)] -
                           signal.locations[static_cast<std::size_t>(l)];
        const double phase = -2.0 * std::numbers::pi * tau * static_cast<double>(k);
        acc += signal.amplitudes[static_cast<std::size_t>(i)] *
               std::conj(signal.amplitudes[static_cast<std::size_t>(l)]) *
               std::complex<double>{std::cos(phase), std::sin(phase)};
      }
    }
    worst = std::max(worst, std::abs(acc.real() - samples.at(k)));
  }
  return worst / std::max(1.0, max_y);
}

}  // namespace specres::oracle
