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
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "specres/error.hpp"
#include "specres/linalg.hpp"
#include "specres/pencil.hpp"

// Step 2 of the recovery: starting from the unlabeled product set
// {|a_i a_l|}, a greedy sort recovers the amplitude moduli given |a_1|; the
// moduli label every correlation pair, which turns {|t_i - t_l|} into a
// labeled distance set; a centered rank-1 factorization embeds the distances
// on the line; the coefficient arguments then fix the amplitude phases up to
// one global rotation.

namespace specres {

/// Multiset {|a_i a_l| : i < l}, each unordered pair once, sorted descending.
struct ProductSet {
  std::vector<double> entries;

  static ProductSet from_correlations(const CorrelationSet& corr) {
    return ProductSet{corr.product_moduli()};
  }

  /// Builds the full pairwise product multiset of a moduli vector.
  static ProductSet from_moduli(const std::vector<double>& moduli) {
    ProductSet out;
    for (std::size_t i = 0; i < moduli.size(); ++i)
      for (std::size_t l = i + 1; l < moduli.size(); ++l)
        out.entries.push_back(moduli[i] * moduli[l]);
    std::sort(out.entries.begin(), out.entries.end(), std::greater<>());
    return out;
  }
};

namespace detail {

/// Sparsity r with r (r - 1) / 2 == pair_count, or an error when no integer fits.
inline int sparsity_from_pair_count(std::size_t pair_count) {
  const double root = (1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(pair_count))) / 2.0;
  const int r = static_cast<int>(std::lround(root));
  if (r < 2 || static_cast<std::size_t>(r) * (static_cast<std::size_t>(r) - 1) / 2 != pair_count)
    fail(Errc::invalid_argument, "product set size " + std::to_string(pair_count) +
                                     " is not r(r-1)/2 for any integer r >= 2");
  return r;
}

inline bool rel_close(double a, double b, double rel_tol) {
  return std::abs(a - b) <= rel_tol * std::max(std::abs(a), std::abs(b));
}

}  // namespace detail

/// Greedy recovery of (|a_1|, ..., |a_r|) from the product multiset given
/// |a_1|: the largest remaining product is always |a_1 a_i| for the next i, so
/// |a_i| = max / |a_1|; the products of a_i with the already recovered moduli
/// are then removed (matched within rel_tol). A missing removal target means
/// the |a_1| hypothesis is incompatible with the set.
inline std::vector<double> sort_magnitudes(const ProductSet& A, double a1_modulus,
                                           double rel_tol = 1e-6) {
  if (!(a1_modulus > 0.0)) fail(Errc::invalid_argument, "sort_magnitudes: |a_1| must be > 0");
  const int r = detail::sparsity_from_pair_count(A.entries.size());

  std::vector<double> entries(A.entries);
  std::sort(entries.begin(), entries.end(), std::greater<>());
  std::vector<bool> consumed(entries.size(), false);

  std::vector<double> moduli{a1_modulus};
  for (int i = 2; i <= r; ++i) {
    std::size_t top = 0;
    while (top < entries.size() && consumed[top]) ++top;
    const double a_i = entries[top] / a1_modulus;
    if (!(a_i < moduli.back()))
      fail(Errc::sort_consistency,
           "sort_magnitudes: recovered moduli not strictly decreasing at step " +
               std::to_string(i));
    // Remove |a_l a_i| for every already recovered l (l = 1 removes the max itself).
    for (double prev : moduli) {
      const double target = prev * a_i;
      std::size_t best = entries.size();
      double best_gap = 0.0;
      for (std::size_t j = 0; j < entries.size(); ++j) {
        if (consumed[j]) continue;
        const double gap = std::abs(entries[j] - target);
        if (best == entries.size() || gap < best_gap) {
          best = j;
          best_gap = gap;
        }
      }
      if (best == entries.size() || !detail::rel_close(entries[best], target, rel_tol))
        fail(Errc::sort_consistency, "sort_magnitudes: product |a_l a_i| missing at step " +
                                         std::to_string(i) + " (hypothesis incompatible)");
      consumed[best] = true;
    }
    moduli.push_back(a_i);
  }

  if (std::find(consumed.begin(), consumed.end(), false) != consumed.end())
    fail(Errc::sort_leftover, "sort_magnitudes: product set not exhausted");
  return moduli;
}

/// The |a_1| hypotheses of the exhaustive search: with p1 >= p2 the two
/// largest products (|a_1 a_2| and |a_1 a_3|), |a_2 a_3| must be one of the
/// next r - 2 elements s*, giving |a_1| = sqrt(p1 p2 / s*). Ordered by
/// descending s*; the true |a_1| is always among the candidates.
inline std::vector<double> enumerate_a1_candidates(const ProductSet& A, int r) {
  if (r < 3) fail(Errc::size, "enumerate_a1_candidates: needs r >= 3");
  if (A.entries.size() != static_cast<std::size_t>(r) * (static_cast<std::size_t>(r) - 1) / 2)
    fail(Errc::invalid_argument, "enumerate_a1_candidates: product set size does not match r");

  std::vector<double> entries(A.entries);
  std::sort(entries.begin(), entries.end(), std::greater<>());
  const double p1 = entries[0];
  const double p2 = entries[1];
  std::vector<double> candidates;
  for (int j = 0; j < r - 2; ++j) {
    const double s_star = entries[static_cast<std::size_t>(2 + j)];
    candidates.push_back(std::sqrt(p1 * p2 / s_star));
  }
  return candidates;
}

/// One labeled unordered pair: indices are 0-based with i < l.
struct PairLabel {
  int i = 0;
  int l = 0;
  double product = 0.0;   // |a_i a_l|
  double distance = 0.0;  // |t_i - t_l|
};

struct LabeledPairs {
  int r = 0;
  std::vector<PairLabel> pairs;  // all r(r-1)/2 pairs, each exactly once
};

/// Matches every index pair (i, l) to the conjugate component pair whose
/// coefficient modulus equals |a_i| |a_l|, revealing the distance |t_i - t_l|.
/// Ambiguous product tables (two pairs within rel_tol) are reported as a
/// collision, never guessed.
inline LabeledPairs label_products(const std::vector<double>& moduli, const CorrelationSet& corr,
                                   double rel_tol = 1e-6) {
  const int r = static_cast<int>(moduli.size());
  if (r < 2) fail(Errc::invalid_argument, "label_products: needs r >= 2");
  for (int i = 1; i < r; ++i)
    if (!(moduli[static_cast<std::size_t>(i)] < moduli[static_cast<std::size_t>(i - 1)]))
      fail(Errc::invalid_argument, "label_products: moduli must be strictly decreasing");
  if (static_cast<int>(corr.components.size()) != r * r - r)
    fail(Errc::invalid_argument, "label_products: expected r^2 - r correlation components");

  struct Measured {
    double modulus;
    double distance;
  };
  std::vector<Measured> measured;
  for (const CorrelationComponent& c : corr.components)
    if (c.tau > 0.0) measured.push_back({std::abs(c.coeff), c.tau});
  if (measured.size() != static_cast<std::size_t>(r) * (static_cast<std::size_t>(r) - 1) / 2)
    fail(Errc::invalid_argument, "label_products: components are not in conjugate pairs");

  struct Expected {
    int i;
    int l;
    double product;
  };
  std::vector<Expected> expected;
  for (int i = 0; i < r; ++i)
    for (int l = i + 1; l < r; ++l)
      expected.push_back({i, l,
                          moduli[static_cast<std::size_t>(i)] * moduli[static_cast<std::size_t>(l)]});

  // Ambiguity check on the hypothesis side.
  for (std::size_t u = 0; u < expected.size(); ++u)
    for (std::size_t v = u + 1; v < expected.size(); ++v)
      if (detail::rel_close(expected[u].product, expected[v].product, rel_tol))
        fail(Errc::product_collision,
             "label_products: pairs (" + std::to_string(expected[u].i + 1) + "," +
                 std::to_string(expected[u].l + 1) + ") and (" + std::to_string(expected[v].i + 1) +
                 "," + std::to_string(expected[v].l + 1) +
                 ") have product moduli within tolerance; labeling is ambiguous");

  std::sort(expected.begin(), expected.end(),
            [](const Expected& a, const Expected& b) { return a.product > b.product; });

  LabeledPairs out;
  out.r = r;
  std::vector<bool> used(measured.size(), false);
  for (const Expected& e : expected) {
    std::size_t best = measured.size();
    double best_gap = 0.0;
    for (std::size_t j = 0; j < measured.size(); ++j) {
      if (used[j]) continue;
      const double gap = std::abs(measured[j].modulus - e.product);
      if (best == measured.size() || gap < best_gap) {
        best = j;
        best_gap = gap;
      }
    }
    if (best == measured.size() || !detail::rel_close(measured[best].modulus, e.product, rel_tol))
      fail(Errc::label_mismatch, "label_products: no component matches |a_" +
                                     std::to_string(e.i + 1) + " a_" + std::to_string(e.l + 1) +
                                     "| within tolerance");
    used[best] = true;
    out.pairs.push_back({e.i, e.l, e.product, measured[best].distance});
  }
  std::sort(out.pairs.begin(), out.pairs.end(), [](const PairLabel& a, const PairLabel& b) {
    return a.i != b.i ? a.i < b.i : a.l < b.l;
  });
  return out;
}

/// One branch of the line embedding, canonicalized to min(t) = 0.
struct LocationSolution {
  std::vector<double> t;
  int branch = +1;  // +1: sqrt(lambda_1) u_1, -1: reflected
};

/// Recovers spike locations from the labeled distances: with D the squared
/// distance matrix and V the centering matrix I - (1/r) 1 1^T, the matrix
/// -V D V / 2 equals the centered Gram matrix V t t^T V, which must be rank
/// one with positive top eigenvalue; the two sign choices of its top
/// eigenvector give the two reflection branches.
inline std::vector<LocationSolution> solve_locations(const LabeledPairs& pairs,
                                                     double rank_rel_tol = 1e-8,
                                                     double distance_tol = 1e-8) {
  const int r = pairs.r;
  if (r < 2) fail(Errc::invalid_argument, "solve_locations: needs r >= 2");
  if (pairs.pairs.size() != static_cast<std::size_t>(r) * (static_cast<std::size_t>(r) - 1) / 2)
    fail(Errc::invalid_argument, "solve_locations: incomplete distance set");

  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(r, r);
  for (const PairLabel& p : pairs.pairs) {
    D(p.i, p.l) = p.distance * p.distance;
    D(p.l, p.i) = D(p.i, p.l);
  }
  const Eigen::MatrixXd V =
      Eigen::MatrixXd::Identity(r, r) - Eigen::MatrixXd::Constant(r, r, 1.0 / r);
  Eigen::MatrixXd M = -0.5 * (V * D * V);
  M = 0.5 * (M + M.transpose());  // scrub rounding asymmetry

  const linalg::SymmetricEigen eig = linalg::eig_symmetric<double>(M);
  const double lambda1 = eig.values(0);
  if (!(lambda1 > 0.0))
    fail(Errc::rank, "solve_locations: centered Gram matrix has no positive eigenvalue");
  double second = 0.0;
  for (Eigen::Index i = 1; i < eig.values.size(); ++i)
    second = std::max(second, std::abs(eig.values(i)));
  if (second > rank_rel_tol * lambda1)
    fail(Errc::rank, "solve_locations: centered Gram matrix is not numerically rank one "
                     "(distances do not embed on a line)");

  const Eigen::VectorXd base = std::sqrt(lambda1) * eig.vectors.col(0);

  std::vector<LocationSolution> out;
  std::string last_box_failure;
  for (int branch : {+1, -1}) {
    LocationSolution sol;
    sol.branch = branch;
    Eigen::VectorXd t = branch > 0 ? base : Eigen::VectorXd(-base);
    t.array() -= t.minCoeff();
    sol.t.assign(t.data(), t.data() + t.size());

    for (const PairLabel& p : pairs.pairs) {
      const double got = std::abs(sol.t[static_cast<std::size_t>(p.i)] -
                                  sol.t[static_cast<std::size_t>(p.l)]);
      if (std::abs(got - p.distance) > distance_tol)
        fail(Errc::rank, "solve_locations: branch does not reproduce |t_i - t_l| within tolerance");
    }
    if (t.maxCoeff() >= 0.5) {
      last_box_failure = "branch span >= 0.5";
      continue;
    }
    out.push_back(std::move(sol));
  }
  if (out.empty()) fail(Errc::box, "solve_locations: no branch fits inside [0, 0.5): " + last_box_failure);
  return out;
}

namespace detail {

inline const CorrelationComponent* find_component(const CorrelationSet& corr, double tau,
                                                  double tol) {
  const CorrelationComponent* best = nullptr;
  double best_gap = 0.0;
  for (const CorrelationComponent& c : corr.components) {
    const double gap = std::abs(c.tau - tau);
    if (best == nullptr || gap < best_gap) {
      best = &c;
      best_gap = gap;
    }
  }
  return (best != nullptr && best_gap <= tol) ? best : nullptr;
}

inline double wrap_angle(double x) {
  return std::remainder(x, 2.0 * std::numbers::pi);
}

}  // namespace detail

/// Amplitude phases for one location branch: each signed difference
/// t_i - t_l selects the correlation component carrying arg(a_i) - arg(a_l).
/// arg(a_1) is pinned to 0 and the star {(1, i)} determines the rest; every
/// remaining pair must agree within check_tol or the branch is rejected.
inline std::vector<double> solve_phases(const LabeledPairs& pairs, const LocationSolution& location,
                                        const CorrelationSet& corr, double match_tol = 1e-8,
                                        double check_tol = 1e-6) {
  const int r = pairs.r;
  if (static_cast<int>(location.t.size()) != r)
    fail(Errc::invalid_argument, "solve_phases: location size does not match pairs");

  std::vector<double> phases(static_cast<std::size_t>(r), 0.0);
  for (int i = 1; i < r; ++i) {
    const double delta = location.t[0] - location.t[static_cast<std::size_t>(i)];
    const CorrelationComponent* c = detail::find_component(corr, delta, match_tol);
    if (c == nullptr)
      fail(Errc::phase_inconsistency,
           "solve_phases: no component at t_1 - t_" + std::to_string(i + 1));
    phases[static_cast<std::size_t>(i)] = -std::arg(c->coeff);  // arg a_1 := 0
  }

  for (const PairLabel& p : pairs.pairs) {
    if (p.i == 0) continue;  // star pairs define the phases
    const double delta = location.t[static_cast<std::size_t>(p.i)] -
                         location.t[static_cast<std::size_t>(p.l)];
    const CorrelationComponent* c = detail::find_component(corr, delta, match_tol);
    if (c == nullptr)
      fail(Errc::phase_inconsistency, "solve_phases: no component at t_" + std::to_string(p.i + 1) +
                                          " - t_" + std::to_string(p.l + 1));
    const double mismatch = detail::wrap_angle(
        std::arg(c->coeff) - (phases[static_cast<std::size_t>(p.i)] -
                              phases[static_cast<std::size_t>(p.l)]));
    if (std::abs(mismatch) > check_tol)
      fail(Errc::phase_inconsistency,
           "solve_phases: pair (" + std::to_string(p.i + 1) + "," + std::to_string(p.l + 1) +
               ") phase off by " + std::to_string(mismatch) + " rad");
  }
  return phases;
}

}  // namespace specres
