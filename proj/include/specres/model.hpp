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
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "specres/error.hpp"

namespace specres {

using Complex = std::complex<double>;

/// Spike train x(t) = sum_l a_l * delta(t - t_l) with complex amplitudes a_l
/// and locations t_l inside [0, 0.5). The half-period restriction keeps every
/// pairwise location difference inside (-0.5, 0.5), where integer-frequency
/// samples identify it uniquely.
struct SparseSignal {
  std::vector<Complex> amplitudes;
  std::vector<double> locations;

  int sparsity() const { return static_cast<int>(amplitudes.size()); }
};

/// Squared Fourier magnitudes y[k] = |x^(k)|^2 for k = -m_c .. m_c - 1,
/// stored in k order. m = 2 m_c samples total.
struct IntensitySamples {
  int m_c = 0;
  std::vector<double> values;

  int m() const { return 2 * m_c; }
  double at(int k) const { return values[static_cast<std::size_t>(k + m_c)]; }
};

struct AdmissibilityReport {
  bool ok = true;
  std::vector<std::string> violations;
};

/// k-th Fourier series coefficient of the spike train:
/// x^(k) = sum_l a_l exp(-j 2 pi k t_l).
inline Complex evaluate_fourier(const SparseSignal& signal, int k) {
  Complex sum{0.0, 0.0};
  for (int l = 0; l < signal.sparsity(); ++l) {
    const double phase = -2.0 * std::numbers::pi * static_cast<double>(k) * signal.locations[l];
    sum += signal.amplitudes[l] * Complex{std::cos(phase), std::sin(phase)};
  }
  return sum;
}

inline IntensitySamples measure_intensities(const SparseSignal& signal, int m_c) {
  if (m_c < 1) fail(Errc::invalid_argument, "measure_intensities: m_c must be >= 1");
  IntensitySamples out;
  out.m_c = m_c;
  out.values.resize(static_cast<std::size_t>(2 * m_c));
  for (int k = -m_c; k < m_c; ++k) {
    out.values[static_cast<std::size_t>(k + m_c)] = std::norm(evaluate_fourier(signal, k));
  }
  return out;
}

namespace detail {

// Indistinguishability thresholds for the admissibility conditions. These sit
// far below every pipeline matching tolerance (1e-6 / 1e-8).
inline constexpr double kEqualModulusRelTol = 1e-12;
inline constexpr double kEqualDifferenceTol = 1e-12;

inline std::vector<double> absolute_difference_set(const std::vector<double>& t) {
  std::vector<double> vals;
  vals.push_back(0.0);  // the i = l terms of the difference set
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t l = i + 1; l < t.size(); ++l) vals.push_back(std::abs(t[i] - t[l]));
  std::sort(vals.begin(), vals.end());
  return vals;
}

}  // namespace detail

/// Checks the recoverability conditions: locations inside [0, 0.5), pairwise
/// distinct amplitude moduli, pairwise distinct ordered location differences,
/// and (when diff_sep > 0) the minimum gap among {|t_i - t_l|} including the
/// zero element.
inline AdmissibilityReport check_admissibility(const SparseSignal& signal, double diff_sep) {
  AdmissibilityReport report;
  auto violate = [&report](const std::string& id) {
    report.ok = false;
    report.violations.push_back(id);
  };

  const int r = signal.sparsity();
  if (static_cast<int>(signal.locations.size()) != r) {
    violate("amplitude_location_count_mismatch");
    return report;
  }

  for (double t : signal.locations) {
    if (!(t >= 0.0 && t < 0.5)) {
      violate("location_out_of_box");
      break;
    }
  }

  for (const Complex& a : signal.amplitudes) {
    if (!(std::abs(a) > 0.0)) {
      violate("amplitude_modulus_not_positive");
      break;
    }
  }

  // Condition 1: |a_i| != |a_l| for all i != l.
  {
    bool equal_found = false;
    for (int i = 0; i < r && !equal_found; ++i) {
      for (int l = i + 1; l < r && !equal_found; ++l) {
        const double mi = std::abs(signal.amplitudes[static_cast<std::size_t>(i)]);
        const double ml = std::abs(signal.amplitudes[static_cast<std::size_t>(l)]);
        equal_found = std::abs(mi - ml) <= detail::kEqualModulusRelTol * std::max(mi, ml);
      }
    }
    if (equal_found) violate("amplitude_moduli_equal");
  }

  // Condition 2: all ordered differences t_i - t_l (i != l) pairwise distinct.
  {
    std::vector<double> diffs;
    for (int i = 0; i < r; ++i)
      for (int l = 0; l < r; ++l)
        if (i != l) diffs.push_back(signal.locations[static_cast<std::size_t>(i)] -
                                    signal.locations[static_cast<std::size_t>(l)]);
    std::sort(diffs.begin(), diffs.end());
    for (std::size_t i = 1; i < diffs.size(); ++i) {
      if (diffs[i] - diffs[i - 1] <= detail::kEqualDifferenceTol) {
        violate("duplicate_differences");
        break;
      }
    }
  }

  if (diff_sep > 0.0 && r >= 1) {
    const std::vector<double> vals = detail::absolute_difference_set(signal.locations);
    for (std::size_t i = 1; i < vals.size(); ++i) {
      if (vals[i] - vals[i - 1] < diff_sep) {
        violate("separation_below_minimum");
        break;
      }
    }
  }

  return report;
}

struct GeneratorOptions {
  double diff_sep = 0.02;
  bool complex_amplitudes = false;
  int max_attempts = 100000;
  double modulus_rel_gap = 1e-3;
};

namespace detail {

// The generator rolls its own uniform/normal transforms on top of the
// mt19937_64 stream so that equal seeds reproduce bitwise across toolchains
// (std::normal_distribution is implementation-defined).
inline double uniform01(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;  // strictly inside (0, 1)
}

inline double standard_normal(std::mt19937_64& rng) {
  const double u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline bool moduli_gaps_ok(const std::vector<Complex>& amps, double rel_gap) {
  std::vector<double> mods(amps.size());
  std::transform(amps.begin(), amps.end(), mods.begin(),
                 [](const Complex& a) { return std::abs(a); });
  std::sort(mods.begin(), mods.end());
  for (std::size_t i = 1; i < mods.size(); ++i) {
    if (mods[i] - mods[i - 1] < rel_gap * mods[i]) return false;
  }
  return !mods.empty() && mods.front() > 0.0;
}

}  // namespace detail

/// Draws an admissible random instance: locations uniform in (0, 0.5),
/// rejected until the separation condition holds; amplitudes standard normal
/// (optionally complex with independent real/imaginary parts), rejected until
/// the moduli are pairwise separated by the relative gap. Deterministic for a
/// fixed seed.
inline SparseSignal generate_signal(int r, std::uint64_t seed, const GeneratorOptions& opt) {
  if (r < 1) fail(Errc::invalid_argument, "generate_signal: r must be >= 1");
  if (opt.diff_sep < 0.0) fail(Errc::invalid_argument, "generate_signal: diff_sep must be >= 0");

  std::mt19937_64 rng(seed);
  SparseSignal signal;
  signal.locations.resize(static_cast<std::size_t>(r));

  bool ok = false;
  for (int attempt = 0; attempt < opt.max_attempts; ++attempt) {
    for (double& t : signal.locations) t = 0.5 * detail::uniform01(rng);
    const std::vector<double> vals = detail::absolute_difference_set(signal.locations);
    ok = true;
    for (std::size_t i = 1; i < vals.size() && ok; ++i) {
      ok = (vals[i] - vals[i - 1]) >= opt.diff_sep;
    }
    if (ok) break;
  }
  if (!ok) {
    fail(Errc::iteration_limit,
         "generate_signal: no location set satisfied the separation condition within " +
             std::to_string(opt.max_attempts) + " attempts (diff_sep likely infeasible)");
  }

  signal.amplitudes.resize(static_cast<std::size_t>(r));
  ok = false;
  for (int attempt = 0; attempt < opt.max_attempts; ++attempt) {
    for (Complex& a : signal.amplitudes) {
      const double re = detail::standard_normal(rng);
      const double im = opt.complex_amplitudes ? detail::standard_normal(rng) : 0.0;
      a = Complex{re, im};
    }
    if (detail::moduli_gaps_ok(signal.amplitudes, opt.modulus_rel_gap)) {
      ok = true;
      break;
    }
  }
  if (!ok) {
    fail(Errc::iteration_limit,
         "generate_signal: no amplitude draw satisfied the modulus gap within " +
             std::to_string(opt.max_attempts) + " attempts");
  }

  return signal;
}

inline SparseSignal generate_signal(int r, std::uint64_t seed, double diff_sep = 0.02) {
  GeneratorOptions opt;
  opt.diff_sep = diff_sep;
  return generate_signal(r, seed, opt);
}

}  // namespace specres
