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

#include <stdexcept>
#include <string>

namespace specres {

/// Failure categories surfaced by the library. Recovery treats most of them
/// as per-hypothesis diagnostics rather than hard aborts.
enum class Errc {
  invalid_argument,   // precondition violated by the caller
  iteration_limit,    // rejection sampling exhausted its attempt budget
  non_convergence,    // iterative factorization did not converge
  not_symmetric,      // eig_symmetric input fails the symmetry tolerance
  size,               // dimension/shape requirement violated
  model_order,        // pencil rank inconsistent with the requested order
  modulus,            // pencil eigenvalue too far from the unit circle
  ill_conditioned,    // linear system condition number above threshold
  missing_dc,         // no correlation component at tau ~ 0
  sort_consistency,   // Algorithm-1 removal target absent
  sort_leftover,      // Algorithm-1 finished with unconsumed products
  product_collision,  // two index pairs share a product modulus
  label_mismatch,     // no correlation component matches an expected product
  rank,               // centered squared-distance matrix not rank one
  box,                // no location branch fits inside [0, 0.5)
  phase_inconsistency,// pairwise phases incompatible with a consistent labeling
  sample_count,       // fewer measurements than 2r^2 - 2r + 2
  no_solution,        // no hypothesis produced a valid candidate
  sparsity_mismatch,  // comparing signals of different sparsity
  file_format,        // persisted artifact malformed
};

inline const char* to_string(Errc code) {
  switch (code) {
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::iteration_limit: return "iteration_limit";
    case Errc::non_convergence: return "non_convergence";
    case Errc::not_symmetric: return "not_symmetric";
    case Errc::size: return "size";
    case Errc::model_order: return "model_order";
    case Errc::modulus: return "modulus";
    case Errc::ill_conditioned: return "ill_conditioned";
    case Errc::missing_dc: return "missing_dc";
    case Errc::sort_consistency: return "sort_consistency";
    case Errc::sort_leftover: return "sort_leftover";
    case Errc::product_collision: return "product_collision";
    case Errc::label_mismatch: return "label_mismatch";
    case Errc::rank: return "rank";
    case Errc::box: return "box";
    case Errc::phase_inconsistency: return "phase_inconsistency";
    case Errc::sample_count: return "sample_count";
    case Errc::no_solution: return "no_solution";
    case Errc::sparsity_mismatch: return "sparsity_mismatch";
    case Errc::file_format: return "file_format";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace specres
