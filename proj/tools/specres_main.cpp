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

// Command-line front end: generate synthetic instances, measure Fourier
// intensities, run the two-stage recovery, verify reports against ground
// truth, and benchmark the sample-count threshold.
//
// Exit codes: 0 success, 1 no solution / verification failure, 2 usage or
// data error.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "specres/io.hpp"
#include "specres/specres.hpp"

namespace {

constexpr int kExitSuccess = 0;
constexpr int kExitNoSolution = 1;
constexpr int kExitError = 2;

struct GenerateArgs {
  int r = 0;
  std::uint64_t seed = 0;
  double diff_sep = 0.02;
  bool complex_amplitudes = false;
  int max_attempts = 100000;
  std::string out;
};

int run_generate(const GenerateArgs& args) {
  specres::GeneratorOptions opt;
  opt.diff_sep = args.diff_sep;
  opt.complex_amplitudes = args.complex_amplitudes;
  opt.max_attempts = args.max_attempts;
  const specres::SparseSignal signal = specres::generate_signal(args.r, args.seed, opt);
  const specres::AdmissibilityReport report = specres::check_admissibility(signal, args.diff_sep);

  specres::io::InstanceFile file;
  file.signal = signal;
  file.generator = specres::io::GeneratorInfo{args.seed, args.diff_sep, args.complex_amplitudes};
  specres::io::write_instance(args.out, file);

  std::cout << "wrote " << args.out << " (r = " << args.r << ", seed = " << args.seed << ")\n";
  std::cout << "admissible: " << (report.ok ? "yes" : "no") << "\n";
  for (const std::string& v : report.violations) std::cout << "  violation: " << v << "\n";
  return report.ok ? kExitSuccess : kExitError;
}

struct MeasureArgs {
  std::string instance_path;
  int m = 0;    // one of m / m_c is set
  int m_c = 0;
  std::string out;
};

int run_measure(const MeasureArgs& args) {
  int m_c = args.m_c;
  if (args.m > 0) {
    if (args.m % 2 != 0) {
      std::cerr << "error: --m must be even (m = 2 m_c samples at k = -m_c .. m_c-1)\n";
      return kExitError;
    }
    m_c = args.m / 2;
  }
  if (m_c < 1) {
    std::cerr << "error: need --m or --m-c with a positive value\n";
    return kExitError;
  }
  const specres::io::InstanceFile instance = specres::io::read_instance(args.instance_path);
  specres::io::MeasurementFile file;
  file.samples = specres::measure_intensities(instance.signal, m_c);
  specres::io::write_measurements(args.out, file);
  std::cout << "wrote " << args.out << " (" << file.samples.m() << " samples)\n";
  return kExitSuccess;
}

struct RecoverArgs {
  std::string measurements_path;
  int r = 0;
  bool estimate_r = false;
  specres::RecoveryConfig config;
  std::string out;
};

int run_recover(const RecoverArgs& args) {
  const specres::io::MeasurementFile file = specres::io::read_measurements(args.measurements_path);

  int r = args.r;
  if (args.estimate_r) {
    if (file.samples.m_c < 2) {
      std::cerr << "error: --estimate-r needs at least 4 samples\n";
      return kExitError;
    }
    r = specres::estimate_sparsity(specres::build_hankel(file.samples), args.config.rank_rel_tol);
    std::cout << "estimated sparsity r = " << r << "\n";
  }
  if (r < 1) {
    std::cerr << "error: need --r or --estimate-r\n";
    return kExitError;
  }

  try {
    const specres::RecoveryReport report = specres::recover(file.samples, r, args.config);
    specres::io::write_report(args.out, report);
    std::cout << "wrote " << args.out << " (" << report.solutions.size() << " solution"
              << (report.solutions.size() == 1 ? "" : "s") << ")\n";
    for (const specres::CandidateSolution& sol : report.solutions) {
      std::cout << "  branch " << (sol.branch > 0 ? "+" : "-") << "  |a_1| = " << sol.a1_hypothesis
                << "  residual = " << sol.residual << "\n";
    }
    return kExitSuccess;
  } catch (const specres::NoSolutionError& e) {
    specres::io::write_report(args.out, e.report());
    std::cerr << "no solution: wrote diagnostics to " << args.out << "\n";
    for (const specres::HypothesisDiagnostic& d : e.report().diagnostics)
      std::cerr << "  hypothesis " << d.hypothesis << ": " << d.outcome << "\n";
    return kExitNoSolution;
  }
}

struct VerifyArgs {
  std::string report_path;
  std::string instance_path;
  double tol = 1e-6;
};

int run_verify(const VerifyArgs& args) {
  const specres::RecoveryReport report = specres::io::read_report(args.report_path);
  const specres::io::InstanceFile instance = specres::io::read_instance(args.instance_path);
  if (report.sparsity != instance.signal.sparsity()) {
    std::cerr << "error: report sparsity " << report.sparsity << " does not match instance r = "
              << instance.signal.sparsity() << "\n";
    return kExitError;
  }
  if (report.solutions.empty()) {
    std::cerr << "verification failed: report contains no solutions\n";
    return kExitNoSolution;
  }
  double best = -1.0;
  for (std::size_t i = 0; i < report.solutions.size(); ++i) {
    const specres::AlignmentErrors e =
        specres::compare_solutions(report.solutions[i].signal, instance.signal);
    std::cout << "solution " << i << ": location_error = " << e.location_error
              << "  amplitude_error = " << e.amplitude_error << "\n";
    const double score = std::max(e.location_error, e.amplitude_error);
    if (best < 0.0 || score < best) best = score;
  }
  std::cout << "best aligned error: " << best << " (tolerance " << args.tol << ")\n";
  return best <= args.tol ? kExitSuccess : kExitNoSolution;
}

struct BenchArgs {
  std::vector<int> r_list;
  int trials = 100;
  double diff_sep = 0.02;
  std::uint64_t seed = 0;
  std::string out;
};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

int run_bench(const BenchArgs& args) {
  if (args.trials < 1) {
    std::cerr << "error: --trials must be >= 1\n";
    return kExitError;
  }
  std::ostringstream table;
  table << "r\tm\tsuccess_rate\tmax_aligned_error\tmedian_runtime_ms\n";

  for (int r : args.r_list) {
    if (r < 1) {
      std::cerr << "error: r must be >= 1\n";
      return kExitError;
    }
    const int threshold = 2 * r * r - 2 * r + 2;

    // Trial instances: deterministic seed scan, keeping admissible draws whose
    // threshold-size Hankel matrix is numerically rank complete (rank-deficient
    // data does not resolve the correlation structure at double precision).
    std::vector<specres::SparseSignal> instances;
    std::uint64_t stream = splitmix64(args.seed ^ splitmix64(static_cast<std::uint64_t>(r)));
    int scanned = 0;
    while (static_cast<int>(instances.size()) < args.trials && scanned < 1000 * args.trials) {
      ++scanned;
      stream = splitmix64(stream);
      specres::GeneratorOptions opt;
      opt.diff_sep = args.diff_sep;
      specres::SparseSignal candidate;
      try {
        candidate = specres::generate_signal(r, stream, opt);
      } catch (const specres::Error&) {
        continue;
      }
      if (specres::rank_complete(specres::measure_intensities(candidate, threshold / 2), r))
        instances.push_back(std::move(candidate));
    }
    if (static_cast<int>(instances.size()) < args.trials) {
      std::cerr << "error: could not generate " << args.trials << " rank-complete instances for r = "
                << r << "\n";
      return kExitError;
    }

    for (int m : {threshold - 2, threshold, threshold + 4}) {
      int successes = 0;
      double max_err = -1.0;
      std::vector<double> runtimes;
      for (const specres::SparseSignal& truth : instances) {
        const specres::IntensitySamples samples = specres::measure_intensities(truth, m / 2);
        const auto t0 = std::chrono::steady_clock::now();
        bool success = false;
        double err = -1.0;
        try {
          const specres::RecoveryReport report = specres::recover(samples, r);
          for (const specres::CandidateSolution& sol : report.solutions) {
            const specres::AlignmentErrors e = specres::compare_solutions(sol.signal, truth);
            const double score = std::max(e.location_error, e.amplitude_error);
            if (err < 0.0 || score < err) err = score;
          }
          success = err >= 0.0 && err <= 1e-6;
        } catch (const specres::Error&) {
          success = false;  // sample-count refusal or no solution
        }
        const auto t1 = std::chrono::steady_clock::now();
        runtimes.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
        if (success) {
          ++successes;
          max_err = std::max(max_err, err);
        }
      }
      std::sort(runtimes.begin(), runtimes.end());
      const double median = runtimes[runtimes.size() / 2];
      table << r << '\t' << m << '\t'
            << static_cast<double>(successes) / static_cast<double>(args.trials) << '\t';
      if (max_err >= 0.0)
        table << max_err;
      else
        table << "nan";
      table << '\t' << median << '\n';
    }
  }

  std::cout << table.str();
  if (!args.out.empty()) {
    std::ofstream out(args.out);
    if (!out) {
      std::cerr << "error: cannot write " << args.out << "\n";
      return kExitError;
    }
    out << table.str();
  }
  return kExitSuccess;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse super-resolution from low-pass Fourier intensity samples"};
  app.require_subcommand(1);

  GenerateArgs gen;
  CLI::App* cmd_generate = app.add_subcommand("generate", "Generate a random admissible instance");
  cmd_generate->add_option("--r", gen.r, "Number of spikes")->required();
  cmd_generate->add_option("--seed", gen.seed, "RNG seed")->envname("SPECRES_SEED");
  cmd_generate->add_option("--diff-sep", gen.diff_sep,
                           "Minimum gap among {|t_i - t_l|} including 0 (default 0.02)");
  cmd_generate->add_flag("--complex", gen.complex_amplitudes, "Draw complex amplitudes");
  cmd_generate->add_option("--max-attempts", gen.max_attempts, "Rejection sampling cap");
  cmd_generate->add_option("-o,--out", gen.out, "Instance file to write")->required();

  MeasureArgs meas;
  CLI::App* cmd_measure = app.add_subcommand("measure", "Measure Fourier intensity samples");
  cmd_measure->add_option("-i,--instance", meas.instance_path, "Instance file")->required();
  CLI::Option* opt_m = cmd_measure->add_option("--m", meas.m, "Total sample count (even)");
  cmd_measure->add_option("--m-c", meas.m_c, "Half sample count")->excludes(opt_m);
  cmd_measure->add_option("-o,--out", meas.out, "Measurement file to write")->required();

  RecoverArgs rec;
  CLI::App* cmd_recover = app.add_subcommand("recover", "Recover all compatible signals");
  cmd_recover->add_option("-i,--measurements", rec.measurements_path, "Measurement file")->required();
  CLI::Option* opt_r = cmd_recover->add_option("--r", rec.r, "Signal sparsity");
  cmd_recover->add_flag("--estimate-r", rec.estimate_r, "Estimate sparsity from the Hankel rank")
      ->excludes(opt_r);
  cmd_recover->add_option("--rank-rel-tol", rec.config.rank_rel_tol,
                          "Pseudo-inverse truncation (default 1e-8)");
  cmd_recover->add_option("--product-rel-tol", rec.config.product_rel_tol,
                          "Product matching tolerance (default 1e-6)");
  cmd_recover->add_option("--distance-rank-tol", rec.config.distance_rank_tol,
                          "Rank-1 test tolerance (default 1e-8)");
  cmd_recover->add_option("--distance-tol", rec.config.distance_tol,
                          "Distance reproduction tolerance (default 1e-8)");
  cmd_recover->add_option("--phase-match-tol", rec.config.phase_match_tol,
                          "Component lookup tolerance (default 1e-8)");
  cmd_recover->add_option("--phase-check-tol", rec.config.phase_check_tol,
                          "Phase consistency tolerance in radians (default 1e-6)");
  cmd_recover->add_option("--residual-rel-tol", rec.config.residual_rel_tol,
                          "Candidate validity threshold (default 1e-6)");
  cmd_recover->add_option("-o,--out", rec.out, "Report file to write")->required();

  VerifyArgs ver;
  CLI::App* cmd_verify = app.add_subcommand("verify", "Compare a report against ground truth");
  cmd_verify->add_option("-i,--report", ver.report_path, "Report file")->required();
  cmd_verify->add_option("--instance", ver.instance_path, "Ground-truth instance file")->required();
  cmd_verify->add_option("--tol", ver.tol, "Aligned error tolerance (default 1e-6)");

  BenchArgs bench;
  CLI::App* cmd_bench = app.add_subcommand("bench", "Sample-count threshold benchmark");
  cmd_bench->add_option("--r", bench.r_list, "Sparsity values (comma separated)")
      ->required()
      ->delimiter(',');
  cmd_bench->add_option("--trials", bench.trials, "Trials per (r, m) cell (default 100)");
  cmd_bench->add_option("--diff-sep", bench.diff_sep, "Separation condition (default 0.02)");
  cmd_bench->add_option("--seed", bench.seed, "Benchmark seed")->envname("SPECRES_SEED");
  cmd_bench->add_option("-o,--out", bench.out, "Optional table output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // exit 0 with help text
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (cmd_generate->parsed()) return run_generate(gen);
    if (cmd_measure->parsed()) return run_measure(meas);
    if (cmd_recover->parsed()) return run_recover(rec);
    if (cmd_verify->parsed()) return run_verify(ver);
    if (cmd_bench->parsed()) return run_bench(bench);
  } catch (const specres::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
