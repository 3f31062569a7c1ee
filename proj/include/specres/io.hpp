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

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "specres/error.hpp"
#include "specres/model.hpp"
#include "specres/pipeline.hpp"

// Persistence for the CLI artifacts. Everything is JSON with a
// schema_version/kind header. nlohmann::json serializes doubles in shortest
// round-trip form and sorts object keys, so write -> read -> write is
// byte-identical and exact-recovery claims survive the files.

namespace specres::io {

inline constexpr int kSchemaVersion = 1;

struct GeneratorInfo {
  std::uint64_t seed = 0;
  double diff_sep = 0.0;
  bool complex_amplitudes = false;
};

struct InstanceFile {
  SparseSignal signal;
  std::optional<GeneratorInfo> generator;
};

struct MeasurementFile {
  IntensitySamples samples;
};

namespace detail {

inline nlohmann::json signal_to_json(const SparseSignal& signal) {
  nlohmann::json amps = nlohmann::json::array();
  for (const Complex& a : signal.amplitudes) amps.push_back({a.real(), a.imag()});
  return nlohmann::json{{"amplitudes", std::move(amps)}, {"locations", signal.locations}};
}

inline SparseSignal signal_from_json(const nlohmann::json& j) {
  SparseSignal signal;
  if (!j.is_object() || !j.contains("amplitudes") || !j.contains("locations"))
    fail(Errc::file_format, "signal: expected amplitudes and locations");
  for (const auto& pair : j.at("amplitudes")) {
    if (!pair.is_array() || pair.size() != 2)
      fail(Errc::file_format, "signal: amplitudes must be [re, im] pairs");
    signal.amplitudes.emplace_back(pair[0].get<double>(), pair[1].get<double>());
  }
  signal.locations = j.at("locations").get<std::vector<double>>();
  if (signal.locations.size() != signal.amplitudes.size())
    fail(Errc::file_format, "signal: amplitude/location count mismatch");
  return signal;
}

inline nlohmann::json parse_file(const std::string& path, const std::string& expected_kind) {
  std::ifstream in(path);
  if (!in) fail(Errc::file_format, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::file_format, path + ": " + e.what());
  }
  if (!j.is_object() || j.value("schema_version", -1) != kSchemaVersion)
    fail(Errc::file_format, path + ": missing or unsupported schema_version");
  if (j.value("kind", "") != expected_kind)
    fail(Errc::file_format, path + ": expected kind '" + expected_kind + "'");
  return j;
}

inline void write_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) fail(Errc::file_format, "cannot write " + path);
  out << j.dump(2) << '\n';
  if (!out) fail(Errc::file_format, "write failed for " + path);
}

}  // namespace detail

inline void write_instance(const std::string& path, const InstanceFile& instance) {
  nlohmann::json j{{"schema_version", kSchemaVersion},
                   {"kind", "instance"},
                   {"signal", detail::signal_to_json(instance.signal)}};
  if (instance.generator) {
    j["generator"] = {{"seed", instance.generator->seed},
                      {"diff_sep", instance.generator->diff_sep},
                      {"complex_amplitudes", instance.generator->complex_amplitudes}};
  }
  detail::write_file(path, j);
}

inline InstanceFile read_instance(const std::string& path) {
  const nlohmann::json j = detail::parse_file(path, "instance");
  InstanceFile instance;
  instance.signal = detail::signal_from_json(j.at("signal"));
  if (j.contains("generator")) {
    const auto& g = j.at("generator");
    instance.generator = GeneratorInfo{g.value("seed", std::uint64_t{0}),
                                       g.value("diff_sep", 0.0),
                                       g.value("complex_amplitudes", false)};
  }
  return instance;
}

inline void write_measurements(const std::string& path, const MeasurementFile& file) {
  detail::write_file(path, nlohmann::json{{"schema_version", kSchemaVersion},
                                          {"kind", "measurements"},
                                          {"m_c", file.samples.m_c},
                                          {"values", file.samples.values}});
}

inline MeasurementFile read_measurements(const std::string& path) {
  const nlohmann::json j = detail::parse_file(path, "measurements");
  MeasurementFile file;
  file.samples.m_c = j.at("m_c").get<int>();
  file.samples.values = j.at("values").get<std::vector<double>>();
  if (file.samples.m_c < 1 ||
      static_cast<int>(file.samples.values.size()) != 2 * file.samples.m_c)
    fail(Errc::file_format, path + ": values length must equal 2 m_c");
  for (double v : file.samples.values)
    if (!std::isfinite(v) || v < 0.0)
      fail(Errc::file_format, path + ": intensities must be finite and nonnegative");
  return file;
}

inline void write_report(const std::string& path, const RecoveryReport& report) {
  nlohmann::json solutions = nlohmann::json::array();
  for (const CandidateSolution& sol : report.solutions) {
    solutions.push_back({{"signal", detail::signal_to_json(sol.signal)},
                         {"residual", sol.residual},
                         {"a1_hypothesis", sol.a1_hypothesis},
                         {"branch", sol.branch > 0 ? "+" : "-"}});
  }
  nlohmann::json diagnostics = nlohmann::json::array();
  for (const HypothesisDiagnostic& d : report.diagnostics) {
    diagnostics.push_back({{"hypothesis", d.hypothesis},
                           {"a1", d.a1},
                           {"branch", d.branch},
                           {"outcome", d.outcome}});
  }
  const RecoveryConfig& c = report.config;
  detail::write_file(
      path, nlohmann::json{{"schema_version", kSchemaVersion},
                           {"kind", "report"},
                           {"sparsity", report.sparsity},
                           {"solutions", std::move(solutions)},
                           {"diagnostics", std::move(diagnostics)},
                           {"config",
                            {{"rank_rel_tol", c.rank_rel_tol},
                             {"product_rel_tol", c.product_rel_tol},
                             {"distance_rank_tol", c.distance_rank_tol},
                             {"distance_tol", c.distance_tol},
                             {"phase_match_tol", c.phase_match_tol},
                             {"phase_check_tol", c.phase_check_tol},
                             {"residual_rel_tol", c.residual_rel_tol}}}});
}

inline RecoveryReport read_report(const std::string& path) {
  const nlohmann::json j = detail::parse_file(path, "report");
  RecoveryReport report;
  report.sparsity = j.at("sparsity").get<int>();
  for (const auto& s : j.at("solutions")) {
    CandidateSolution sol;
    sol.signal = detail::signal_from_json(s.at("signal"));
    sol.residual = s.at("residual").get<double>();
    sol.a1_hypothesis = s.at("a1_hypothesis").get<double>();
    sol.branch = s.at("branch").get<std::string>() == "+" ? +1 : -1;
    report.solutions.push_back(std::move(sol));
  }
  if (j.contains("diagnostics")) {
    for (const auto& d : j.at("diagnostics")) {
      report.diagnostics.push_back({d.value("hypothesis", -1), d.value("a1", 0.0),
                                    d.value("branch", 0), d.value("outcome", "")});
    }
  }
  if (j.contains("config")) {
    const auto& c = j.at("config");
    report.config.rank_rel_tol = c.value("rank_rel_tol", report.config.rank_rel_tol);
    report.config.product_rel_tol = c.value("product_rel_tol", report.config.product_rel_tol);
    report.config.distance_rank_tol = c.value("distance_rank_tol", report.config.distance_rank_tol);
    report.config.distance_tol = c.value("distance_tol", report.config.distance_tol);
    report.config.phase_match_tol = c.value("phase_match_tol", report.config.phase_match_tol);
    report.config.phase_check_tol = c.value("phase_check_tol", report.config.phase_check_tol);
    report.config.residual_rel_tol = c.value("residual_rel_tol", report.config.residual_rel_tol);
  }
  return report;
}

/// Reads a file fully; used by round-trip identity checks.
inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::file_format, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace specres::io
