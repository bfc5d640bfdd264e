// Copyright 2026 The CSB Authors
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

#ifndef CSB_APP_HPP
#define CSB_APP_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "csb/estimation.hpp"
#include "csb/fitting.hpp"
#include "csb/io.hpp"
#include "csb/noise.hpp"

namespace csb {

inline constexpr const char* kConfigSchema = "csb.config/1";
inline constexpr const char* kReportSchema = "csb.report/1";
inline constexpr const char* kSidecarSchema = "csb.simulation/1";

/// Exit codes of the command line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitData = 3,
  kExitEstimation = 4,
};

struct ExperimentConfig {
  /// "toffoli", or a path to a JSON unitary (rows of [re, im]) relative to base_dir.
  std::string gate = "toffoli";

  /// Either calibrated noise or an explicit {"gate", "prep", "meas"} object.
  bool calibrated = true;
  double target_fidelity = 0.89;
  double calibration_tolerance = 0.005;
  double theta_ratio = kDefaultThetaRatio;
  Json explicit_noise;

  int shots = 1000;
  int l_max = 40;
  std::uint64_t seed = 1;

  ModelTag model = ModelTag::kSixTermOpt;
  SixTermOptions fit;
  int baseline_order = 4;

  EstimationSettings estimation;

  std::string output_dir = "csb_out";
  std::filesystem::path base_dir;
};

/// Parses and validates; throws ConfigError on any problem.
ExperimentConfig config_from_json(const Json& j, const std::filesystem::path& base_dir = {});
Json config_to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::filesystem::path& path);

UnitaryGate resolve_gate(const ExperimentConfig& config);

struct ResolvedNoise {
  NoiseTriple specs;
  std::optional<CalibrationResult> calibration;
  QuantumChannel gate;
  QuantumChannel prep;
  QuantumChannel meas;
};

ResolvedNoise resolve_noise(const ExperimentConfig& config, const UnitaryGate& gate);

struct SimulateOptions {
  std::filesystem::path out_dir;
  bool exact = false;
};

struct SimulateResult {
  std::filesystem::path curves_path;
  std::filesystem::path sidecar_path;
  double oracle_fidelity = 1.0;
};

/// Writes curves.json and curves.sidecar.json into out_dir.
SimulateResult cmd_simulate(const ExperimentConfig& config, const SimulateOptions& options);

struct ProcessOptions {
  std::filesystem::path curves_path;
  std::filesystem::path out_dir;
  bool baseline = false;
  bool svg = false;
};

/// Fits every curve, estimates, and writes report.json, fits.json and the
/// CSV (optionally SVG) plot data into out_dir.
FidelityReport cmd_process(const ExperimentConfig& config, const ProcessOptions& options);

/// Stable human-readable summary of a report file.
void cmd_report(const std::filesystem::path& report_path, std::ostream& out);
std::string format_report(const FidelityReport& report);

/// The sidecar path that cmd_simulate writes next to a curve file.
std::filesystem::path sidecar_path_for(const std::filesystem::path& curves_path);

}  // namespace csb

#endif  // CSB_APP_HPP
