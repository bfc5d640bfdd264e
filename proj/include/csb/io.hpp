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

#ifndef CSB_IO_HPP
#define CSB_IO_HPP

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "csb/channel.hpp"
#include "csb/estimation.hpp"
#include "csb/fitting.hpp"
#include "csb/noise.hpp"
#include "csb/protocol.hpp"

namespace csb {

using Json = nlohmann::json;

/// Malformed or inconsistent configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent data file.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// [[ [re, im], ... ], ...], row major.
Json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const Json& j);

Json complex_to_json(cplx z);
cplx complex_from_json(const Json& j);

/// {"type": "amplitude_damping", "gamma": ...} and friends.
Json noise_factor_to_json(const NoiseFactor& f);
NoiseFactor noise_factor_from_json(const Json& j);

/// {"placement": ..., "qubits": [[factor, ...], ...]}; the short form
/// {"per_qubit": [factor, ...]} repeats one list on n_qubits qubits.
Json noise_spec_to_json(const NoiseSpec& spec);
NoiseSpec noise_spec_from_json(const Json& j, NoisePlacement placement, int n_qubits);

/// Flat array of {"a", "b", "L", "p_hat", "shots"} records.
Json curves_to_json(const std::vector<DecayCurve>& curves);
std::vector<DecayCurve> curves_from_json(const Json& j);

Json fit_to_json(const ExponentialFit& fit);
ExponentialFit fit_from_json(const Json& j);
Json fits_to_json(const std::vector<ExponentialFit>& fits);
std::vector<ExponentialFit> fits_from_json(const Json& j);

Json report_to_json(const FidelityReport& report);
FidelityReport report_from_json(const Json& j);

Json read_json_file(const std::filesystem::path& path);
/// Pretty-printed with a trailing newline.
void write_json_file(const std::filesystem::path& path, const Json& j);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace csb

#endif  // CSB_IO_HPP
