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

#ifndef CSB_NOISE_HPP
#define CSB_NOISE_HPP

#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "csb/channel.hpp"

namespace csb {

QuantumChannel amplitude_damping(double gamma);

/// exp(-i theta Y / 2)
QuantumChannel y_rotation(double theta);

/// rho -> (1 - p) rho + p tr(rho) I / d, Kraus form over the Weyl operators.
QuantumChannel depolarizing(double p, int d = 2);

/// Kronecker product channel; factor 0 is the most significant qubit.
QuantumChannel tensor_channels(std::span<const QuantumChannel> factors);

/// later o earlier (earlier acts first).
QuantumChannel compose(const QuantumChannel& later, const QuantumChannel& earlier);

struct AmplitudeDampingFactor {
  double gamma = 0.0;
};
struct YRotationFactor {
  double theta = 0.0;
};
struct DepolarizingFactor {
  double p = 0.0;
};
using NoiseFactor = std::variant<AmplitudeDampingFactor, YRotationFactor, DepolarizingFactor>;

/// Single-qubit noise written as a composition, outermost first:
/// {AD, RY} means AD o RY, i.e. the rotation acts first.
struct QubitNoise {
  std::vector<NoiseFactor> factors;

  QuantumChannel channel() const;
};

enum class NoisePlacement { kGate, kPrep, kMeas };

/// Per-qubit noise for one circuit location.
struct NoiseSpec {
  NoisePlacement placement = NoisePlacement::kGate;
  std::vector<QubitNoise> qubits;

  QuantumChannel channel() const;
  static NoiseSpec uniform(NoisePlacement placement, const QubitNoise& q, int n_qubits);
};

/// Noise at the three circuit locations: gate (E0), preparation (E1) and
/// measurement (E2).
struct NoiseTriple {
  NoiseSpec gate;
  NoiseSpec prep;
  NoiseSpec meas;
};

/// The default per-qubit factor AD(gamma) o RY(ratio * gamma).
QubitNoise damped_rotation(double gamma, double theta_ratio);

struct CalibrationResult {
  double gamma = 0.0;
  double theta = 0.0;
  double theta_ratio = 0.0;
  double oracle_fidelity = 1.0;
  NoiseTriple noise;
};

class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kDefaultThetaRatio = 5.0;

///
/// Finds gamma such that the three-qubit noise (x)^3 [AD(gamma) o RY(ratio*gamma)]
/// composed after the gate has oracle process fidelity within tolerance of the
/// target. The search is a bisection over gamma on the first bracket where the
/// fidelity crosses the target, so the result is deterministic. The same
/// noise is placed at gate, preparation and measurement.
///
CalibrationResult calibrated_default_noise(const UnitaryGate& gate, double target_fidelity,
                                           double tolerance,
                                           double theta_ratio = kDefaultThetaRatio);

std::string to_string(NoisePlacement placement);

}  // namespace csb

#endif  // CSB_NOISE_HPP
