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

#ifndef CSB_PROTOCOL_HPP
#define CSB_PROTOCOL_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "csb/channel.hpp"

namespace csb {

/// Eigenstate superposition (|psi_a> + |psi_b>)/sqrt(2), or |psi_a> when a == b.
struct PreparationPair {
  int a = 0;
  int b = 0;
  CVector state;
  /// k_U at (a,a), (a,b), (b,a), (b,b).
  std::array<cplx, 4> ideal_eigenvalues{};
};

std::vector<PreparationPair> enumerate_preparations(const UnitaryGate& gate);
PreparationPair make_preparation(const UnitaryGate& gate, int a, int b);

struct DecayCurve {
  int a = 0;
  int b = 0;
  std::vector<int> depths;
  std::vector<double> p_hat;
  int shots = 0;
  bool exact = false;
};

/// Channels at the three circuit locations plus the ideal gate, pre-multiplied
/// into transfer matrices so that many depths and pairs can be evaluated cheaply.
class NoisyCircuit {
 public:
  NoisyCircuit(const UnitaryGate& gate, const QuantumChannel& gate_noise,
               const QuantumChannel& prep_noise, const QuantumChannel& meas_noise);

  int dim() const { return d_; }

  /// <<rho| G_E2 (G_E0 G_U)^L G_E1 |rho>> for L = 0..l_max.
  std::vector<double> survival_probabilities(const PreparationPair& pair, int l_max) const;

 private:
  int d_;
  CMatrix step_;
  CMatrix prep_;
  CMatrix meas_adjoint_;
};

double exact_survival_probability(const QuantumChannel& prep_noise,
                                  const QuantumChannel& gate_noise,
                                  const QuantumChannel& meas_noise, const UnitaryGate& gate,
                                  const PreparationPair& pair, int depth);

DecayCurve exact_curve(const NoisyCircuit& circuit, const PreparationPair& pair, int l_max);

/// Binomial shot sampling of each depth independently.
DecayCurve sample_curve(const std::vector<double>& exact, int shots, std::uint64_t seed);

/// master ^ (index * 0x9E3779B97F4A7C15)
std::uint64_t pair_seed(std::uint64_t master_seed, std::size_t pair_index);

struct ProtocolSettings {
  int l_max = 40;
  int shots = 1000;
  std::uint64_t seed = 0;
  bool exact = false;
};

/// One curve per enumerated pair, in enumeration order.
std::vector<DecayCurve> run_protocol(const UnitaryGate& gate, const QuantumChannel& gate_noise,
                                     const QuantumChannel& prep_noise,
                                     const QuantumChannel& meas_noise,
                                     const ProtocolSettings& settings);

}  // namespace csb

#endif  // CSB_PROTOCOL_HPP
