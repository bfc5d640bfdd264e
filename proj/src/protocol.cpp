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

#include "csb/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

namespace csb {

namespace {

constexpr double kProbabilitySlack = 1e-9;

double checked_probability(cplx value) {
  if (std::abs(value.imag()) > kProbabilitySlack) {
    throw InvariantError("survival probability has an imaginary residue of " +
                         std::to_string(value.imag()));
  }
  const double p = value.real();
  if (p < -kProbabilitySlack || p > 1.0 + kProbabilitySlack) {
    throw InvariantError("survival probability out of range: " + std::to_string(p));
  }
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace

PreparationPair make_preparation(const UnitaryGate& gate, int a, int b) {
  const int d = gate.dim();
  if (a < 0 || b < a || b >= d) throw DimensionError("make_preparation: need 0 <= a <= b < d");
  const CMatrix& vecs = gate.eigenvectors();
  const CVector& lam = gate.eigenvalues();
  PreparationPair p;
  p.a = a;
  p.b = b;
  p.state = a == b ? CVector(vecs.col(a)) : CVector((vecs.col(a) + vecs.col(b)) / std::sqrt(2.0));
  p.ideal_eigenvalues = {lam(a) * std::conj(lam(a)), lam(a) * std::conj(lam(b)),
                         lam(b) * std::conj(lam(a)), lam(b) * std::conj(lam(b))};
  return p;
}

std::vector<PreparationPair> enumerate_preparations(const UnitaryGate& gate) {
  std::vector<PreparationPair> out;
  const int d = gate.dim();
  out.reserve(static_cast<std::size_t>(d * (d + 1) / 2));
  for (int a = 0; a < d; ++a) {
    for (int b = a; b < d; ++b) out.push_back(make_preparation(gate, a, b));
  }
  return out;
}

NoisyCircuit::NoisyCircuit(const UnitaryGate& gate, const QuantumChannel& gate_noise,
                           const QuantumChannel& prep_noise, const QuantumChannel& meas_noise)
    : d_(gate.dim()) {
  if (gate_noise.dim() != d_ || prep_noise.dim() != d_ || meas_noise.dim() != d_) {
    throw DimensionError("NoisyCircuit: channel dimensions do not match the gate");
  }
  const CMatrix& u = gate.matrix();
  const CMatrix g_u = Eigen::kroneckerProduct(u.conjugate(), u);
  step_ = gate_noise.transfer_matrix() * g_u;
  prep_ = prep_noise.transfer_matrix();
  meas_adjoint_ = meas_noise.transfer_matrix().adjoint();
}

std::vector<double> NoisyCircuit::survival_probabilities(const PreparationPair& pair,
                                                         int l_max) const {
  if (l_max < 0) throw DimensionError("survival_probabilities: negative depth");
  if (pair.state.size() != d_) throw DimensionError("survival_probabilities: state dimension");
  const CVector r = vectorize(pair.state * pair.state.adjoint());
  // <<r| G_E2 v = (G_E2^dagger r)^dagger v
  const CVector m = meas_adjoint_ * r;
  CVector v = prep_ * r;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(l_max + 1));
  for (int l = 0; l <= l_max; ++l) {
    out.push_back(checked_probability(m.dot(v)));
    v = step_ * v;
  }
  return out;
}

double exact_survival_probability(const QuantumChannel& prep_noise,
                                  const QuantumChannel& gate_noise,
                                  const QuantumChannel& meas_noise, const UnitaryGate& gate,
                                  const PreparationPair& pair, int depth) {
  const NoisyCircuit circuit(gate, gate_noise, prep_noise, meas_noise);
  return circuit.survival_probabilities(pair, depth).back();
}

DecayCurve exact_curve(const NoisyCircuit& circuit, const PreparationPair& pair, int l_max) {
  DecayCurve c;
  c.a = pair.a;
  c.b = pair.b;
  c.p_hat = circuit.survival_probabilities(pair, l_max);
  c.depths.resize(c.p_hat.size());
  for (std::size_t l = 0; l < c.depths.size(); ++l) c.depths[l] = static_cast<int>(l);
  c.shots = 0;
  c.exact = true;
  return c;
}

DecayCurve sample_curve(const std::vector<double>& exact, int shots, std::uint64_t seed) {
  if (shots < 1) throw InvariantError("sample_curve: shots must be positive");
  std::mt19937_64 rng(seed);
  DecayCurve c;
  c.shots = shots;
  c.exact = false;
  c.depths.reserve(exact.size());
  c.p_hat.reserve(exact.size());
  for (std::size_t l = 0; l < exact.size(); ++l) {
    const double p = exact[l];
    if (!(p >= 0.0 && p <= 1.0)) throw InvariantError("sample_curve: probability out of range");
    std::binomial_distribution<int> draw(shots, p);
    c.depths.push_back(static_cast<int>(l));
    c.p_hat.push_back(static_cast<double>(draw(rng)) / shots);
  }
  return c;
}

std::uint64_t pair_seed(std::uint64_t master_seed, std::size_t pair_index) {
  return master_seed ^ (static_cast<std::uint64_t>(pair_index) * 0x9E3779B97F4A7C15ULL);
}

std::vector<DecayCurve> run_protocol(const UnitaryGate& gate, const QuantumChannel& gate_noise,
                                     const QuantumChannel& prep_noise,
                                     const QuantumChannel& meas_noise,
                                     const ProtocolSettings& settings) {
  if (settings.l_max < 0) throw InvariantError("run_protocol: l_max must be non-negative");
  const NoisyCircuit circuit(gate, gate_noise, prep_noise, meas_noise);
  const auto pairs = enumerate_preparations(gate);
  std::vector<DecayCurve> curves;
  curves.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    DecayCurve exact = exact_curve(circuit, pairs[i], settings.l_max);
    if (settings.exact) {
      exact.shots = settings.shots;
      curves.push_back(std::move(exact));
      continue;
    }
    DecayCurve c = sample_curve(exact.p_hat, settings.shots, pair_seed(settings.seed, i));
    c.a = pairs[i].a;
    c.b = pairs[i].b;
    curves.push_back(std::move(c));
  }
  return curves;
}

}  // namespace csb
