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

#include "csb/noise.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

namespace csb {

namespace {

void require_unit_interval(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw InvariantError(std::string(what) + " must lie in [0, 1], got " + std::to_string(v));
  }
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

QuantumChannel amplitude_damping(double gamma) {
  require_unit_interval(gamma, "amplitude_damping: gamma");
  CMatrix k0 = CMatrix::Zero(2, 2);
  k0(0, 0) = 1.0;
  k0(1, 1) = std::sqrt(1.0 - gamma);
  CMatrix k1 = CMatrix::Zero(2, 2);
  k1(0, 1) = std::sqrt(gamma);
  return QuantumChannel({k0, k1});
}

QuantumChannel y_rotation(double theta) {
  if (!std::isfinite(theta)) throw InvariantError("y_rotation: theta must be finite");
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  CMatrix r(2, 2);
  r << c, -s, s, c;
  return QuantumChannel::unitary(r);
}

QuantumChannel depolarizing(double p, int d) {
  require_unit_interval(p, "depolarizing: p");
  if (d < 1) throw DimensionError("depolarizing: dimension must be positive");
  // With W_jk = X^j Z^k, sum_jk W rho W^dagger = d tr(rho) I.
  const double pi = std::numbers::pi;
  CMatrix shift = CMatrix::Zero(d, d);
  CMatrix clock = CMatrix::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    shift((k + 1) % d, k) = 1.0;
    clock(k, k) = std::polar(1.0, 2.0 * pi * k / d);
  }
  std::vector<CMatrix> kraus;
  const double d2 = static_cast<double>(d) * d;
  CMatrix xj = CMatrix::Identity(d, d);
  for (int j = 0; j < d; ++j) {
    CMatrix w = xj;
    for (int k = 0; k < d; ++k) {
      const double weight = (j == 0 && k == 0) ? std::sqrt(1.0 - p + p / d2) : std::sqrt(p / d2);
      if (weight > 0.0) kraus.push_back(weight * w);
      w = w * clock;
    }
    xj = shift * xj;
  }
  return QuantumChannel(std::move(kraus));
}

QuantumChannel tensor_channels(std::span<const QuantumChannel> factors) {
  if (factors.empty()) throw DimensionError("tensor_channels: no factors");
  std::vector<CMatrix> acc = {CMatrix::Identity(1, 1)};
  for (const auto& f : factors) {
    std::vector<CMatrix> next;
    next.reserve(acc.size() * f.kraus().size());
    for (const auto& a : acc) {
      for (const auto& k : f.kraus()) next.push_back(Eigen::kroneckerProduct(a, k).eval());
    }
    acc = std::move(next);
  }
  return QuantumChannel(std::move(acc));
}

QuantumChannel compose(const QuantumChannel& later, const QuantumChannel& earlier) {
  if (later.dim() != earlier.dim()) throw DimensionError("compose: dimension mismatch");
  std::vector<CMatrix> kraus;
  kraus.reserve(later.kraus().size() * earlier.kraus().size());
  for (const auto& l : later.kraus()) {
    for (const auto& e : earlier.kraus()) kraus.push_back(l * e);
  }
  return QuantumChannel(std::move(kraus));
}

QuantumChannel QubitNoise::channel() const {
  QuantumChannel out = QuantumChannel::identity(2);
  // Outermost first, so fold from the right: the last factor acts first.
  for (auto it = factors.rbegin(); it != factors.rend(); ++it) {
    const QuantumChannel step = std::visit(
        Overloaded{[](const AmplitudeDampingFactor& f) { return amplitude_damping(f.gamma); },
                   [](const YRotationFactor& f) { return y_rotation(f.theta); },
                   [](const DepolarizingFactor& f) { return depolarizing(f.p, 2); }},
        *it);
    out = compose(step, out);
  }
  return out;
}

QuantumChannel NoiseSpec::channel() const {
  if (qubits.empty()) throw DimensionError("NoiseSpec: no qubits");
  std::vector<QuantumChannel> per_qubit;
  per_qubit.reserve(qubits.size());
  for (const auto& q : qubits) per_qubit.push_back(q.channel());
  return tensor_channels(per_qubit);
}

NoiseSpec NoiseSpec::uniform(NoisePlacement placement, const QubitNoise& q, int n_qubits) {
  NoiseSpec spec;
  spec.placement = placement;
  spec.qubits.assign(static_cast<std::size_t>(n_qubits), q);
  return spec;
}

QubitNoise damped_rotation(double gamma, double theta_ratio) {
  return QubitNoise{{AmplitudeDampingFactor{gamma}, YRotationFactor{theta_ratio * gamma}}};
}

CalibrationResult calibrated_default_noise(const UnitaryGate& gate, double target_fidelity,
                                           double tolerance, double theta_ratio) {
  if (!(target_fidelity > 0.5 && target_fidelity <= 1.0)) {
    throw CalibrationError("calibration target must lie in (0.5, 1]");
  }
  const int d = gate.dim();
  int n_qubits = 0;
  while ((1 << n_qubits) < d) ++n_qubits;
  if ((1 << n_qubits) != d) throw DimensionError("calibration needs a qubit register");

  const QuantumChannel u = QuantumChannel::unitary(gate.matrix());
  auto fidelity_at = [&](double gamma) {
    const QuantumChannel e =
        NoiseSpec::uniform(NoisePlacement::kGate, damped_rotation(gamma, theta_ratio), n_qubits)
            .channel();
    return process_fidelity(gate, compose(e, u));
  };

  double lo = 0.0;
  double f_lo = fidelity_at(lo);
  double gamma = 0.0;
  double f = f_lo;
  if (std::abs(f_lo - target_fidelity) > tolerance) {
    // Scan for the first bracket, then bisect inside it.
    constexpr int kGrid = 64;
    double hi = lo;
    double f_hi = f_lo;
    bool found = false;
    for (int k = 1; k <= kGrid; ++k) {
      hi = static_cast<double>(k) / kGrid;
      f_hi = fidelity_at(hi);
      if ((f_lo - target_fidelity) * (f_hi - target_fidelity) <= 0.0) {
        found = true;
        break;
      }
      lo = hi;
      f_lo = f_hi;
    }
    if (!found) throw CalibrationError("calibration target is not reachable");
    for (int it = 0; it < 200; ++it) {
      gamma = 0.5 * (lo + hi);
      f = fidelity_at(gamma);
      if (std::abs(f - target_fidelity) <= 1e-3 * tolerance || hi - lo < 1e-15) break;
      if ((f_lo - target_fidelity) * (f - target_fidelity) <= 0.0) {
        hi = gamma;
      } else {
        lo = gamma;
        f_lo = f;
      }
    }
    if (std::abs(f - target_fidelity) > tolerance) {
      throw CalibrationError("calibration did not reach the requested tolerance");
    }
  }

  CalibrationResult out;
  out.gamma = gamma;
  out.theta_ratio = theta_ratio;
  out.theta = theta_ratio * gamma;
  out.oracle_fidelity = f;
  const QubitNoise q = damped_rotation(gamma, theta_ratio);
  out.noise.gate = NoiseSpec::uniform(NoisePlacement::kGate, q, n_qubits);
  out.noise.prep = NoiseSpec::uniform(NoisePlacement::kPrep, q, n_qubits);
  out.noise.meas = NoiseSpec::uniform(NoisePlacement::kMeas, q, n_qubits);
  return out;
}

std::string to_string(NoisePlacement placement) {
  switch (placement) {
    case NoisePlacement::kGate:
      return "gate";
    case NoisePlacement::kPrep:
      return "prep";
    case NoisePlacement::kMeas:
      return "meas";
  }
  return "gate";
}

}  // namespace csb
