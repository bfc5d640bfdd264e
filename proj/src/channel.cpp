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

#include "csb/channel.hpp"

#include <cmath>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <unsupported/Eigen/KroneckerProduct>

namespace csb {

namespace {

void require_square(const CMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw DimensionError(std::string(what) + ": expected a non-empty square matrix, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

}  // namespace

double max_abs_deviation(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("max_abs_deviation: shape mismatch");
  }
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

CVector vectorize(const CMatrix& rho) {
  require_square(rho, "vectorize");
  const Eigen::Index d = rho.rows();
  CVector v(d * d);
  for (Eigen::Index c = 0; c < d; ++c) {
    for (Eigen::Index r = 0; r < d; ++r) v(r + c * d) = rho(r, c);
  }
  return v;
}

CMatrix devectorize(const CVector& v) {
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (d == 0 || d * d != v.size()) {
    throw DimensionError("devectorize: length " + std::to_string(v.size()) + " is not a square");
  }
  CMatrix rho(d, d);
  for (Eigen::Index c = 0; c < d; ++c) {
    for (Eigen::Index r = 0; r < d; ++r) rho(r, c) = v(r + c * d);
  }
  return rho;
}

// ---------------------------------------------------------------------------
// UnitaryGate

UnitaryGate::UnitaryGate(CMatrix u) : u_(std::move(u)) {
  require_square(u_, "UnitaryGate");
  Eigen::ComplexSchur<CMatrix> schur(u_);
  if (schur.info() != Eigen::Success) {
    throw InvariantError("UnitaryGate: Schur decomposition failed");
  }
  // For a normal matrix the triangular factor is diagonal, so the Schur
  // vectors are an orthonormal eigenbasis.
  a_ = schur.matrixU();
  lambda_ = schur.matrixT().diagonal();
  for (Eigen::Index k = 0; k < lambda_.size(); ++k) {
    const double m = std::abs(lambda_(k));
    if (m > 0) lambda_(k) /= m;
  }
  validate();
}

UnitaryGate::UnitaryGate(CMatrix u, CMatrix eigenvectors, CVector eigenvalues)
    : u_(std::move(u)), a_(std::move(eigenvectors)), lambda_(std::move(eigenvalues)) {
  require_square(u_, "UnitaryGate");
  if (a_.rows() != u_.rows() || a_.cols() != u_.cols() || lambda_.size() != u_.rows()) {
    throw DimensionError("UnitaryGate: eigenbasis does not match the gate dimension");
  }
  validate();
}

void UnitaryGate::validate() const {
  const auto d = u_.rows();
  const CMatrix id = CMatrix::Identity(d, d);
  if (max_abs_deviation(u_ * u_.adjoint(), id) > kValidationTol) {
    throw InvariantError("UnitaryGate: matrix is not unitary");
  }
  if (max_abs_deviation(a_ * a_.adjoint(), id) > kValidationTol) {
    throw InvariantError("UnitaryGate: eigenvectors are not orthonormal");
  }
  for (Eigen::Index k = 0; k < d; ++k) {
    if (std::abs(std::abs(lambda_(k)) - 1.0) > kValidationTol) {
      throw InvariantError("UnitaryGate: eigenvalue off the unit circle");
    }
  }
  if (max_abs_deviation(a_ * lambda_.asDiagonal() * a_.adjoint(), u_) > kValidationTol) {
    throw InvariantError("UnitaryGate: A diag(Lambda) A^dagger does not reproduce U");
  }
}

UnitaryGate toffoli_gate() {
  CMatrix u = CMatrix::Identity(8, 8);
  u(6, 6) = 0.0;
  u(7, 7) = 0.0;
  u(6, 7) = 1.0;
  u(7, 6) = 1.0;

  const double h = 1.0 / std::sqrt(2.0);
  CMatrix a = CMatrix::Zero(8, 8);
  for (int k = 0; k < 6; ++k) a(k, k) = 1.0;
  a(6, 6) = h;  // |11+>
  a(7, 6) = h;
  a(6, 7) = h;  // |11->
  a(7, 7) = -h;

  CVector lambda = CVector::Ones(8);
  lambda(7) = -1.0;
  return UnitaryGate(std::move(u), std::move(a), std::move(lambda));
}

// ---------------------------------------------------------------------------
// QuantumChannel

QuantumChannel::QuantumChannel(std::vector<CMatrix> kraus) : kraus_(std::move(kraus)) {
  if (kraus_.empty()) throw InvariantError("QuantumChannel: no Kraus operators");
  require_square(kraus_.front(), "QuantumChannel");
  dim_ = static_cast<int>(kraus_.front().rows());
  CMatrix completeness = CMatrix::Zero(dim_, dim_);
  transfer_ = CMatrix::Zero(dim_ * dim_, dim_ * dim_);
  for (const auto& k : kraus_) {
    if (k.rows() != dim_ || k.cols() != dim_) {
      throw DimensionError("QuantumChannel: Kraus operators differ in dimension");
    }
    completeness += k.adjoint() * k;
    transfer_ += Eigen::kroneckerProduct(k.conjugate(), k);
  }
  if (max_abs_deviation(completeness, CMatrix::Identity(dim_, dim_)) > kValidationTol) {
    throw InvariantError("QuantumChannel: Kraus operators are not trace preserving");
  }
}

QuantumChannel QuantumChannel::identity(int d) {
  return QuantumChannel({CMatrix::Identity(d, d)});
}

QuantumChannel QuantumChannel::unitary(const CMatrix& u) { return QuantumChannel({u}); }

CMatrix QuantumChannel::apply(const CMatrix& rho) const {
  if (rho.rows() != dim_ || rho.cols() != dim_) {
    throw DimensionError("QuantumChannel::apply: state dimension mismatch");
  }
  CMatrix out = CMatrix::Zero(dim_, dim_);
  for (const auto& k : kraus_) out += k * rho * k.adjoint();
  return out;
}

CMatrix transfer_matrix(const QuantumChannel& channel) { return channel.transfer_matrix(); }

// ---------------------------------------------------------------------------
// Eigenbasis frame and fidelity

EigenbasisFrame eigenbasis_frame(const UnitaryGate& gate) {
  const int d = gate.dim();
  const CMatrix& a = gate.eigenvectors();
  const CVector& lambda = gate.eigenvalues();
  EigenbasisFrame frame;
  frame.d = d;
  frame.basis = Eigen::kroneckerProduct(a.conjugate(), a);
  frame.ideal_eigenvalues.resize(d * d);
  for (int b = 0; b < d; ++b) {
    for (int a_idx = 0; a_idx < d; ++a_idx) {
      frame.ideal_eigenvalues(frame.index(a_idx, b)) = lambda(a_idx) * std::conj(lambda(b));
    }
  }
  return frame;
}

CMatrix channel_in_eigenbasis(const QuantumChannel& channel, const EigenbasisFrame& frame) {
  if (channel.dim() != frame.d) {
    throw DimensionError("channel_in_eigenbasis: channel and frame dimensions differ");
  }
  return frame.basis.adjoint() * channel.transfer_matrix() * frame.basis;
}

double process_fidelity(const UnitaryGate& ideal, const QuantumChannel& noisy) {
  if (ideal.dim() != noisy.dim()) {
    throw DimensionError("process_fidelity: gate and channel dimensions differ");
  }
  const CMatrix& u = ideal.matrix();
  const CMatrix g_ideal = Eigen::kroneckerProduct(u.conjugate(), u);
  const cplx tr = (g_ideal.adjoint() * noisy.transfer_matrix()).trace();
  const double d2 = static_cast<double>(ideal.dim()) * ideal.dim();
  if (std::abs(tr.imag()) / d2 > 1e-12) {
    throw InvariantError("process_fidelity: trace has a non-negligible imaginary part");
  }
  return tr.real() / d2;
}

CMatrix random_unitary(int d, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix g(d, d);
  for (int c = 0; c < d; ++c) {
    for (int r = 0; r < d; ++r) g(r, c) = cplx(normal(rng), normal(rng));
  }
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < d; ++k) {
    const cplx rk = r(k, k);
    q.col(k) *= rk / std::abs(rk);
  }
  return q;
}

}  // namespace csb
