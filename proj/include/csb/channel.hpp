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

#ifndef CSB_CHANNEL_HPP
#define CSB_CHANNEL_HPP

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace csb {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Raised when operands have incompatible shapes.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a matrix or channel violates a structural invariant
/// (unitarity, completeness, parameter range).
class InvariantError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kValidationTol = 1e-10;
inline constexpr double kReconstructionTol = 1e-9;

/// Largest absolute entry of a - b.
double max_abs_deviation(const CMatrix& a, const CMatrix& b);

/// Column-stacking: component (r + c*d) holds rho(r, c).
CVector vectorize(const CMatrix& rho);
CMatrix devectorize(const CVector& v);

///
/// A d x d unitary together with an orthonormal eigenbasis.
///
/// Columns of eigenvectors() are eigenvectors; eigenvalues() holds the
/// matching unit-modulus eigenvalues. The general constructor diagonalizes
/// through a complex Schur decomposition, which for a normal matrix yields an
/// orthonormal eigenbasis even inside degenerate eigenspaces.
///
class UnitaryGate {
 public:
  explicit UnitaryGate(CMatrix u);
  UnitaryGate(CMatrix u, CMatrix eigenvectors, CVector eigenvalues);

  int dim() const { return static_cast<int>(u_.rows()); }
  const CMatrix& matrix() const { return u_; }
  const CMatrix& eigenvectors() const { return a_; }
  const CVector& eigenvalues() const { return lambda_; }

 private:
  void validate() const;

  CMatrix u_;
  CMatrix a_;
  CVector lambda_;
};

/// Three-qubit Toffoli with the fixed eigenbasis
/// |000>,|001>,|010>,|011>,|100>,|101>,|11+> (eigenvalue +1), |11-> (-1).
UnitaryGate toffoli_gate();

/// CPTP map stored as Kraus operators; the transfer matrix is cached.
class QuantumChannel {
 public:
  explicit QuantumChannel(std::vector<CMatrix> kraus);

  static QuantumChannel identity(int d);
  static QuantumChannel unitary(const CMatrix& u);

  int dim() const { return dim_; }
  const std::vector<CMatrix>& kraus() const { return kraus_; }

  /// sum_i R_i* (x) R_i
  const CMatrix& transfer_matrix() const { return transfer_; }

  /// Direct Kraus application: sum_i R_i rho R_i^dagger.
  CMatrix apply(const CMatrix& rho) const;

 private:
  int dim_;
  std::vector<CMatrix> kraus_;
  CMatrix transfer_;
};

CMatrix transfer_matrix(const QuantumChannel& channel);

///
/// The basis C = A* (x) A diagonalizing the ideal gate's transfer matrix.
///
/// Index (a, b) stands for the eigenoperator |psi_a><psi_b|, stored at
/// position a + b*d like vectorize(); its ideal eigenvalue is
/// Lambda_a * conj(Lambda_b).
///
struct EigenbasisFrame {
  int d = 0;
  CMatrix basis;
  CVector ideal_eigenvalues;

  int index(int a, int b) const { return a + b * d; }
  cplx ideal(int a, int b) const { return ideal_eigenvalues(index(a, b)); }
};

EigenbasisFrame eigenbasis_frame(const UnitaryGate& gate);

/// K_R = C^dagger G_R C.
CMatrix channel_in_eigenbasis(const QuantumChannel& channel, const EigenbasisFrame& frame);

/// tr(G_U^dagger G_noisy) / d^2.
double process_fidelity(const UnitaryGate& ideal, const QuantumChannel& noisy);

/// Haar-distributed unitary from the QR of a complex Ginibre matrix. Used by
/// tests and the property checks; seed fixes the draw.
CMatrix random_unitary(int d, unsigned long long seed);

}  // namespace csb

#endif  // CSB_CHANNEL_HPP
