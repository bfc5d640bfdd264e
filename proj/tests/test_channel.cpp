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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "csb/channel.hpp"
#include "csb/noise.hpp"
#include "oracles.hpp"

namespace csb {
namespace {

QuantumChannel random_channel(int d, int k, std::mt19937_64& rng) {
  return QuantumChannel(oracle::random_kraus(d, k, rng));
}

TEST(Vectorize, IdentityStacksToDiagonalPattern) {
  CVector v = vectorize(CMatrix::Identity(2, 2));
  ASSERT_EQ(v.size(), 4);
  EXPECT_EQ(v(0), cplx(1));
  EXPECT_EQ(v(1), cplx(0));
  EXPECT_EQ(v(2), cplx(0));
  EXPECT_EQ(v(3), cplx(1));
}

TEST(Vectorize, OffDiagonalKetBraLandsInColumnOne) {
  CMatrix rho = CMatrix::Zero(2, 2);
  rho(0, 1) = 1.0;
  CVector v = vectorize(rho);
  CVector expected(4);
  expected << 0, 0, 1, 0;
  EXPECT_EQ(v, expected);
}

TEST(Vectorize, RoundTripAndColumnStacking) {
  std::mt19937_64 rng(7);
  for (int d : {1, 2, 3, 8}) {
    CMatrix rho = oracle::random_complex(d, d, rng);
    EXPECT_EQ(devectorize(vectorize(rho)), rho);
    EXPECT_EQ(vectorize(rho), oracle::stack_columns(rho));
  }
}

TEST(Vectorize, RejectsNonSquare) {
  EXPECT_THROW(vectorize(CMatrix::Zero(2, 3)), DimensionError);
  EXPECT_THROW(devectorize(CVector::Zero(5)), DimensionError);
}

TEST(TransferMatrix, IdentityChannelIsIdentity) {
  EXPECT_EQ(transfer_matrix(QuantumChannel::identity(2)), CMatrix::Identity(4, 4));
}

TEST(TransferMatrix, PauliZ) {
  CMatrix z = CMatrix::Zero(2, 2);
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  CMatrix expected = CMatrix::Zero(4, 4);
  expected.diagonal() << 1, -1, -1, 1;
  EXPECT_LT(max_abs_deviation(transfer_matrix(QuantumChannel::unitary(z)), expected), 1e-15);
}

TEST(TransferMatrix, ActionMatchesKrausApplication) {
  std::mt19937_64 rng(11);
  for (int d : {2, 3, 4}) {
    const QuantumChannel ch = random_channel(d, 3, rng);
    EXPECT_LT(max_abs_deviation(ch.transfer_matrix(), oracle::transfer_by_kron(ch.kraus())), 1e-12);
    for (int trial = 0; trial < 20; ++trial) {
      const CMatrix rho = oracle::random_density(d, rng);
      const CVector lhs = ch.transfer_matrix() * vectorize(rho);
      const CVector rhs = oracle::stack_columns(oracle::apply_kraus(ch.kraus(), rho));
      EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-10);
    }
  }
}

TEST(TransferMatrix, TracePreserving) {
  std::mt19937_64 rng(12);
  for (int d : {2, 4, 8}) {
    const QuantumChannel ch = random_channel(d, 2, rng);
    const CVector id = vectorize(CMatrix::Identity(d, d));
    const CVector row = ch.transfer_matrix().adjoint() * id;
    EXPECT_LT((row - id).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(TransferMatrix, UnitaryChannelIsConjugateKronU) {
  const CMatrix u = random_unitary(4, 3);
  EXPECT_LT(max_abs_deviation(transfer_matrix(QuantumChannel::unitary(u)), oracle::kron(u.conjugate(), u)),
            1e-12);
}

TEST(QuantumChannel, RejectsIncompleteKraus) {
  CMatrix k = CMatrix::Identity(2, 2) * 0.9;
  EXPECT_THROW(QuantumChannel({k}), InvariantError);
  EXPECT_THROW(QuantumChannel(std::vector<CMatrix>{}), std::invalid_argument);
  EXPECT_THROW(QuantumChannel({CMatrix::Identity(2, 2), CMatrix::Zero(3, 3)}), DimensionError);
}

TEST(UnitaryGate, RejectsNonUnitary) {
  CMatrix m = CMatrix::Identity(2, 2);
  m(0, 1) = 0.1;
  EXPECT_THROW(UnitaryGate{m}, InvariantError);
}

TEST(UnitaryGate, RandomUnitariesDiagonalize) {
  for (int d : {2, 4, 8}) {
    for (unsigned long long seed = 0; seed < 10; ++seed) {
      const UnitaryGate g(random_unitary(d, seed));
      const CMatrix& a = g.eigenvectors();
      EXPECT_LT(max_abs_deviation(a * g.eigenvalues().asDiagonal() * a.adjoint(), g.matrix()), 1e-10);
      EXPECT_LT(max_abs_deviation(a.adjoint() * a, CMatrix::Identity(d, d)), 1e-10);
      for (int k = 0; k < d; ++k) EXPECT_NEAR(std::abs(g.eigenvalues()(k)), 1.0, 1e-10);
    }
  }
}

TEST(Toffoli, AnalyticEigenbasis) {
  const UnitaryGate g = toffoli_gate();
  ASSERT_EQ(g.dim(), 8);
  // Flips the last qubit when the first two are set.
  for (int i = 0; i < 8; ++i) {
    const int j = (i >= 6) ? (i ^ 1) : i;
    EXPECT_EQ(g.matrix()(j, i), cplx(1.0));
  }
  const double s = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(g.eigenvectors()(6, 6) - s), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(g.eigenvectors()(7, 6) - s), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(g.eigenvectors()(6, 7) - s), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(g.eigenvectors()(7, 7) + s), 0.0, 1e-15);
  for (int k = 0; k < 7; ++k) EXPECT_EQ(g.eigenvalues()(k), cplx(1.0));
  EXPECT_EQ(g.eigenvalues()(7), cplx(-1.0));
}

TEST(EigenbasisFrame, ToffoliMultiplicities) {
  const EigenbasisFrame f = eigenbasis_frame(toffoli_gate());
  int plus = 0;
  int minus = 0;
  for (int i = 0; i < f.ideal_eigenvalues.size(); ++i) {
    if (f.ideal_eigenvalues(i) == cplx(1.0)) ++plus;
    if (f.ideal_eigenvalues(i) == cplx(-1.0)) ++minus;
  }
  EXPECT_EQ(plus, 50);
  EXPECT_EQ(minus, 14);
}

TEST(EigenbasisFrame, IdentityGateAllOnes) {
  const EigenbasisFrame f = eigenbasis_frame(UnitaryGate(CMatrix::Identity(8, 8)));
  for (int i = 0; i < 64; ++i) EXPECT_NEAR(std::abs(f.ideal_eigenvalues(i) - 1.0), 0.0, 1e-12);
}

TEST(EigenbasisFrame, PauliZProducts) {
  CMatrix z = CMatrix::Zero(2, 2);
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  const EigenbasisFrame f = eigenbasis_frame(UnitaryGate(z));
  CVector expected(4);
  expected << 1, -1, -1, 1;
  EXPECT_LT((f.ideal_eigenvalues - expected).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(f.ideal(0, 1), f.ideal_eigenvalues(f.index(0, 1)));
}

TEST(EigenbasisFrame, ReconstructsIdealTransferMatrix) {
  for (int d : {2, 4, 8}) {
    for (unsigned long long seed = 0; seed < 10; ++seed) {
      const UnitaryGate g(random_unitary(d, 100 + seed));
      const EigenbasisFrame f = eigenbasis_frame(g);
      EXPECT_LT(max_abs_deviation(f.basis.adjoint() * f.basis, CMatrix::Identity(d * d, d * d)), 1e-10);
      const CMatrix rebuilt = f.basis * f.ideal_eigenvalues.asDiagonal() * f.basis.adjoint();
      EXPECT_LT(max_abs_deviation(rebuilt, oracle::kron(g.matrix().conjugate(), g.matrix())), 1e-9);
      EXPECT_LT(max_abs_deviation(f.basis, oracle::kron(g.eigenvectors().conjugate(), g.eigenvectors())),
                1e-15);
    }
  }
}

TEST(ChannelInEigenbasis, IdealGateIsDiagonal) {
  const UnitaryGate g = toffoli_gate();
  const EigenbasisFrame f = eigenbasis_frame(g);
  const CMatrix k = channel_in_eigenbasis(QuantumChannel::unitary(g.matrix()), f);
  EXPECT_LT(max_abs_deviation(k, CMatrix(f.ideal_eigenvalues.asDiagonal())), 1e-9);
  const CMatrix id = channel_in_eigenbasis(QuantumChannel::identity(8), f);
  EXPECT_LT(max_abs_deviation(id, CMatrix::Identity(64, 64)), 1e-10);
}

TEST(ChannelInEigenbasis, RoundTripRandomChannel) {
  std::mt19937_64 rng(5);
  const EigenbasisFrame f = eigenbasis_frame(UnitaryGate(random_unitary(4, 9)));
  const QuantumChannel ch = random_channel(4, 3, rng);
  const CMatrix k = channel_in_eigenbasis(ch, f);
  EXPECT_LT(max_abs_deviation(f.basis * k * f.basis.adjoint(), ch.transfer_matrix()), 1e-10);
  EXPECT_THROW(channel_in_eigenbasis(QuantumChannel::identity(2), f), DimensionError);
}

TEST(ProcessFidelity, NoiselessIsOne) {
  for (int d : {2, 4, 8}) {
    for (unsigned long long seed = 0; seed < 10; ++seed) {
      const UnitaryGate g(random_unitary(d, seed));
      EXPECT_NEAR(process_fidelity(g, QuantumChannel::unitary(g.matrix())), 1.0, 1e-12);
    }
  }
}

TEST(ProcessFidelity, FullyDepolarizingToffoli) {
  const UnitaryGate g = toffoli_gate();
  const QuantumChannel noisy = compose(depolarizing(1.0, 8), QuantumChannel::unitary(g.matrix()));
  EXPECT_NEAR(process_fidelity(g, noisy), 1.0 / 64.0, 1e-12);
}

TEST(ProcessFidelity, MatchesKrausTraceFormula) {
  std::mt19937_64 rng(21);
  for (int d : {2, 4}) {
    const UnitaryGate g(random_unitary(d, 4));
    const QuantumChannel noisy = compose(random_channel(d, 3, rng), QuantumChannel::unitary(g.matrix()));
    EXPECT_NEAR(process_fidelity(g, noisy), oracle::kraus_fidelity(g.matrix(), noisy.kraus()), 1e-12);
  }
}

TEST(ProcessFidelity, EqualsTraceOfNoiseInEigenbasis) {
  std::mt19937_64 rng(33);
  for (int d : {2, 4, 8}) {
    const UnitaryGate g(random_unitary(d, 40 + d));
    const EigenbasisFrame f = eigenbasis_frame(g);
    const QuantumChannel e = random_channel(d, 2, rng);
    const QuantumChannel noisy = compose(e, QuantumChannel::unitary(g.matrix()));
    const CMatrix k = channel_in_eigenbasis(e, f);
    const double via_trace = k.diagonal().sum().real() / (d * d);
    EXPECT_NEAR(process_fidelity(g, noisy), via_trace, 1e-10);
  }
}

TEST(ProcessFidelity, DimensionMismatch) {
  EXPECT_THROW(process_fidelity(toffoli_gate(), QuantumChannel::identity(2)), DimensionError);
}

}  // namespace
}  // namespace csb
