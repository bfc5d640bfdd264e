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

#ifndef CSB_FITTING_HPP
#define CSB_FITTING_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "csb/channel.hpp"
#include "csb/protocol.hpp"

namespace csb {

struct Term {
  cplx z;
  cplx f;
};

enum class ModelTag { kFourTermMp, kSixTermOpt };

std::string to_string(ModelTag tag);
ModelTag model_tag_from_string(const std::string& name);

struct ExponentialFit {
  int a = 0;
  int b = 0;
  ModelTag model = ModelTag::kSixTermOpt;
  std::vector<Term> terms;
  double rms_residual = 0.0;
  bool converged = true;
  /// Matrix pencil: fewer terms than requested because the data had lower rank.
  bool rank_deficient = false;
  int iterations = 0;
};

inline constexpr double kConjugateTol = 1e-8;
inline constexpr double kModelImagTol = 1e-9;

/// Throws InvariantError unless the terms are closed under (z, f) -> (z*, f*).
void check_conjugate_closed(std::span<const Term> terms, double tol = kConjugateTol);

/// sum_i f_i z_i^L, real part, after checking conjugate closure.
double model_eval(std::span<const Term> terms, int depth);

/// sqrt(mean_L (p_hat(L) - model(L))^2)
double rms_residual(std::span<const Term> terms, const DecayCurve& curve);

///
/// Matrix pencil fit with pencil parameter floor(len/2). Singular values below
/// 1e-10 of the largest are treated as zero, so noiseless data with fewer than
/// `order` exponentials collapses to the true order.
///
ExponentialFit matrix_pencil_fit(const DecayCurve& curve, int order = 4);

/// Slope of the log-linear regression of |p_hat| against L, as a ratio per step.
double envelope_decay(const DecayCurve& curve);

/// Deduplicated ideal pair eigenvalues scaled by envelope_decay, with one extra
/// conjugate pair near phase zero; amplitudes by linear least squares.
std::vector<Term> initialize_from_ideal(std::span<const cplx> ideal_pair_eigenvalues,
                                        const DecayCurve& curve);

struct SixTermOptions {
  int max_iterations = 500;
  double gradient_tol = 1e-10;
  double modulus_bound = 1.0 + 1e-3;
  /// Ridge weight on the linear amplitudes. Unset means the mean binomial
  /// variance p(1-p)/shots of the data, which is zero for exact curves.
  std::optional<double> ridge;
  /// Also start from a six-exponential matrix pencil fit and keep the start
  /// that ends with the lower objective. Ignored when a seed fit is given.
  bool pencil_start = true;
};

///
/// Three complex slots z_j, each contributing f_j z_j^L + conj(f_j z_j^L).
/// Amplitudes are eliminated by linear least squares at every iterate, so the
/// damped Gauss-Newton loop only moves the six real coordinates of the z_j.
/// The bound |z_j| <= modulus_bound is a quadratic penalty.
///
/// seed_fit, when given, replaces the ideal-eigenvalue initialization.
///
ExponentialFit six_term_fit(const DecayCurve& curve, std::span<const cplx> ideal_pair_eigenvalues,
                            const ExponentialFit* seed_fit = nullptr,
                            const SixTermOptions& options = {});

}  // namespace csb

#endif  // CSB_FITTING_HPP
