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

#ifndef CSB_ESTIMATION_HPP
#define CSB_ESTIMATION_HPP

#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "csb/channel.hpp"
#include "csb/fitting.hpp"

namespace csb {

/// Raised when no eigenvalue survives filtering.
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class RejectReason { kNone, kSmallAmplitude, kPhaseOutlier };

std::string to_string(RejectReason reason);
RejectReason reject_reason_from_string(const std::string& name);

struct FilteredEigenvalue {
  cplx z;
  cplx f;
  cplx assigned_ideal;
  cplx lambda_e;
  int a = 0;
  int b = 0;
  bool kept = false;
  RejectReason reason = RejectReason::kNone;
};

/// Shortest angular distance between two phases, in [0, pi].
double circular_distance(double phase_a, double phase_b);

///
/// Matches each term to the ideal value of nearest phase (ties go to the
/// smaller phase in (-pi, pi]), then applies the amplitude rule before the
/// phase rule.
///
std::vector<FilteredEigenvalue> filter_eigenvalues(const ExponentialFit& fit,
                                                   std::span<const cplx> ideal_pair_eigenvalues,
                                                   double amp_threshold, double phase_threshold);

/// Re(lambda_E) of the kept entries.
std::vector<double> noise_eigenvalues(std::span<const FilteredEigenvalue> filtered);

struct FeiResult {
  double low = 0.0;
  double high = 0.0;
  double midpoint = 0.0;
  /// Sorted bootstrap means.
  std::vector<double> samples;
};

/// Value at rank ceil(level * n) of a sorted sample (1-based).
double nearest_rank_quantile(std::span<const double> sorted, double level);

///
/// Bootstrap: N resamples of d_squared values drawn with replacement, each
/// averaged; the interval ends are nearest-rank quantiles of the N means.
///
FeiResult fei(std::span<const double> estimates, int d_squared, int resamples,
              std::uint64_t seed, double level_low = 0.025, double level_high = 0.975);

struct DegenerateEstimate {
  double value = 0.0;
  /// One of the two groups was empty and the other's mean stood in for it.
  bool single_group = false;
};

/// (d_ts * mean_trivial + d_ns * mean_nontrivial) / (d_ts + d_ns)
DegenerateEstimate degenerate_point_estimate(std::span<const double> trivial,
                                             std::span<const double> nontrivial, int d_ts,
                                             int d_ns);

/// Splits kept entries by whether they were matched to the ideal value 1.
DegenerateEstimate degenerate_point_estimate(std::span<const FilteredEigenvalue> filtered,
                                             int d_ts, int d_ns);

struct EstimationSettings {
  double amp_threshold = 0.01;
  double phase_threshold = std::numbers::pi / 2;
  int resamples = 2000;
  double level_low = 0.025;
  double level_high = 0.975;
  std::uint64_t seed = 0;
};

struct FidelityReport {
  double fei_low = 0.0;
  double fei_high = 0.0;
  double midpoint = 0.0;
  double degenerate_estimate = 0.0;
  bool degenerate_single_group = false;
  int resamples = 0;
  int kept_count = 0;
  int d = 0;
  int d_ts = 0;
  int d_ns = 0;
  std::optional<double> oracle_fidelity;
  std::optional<double> baseline_estimate;
  EstimationSettings settings;
  std::vector<FilteredEigenvalue> eigenvalues;
  std::vector<double> bootstrap_samples;
};

/// Ideal values at (a,a), (a,b), (b,a), (b,b) of the frame.
std::vector<cplx> pair_ideal_eigenvalues(const EigenbasisFrame& frame, int a, int b);

/// Counts of ideal channel eigenvalues equal to 1 and different from 1.
std::pair<int, int> subspace_multiplicities(const EigenbasisFrame& frame);

FidelityReport build_report(std::span<const ExponentialFit> fits, const EigenbasisFrame& frame,
                            const EstimationSettings& settings);

/// Degenerate-weighted estimate over every term of an unfiltered fit set.
/// Used for the matrix pencil comparison.
DegenerateEstimate baseline_estimate(std::span<const ExponentialFit> fits,
                                     const EigenbasisFrame& frame);

}  // namespace csb

#endif  // CSB_ESTIMATION_HPP
