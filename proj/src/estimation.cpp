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

#include "csb/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace csb {

namespace {

constexpr double kIdealMatchTol = 1e-9;

double mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

bool is_trivial(cplx ideal) { return std::abs(ideal - 1.0) < kIdealMatchTol; }

}  // namespace

std::string to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::kNone:
      return "none";
    case RejectReason::kSmallAmplitude:
      return "small_amplitude";
    case RejectReason::kPhaseOutlier:
      return "phase_outlier";
  }
  return "none";
}

RejectReason reject_reason_from_string(const std::string& name) {
  if (name == "none") return RejectReason::kNone;
  if (name == "small_amplitude") return RejectReason::kSmallAmplitude;
  if (name == "phase_outlier") return RejectReason::kPhaseOutlier;
  throw std::invalid_argument("unknown rejection reason: " + name);
}

double circular_distance(double phase_a, double phase_b) {
  const double two_pi = 2.0 * std::numbers::pi;
  double diff = std::fmod(std::abs(phase_a - phase_b), two_pi);
  return std::min(diff, two_pi - diff);
}

std::vector<FilteredEigenvalue> filter_eigenvalues(const ExponentialFit& fit,
                                                   std::span<const cplx> ideal_pair_eigenvalues,
                                                   double amp_threshold, double phase_threshold) {
  if (fit.terms.empty()) throw EstimationError("filter_eigenvalues: empty fit");
  if (ideal_pair_eigenvalues.empty()) throw InvariantError("filter_eigenvalues: no ideal values");
  if (!(amp_threshold >= 0.0) || !(phase_threshold > 0.0) ||
      phase_threshold > std::numbers::pi) {
    throw InvariantError("filter_eigenvalues: thresholds out of range");
  }

  std::vector<cplx> candidates;
  for (const auto& lam : ideal_pair_eigenvalues) {
    bool seen = false;
    for (const auto& c : candidates) seen = seen || std::abs(c - lam) < kIdealMatchTol;
    if (!seen) candidates.push_back(lam);
  }
  std::sort(candidates.begin(), candidates.end(),
            [](cplx l, cplx r) { return std::arg(l) < std::arg(r); });

  std::vector<FilteredEigenvalue> out;
  out.reserve(fit.terms.size());
  for (const auto& t : fit.terms) {
    FilteredEigenvalue e;
    e.z = t.z;
    e.f = t.f;
    e.a = fit.a;
    e.b = fit.b;
    double best = INFINITY;
    for (const auto& c : candidates) {
      const double dist = circular_distance(std::arg(t.z), std::arg(c));
      if (dist < best) {  // strict, so the earlier (smaller phase) wins ties
        best = dist;
        e.assigned_ideal = c;
      }
    }
    e.lambda_e = e.z / e.assigned_ideal;
    if (std::abs(t.f) < amp_threshold) {
      e.reason = RejectReason::kSmallAmplitude;
    } else if (best > phase_threshold) {
      e.reason = RejectReason::kPhaseOutlier;
    } else {
      e.kept = true;
    }
    out.push_back(e);
  }
  return out;
}

std::vector<double> noise_eigenvalues(std::span<const FilteredEigenvalue> filtered) {
  std::vector<double> out;
  for (const auto& e : filtered) {
    if (e.kept) out.push_back(e.lambda_e.real());
  }
  if (out.empty()) throw EstimationError("no eigenvalue survived filtering");
  return out;
}

double nearest_rank_quantile(std::span<const double> sorted, double level) {
  if (sorted.empty()) throw InvariantError("nearest_rank_quantile: empty sample");
  if (!(level > 0.0 && level < 1.0)) throw InvariantError("quantile level must lie in (0, 1)");
  const auto n = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(level * n));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

FeiResult fei(std::span<const double> estimates, int d_squared, int resamples,
              std::uint64_t seed, double level_low, double level_high) {
  if (estimates.empty()) throw EstimationError("fei: no estimates");
  if (d_squared < 1) throw InvariantError("fei: sample size must be positive");
  if (resamples < 100) throw InvariantError("fei: need at least 100 resamples");
  if (!(level_low < level_high)) throw InvariantError("fei: quantile levels out of order");

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, estimates.size() - 1);
  FeiResult out;
  out.samples.resize(static_cast<std::size_t>(resamples));
  for (auto& s : out.samples) {
    double acc = 0.0;
    for (int k = 0; k < d_squared; ++k) acc += estimates[pick(rng)];
    s = acc / d_squared;
  }
  std::sort(out.samples.begin(), out.samples.end());
  out.low = nearest_rank_quantile(out.samples, level_low);
  out.high = nearest_rank_quantile(out.samples, level_high);
  out.midpoint = 0.5 * (out.low + out.high);
  return out;
}

DegenerateEstimate degenerate_point_estimate(std::span<const double> trivial,
                                             std::span<const double> nontrivial, int d_ts,
                                             int d_ns) {
  if (d_ts < 0 || d_ns < 0 || d_ts + d_ns == 0) {
    throw InvariantError("degenerate_point_estimate: invalid multiplicities");
  }
  if (trivial.empty() && nontrivial.empty()) {
    throw EstimationError("degenerate_point_estimate: no kept eigenvalues");
  }
  DegenerateEstimate out;
  double mt = 0.0;
  double mn = 0.0;
  if (trivial.empty() || nontrivial.empty()) {
    out.single_group = true;
    mt = mn = mean(trivial.empty() ? nontrivial : trivial);
  } else {
    mt = mean(trivial);
    mn = mean(nontrivial);
  }
  out.value = (d_ts * mt + d_ns * mn) / static_cast<double>(d_ts + d_ns);
  return out;
}

DegenerateEstimate degenerate_point_estimate(std::span<const FilteredEigenvalue> filtered,
                                             int d_ts, int d_ns) {
  std::vector<double> trivial;
  std::vector<double> nontrivial;
  for (const auto& e : filtered) {
    if (!e.kept) continue;
    (is_trivial(e.assigned_ideal) ? trivial : nontrivial).push_back(e.lambda_e.real());
  }
  return degenerate_point_estimate(trivial, nontrivial, d_ts, d_ns);
}

std::vector<cplx> pair_ideal_eigenvalues(const EigenbasisFrame& frame, int a, int b) {
  return {frame.ideal(a, a), frame.ideal(a, b), frame.ideal(b, a), frame.ideal(b, b)};
}

std::pair<int, int> subspace_multiplicities(const EigenbasisFrame& frame) {
  int trivial = 0;
  for (Eigen::Index k = 0; k < frame.ideal_eigenvalues.size(); ++k) {
    if (is_trivial(frame.ideal_eigenvalues(k))) ++trivial;
  }
  return {trivial, static_cast<int>(frame.ideal_eigenvalues.size()) - trivial};
}

FidelityReport build_report(std::span<const ExponentialFit> fits, const EigenbasisFrame& frame,
                            const EstimationSettings& settings) {
  if (fits.empty()) throw EstimationError("build_report: no fits");
  FidelityReport r;
  r.settings = settings;
  r.d = frame.d;
  std::tie(r.d_ts, r.d_ns) = subspace_multiplicities(frame);
  for (const auto& fit : fits) {
    const auto ideal = pair_ideal_eigenvalues(frame, fit.a, fit.b);
    auto filtered =
        filter_eigenvalues(fit, ideal, settings.amp_threshold, settings.phase_threshold);
    r.eigenvalues.insert(r.eigenvalues.end(), filtered.begin(), filtered.end());
  }
  const auto pool = noise_eigenvalues(r.eigenvalues);
  r.kept_count = static_cast<int>(pool.size());
  const auto interval = fei(pool, frame.d * frame.d, settings.resamples, settings.seed,
                            settings.level_low, settings.level_high);
  r.fei_low = interval.low;
  r.fei_high = interval.high;
  r.midpoint = interval.midpoint;
  r.resamples = settings.resamples;
  r.bootstrap_samples = interval.samples;
  const auto deg = degenerate_point_estimate(r.eigenvalues, r.d_ts, r.d_ns);
  r.degenerate_estimate = deg.value;
  r.degenerate_single_group = deg.single_group;
  return r;
}

DegenerateEstimate baseline_estimate(std::span<const ExponentialFit> fits,
                                     const EigenbasisFrame& frame) {
  std::vector<FilteredEigenvalue> all;
  for (const auto& fit : fits) {
    const auto ideal = pair_ideal_eigenvalues(frame, fit.a, fit.b);
    auto filtered = filter_eigenvalues(fit, ideal, 0.0, std::numbers::pi);
    all.insert(all.end(), filtered.begin(), filtered.end());
  }
  const auto [d_ts, d_ns] = subspace_multiplicities(frame);
  return degenerate_point_estimate(all, d_ts, d_ns);
}

}  // namespace csb
