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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "csb/estimation.hpp"
#include "csb/fitting.hpp"
#include "csb/noise.hpp"
#include "csb/protocol.hpp"
#include "oracles.hpp"

namespace csb {
namespace {

constexpr double kPi = std::numbers::pi;

ExponentialFit fit_of(std::vector<Term> terms, int a = 0, int b = 7) {
  ExponentialFit f;
  f.a = a;
  f.b = b;
  f.terms = std::move(terms);
  return f;
}

const std::vector<cplx> kMixed = {1.0, -1.0, -1.0, 1.0};

std::vector<ExponentialFit> fit_run(double target, std::uint64_t seed, bool exact) {
  const UnitaryGate g = toffoli_gate();
  const EigenbasisFrame frame = eigenbasis_frame(g);
  QuantumChannel e = QuantumChannel::identity(8);
  if (target < 1.0) e = calibrated_default_noise(g, target, 0.005).noise.gate.channel();
  ProtocolSettings s;
  s.seed = seed;
  s.exact = exact;
  std::vector<ExponentialFit> fits;
  for (const auto& c : run_protocol(g, e, e, e, s)) {
    fits.push_back(six_term_fit(c, pair_ideal_eigenvalues(frame, c.a, c.b)));
  }
  return fits;
}

TEST(CircularDistance, WrapsAround) {
  EXPECT_NEAR(circular_distance(0.1, -0.1), 0.2, 1e-15);
  EXPECT_NEAR(circular_distance(kPi - 0.1, -kPi + 0.1), 0.2, 1e-12);
  EXPECT_NEAR(circular_distance(0.0, kPi), kPi, 1e-15);
  EXPECT_NEAR(circular_distance(0.8, kPi), kPi - 0.8, 1e-15);
}

TEST(FilterEigenvalues, KeepsNearIdeal) {
  const cplx z = std::polar(0.95, 0.01);
  const auto out = filter_eigenvalues(fit_of({{z, 0.4}, {std::conj(z), 0.4}}), kMixed, 0.01, kPi / 2);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_TRUE(out[0].kept);
  EXPECT_EQ(out[0].assigned_ideal, cplx(1.0));
  EXPECT_EQ(out[0].reason, RejectReason::kNone);
  EXPECT_NEAR(std::abs(out[0].lambda_e - std::polar(0.95, 0.01)), 0.0, 1e-15);
  EXPECT_EQ(out[0].a, 0);
  EXPECT_EQ(out[0].b, 7);
}

TEST(FilterEigenvalues, PhaseOutlier) {
  const cplx z = std::polar(0.9, 0.8);
  const auto out = filter_eigenvalues(fit_of({{z, 0.3}, {std::conj(z), 0.3}}), kMixed, 0.01, 0.5);
  EXPECT_FALSE(out[0].kept);
  EXPECT_EQ(out[0].reason, RejectReason::kPhaseOutlier);
  EXPECT_EQ(out[0].assigned_ideal, cplx(1.0));
}

TEST(FilterEigenvalues, SmallAmplitudeCheckedFirst) {
  const cplx z = std::polar(0.9, 0.8);
  const auto out = filter_eigenvalues(fit_of({{0.9, 1e-4}, {z, 1e-4}, {std::conj(z), 1e-4}}), kMixed, 0.01, 0.5);
  for (const auto& e : out) {
    EXPECT_FALSE(e.kept);
    EXPECT_EQ(e.reason, RejectReason::kSmallAmplitude);
  }
}

TEST(FilterEigenvalues, TieGoesToSmallerPhase) {
  const std::vector<cplx> ideal = {1.0, -1.0};
  const auto out = filter_eigenvalues(fit_of({{cplx(0.0, 0.9), 0.3}, {cplx(0.0, -0.9), 0.3}}), ideal, 0.01, kPi);
  EXPECT_EQ(out[0].assigned_ideal, cplx(1.0));
  EXPECT_EQ(out[1].assigned_ideal, cplx(1.0));
}

TEST(FilterEigenvalues, NegativeIdealExactQuotient) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const cplx z(u(rng), u(rng));
    const auto out = filter_eigenvalues(fit_of({{z, 0.5}, {std::conj(z), 0.5}}), kMixed, 0.0, kPi);
    for (const auto& e : out) EXPECT_EQ(e.lambda_e * e.assigned_ideal, e.z);
  }
}

TEST(FilterEigenvalues, IdempotentOnKeptSet) {
  const auto fits = fit_run(0.89, 2, false);
  const EigenbasisFrame frame = eigenbasis_frame(toffoli_gate());
  for (const auto& f : fits) {
    const auto ideal = pair_ideal_eigenvalues(frame, f.a, f.b);
    const auto first = filter_eigenvalues(f, ideal, 0.01, kPi / 2);
    ExponentialFit kept = f;
    kept.terms.clear();
    for (const auto& e : first) {
      if (!e.kept) continue;
      EXPECT_GE(std::abs(e.f), 0.01);
      EXPECT_LE(circular_distance(std::arg(e.z), std::arg(e.assigned_ideal)), kPi / 2);
      kept.terms.push_back({e.z, e.f});
    }
    if (kept.terms.empty()) continue;
    for (const auto& e : filter_eigenvalues(kept, ideal, 0.01, kPi / 2)) EXPECT_TRUE(e.kept);
  }
}

TEST(FilterEigenvalues, RejectsBadInput) {
  EXPECT_THROW(filter_eigenvalues(fit_of({}), kMixed, 0.01, 1.0), EstimationError);
  EXPECT_THROW(filter_eigenvalues(fit_of({{1.0, 1.0}}), kMixed, 0.01, 4.0), InvariantError);
}

TEST(NoiseEigenvalues, SignCancels) {
  const auto out = filter_eigenvalues(fit_of({{-0.95, 0.5}}), kMixed, 0.01, kPi / 2);
  const auto v = noise_eigenvalues(out);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0], 0.95);
}

TEST(NoiseEigenvalues, SmallPhase) {
  const cplx z = std::polar(0.9, 0.02);
  const auto v = noise_eigenvalues(filter_eigenvalues(fit_of({{z, 0.5}, {std::conj(z), 0.5}}), kMixed, 0.01, 1.0));
  ASSERT_EQ(v.size(), 2u);
  EXPECT_NEAR(v[0], 0.89982, 1e-5);
  EXPECT_EQ(v[0], v[1]);
}

TEST(NoiseEigenvalues, IdentityNoiseGivesOnes) {
  const auto v = noise_eigenvalues(filter_eigenvalues(fit_of({{1.0, 0.5}, {-1.0, 0.5}}), kMixed, 0.01, 1.0));
  for (double x : v) EXPECT_EQ(x, 1.0);
}

TEST(NoiseEigenvalues, EmptyKeptSetFails) {
  const auto out = filter_eigenvalues(fit_of({{0.9, 1e-5}}), kMixed, 0.01, 1.0);
  EXPECT_THROW(noise_eigenvalues(out), EstimationError);
}

TEST(NearestRank, MatchesDefinition) {
  const std::vector<double> s = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  EXPECT_EQ(nearest_rank_quantile(s, 0.025), 1.0);
  EXPECT_EQ(nearest_rank_quantile(s, 0.1), 1.0);
  EXPECT_EQ(nearest_rank_quantile(s, 0.11), 2.0);
  EXPECT_EQ(nearest_rank_quantile(s, 0.975), 10.0);
  EXPECT_EQ(nearest_rank_quantile(s, 0.5), 5.0);
}

TEST(Fei, ConstantEstimates) {
  const std::vector<double> v(30, 0.9);
  const FeiResult r = fei(v, 64, 2000, 1);
  EXPECT_NEAR(r.low, 0.9, 1e-12);
  EXPECT_NEAR(r.high, 0.9, 1e-12);
  EXPECT_NEAR(r.midpoint, 0.9, 1e-12);
  EXPECT_EQ(r.samples.size(), 2000u);
}

TEST(Fei, MatchesExhaustiveEnumeration) {
  const std::vector<double> v = {1.0, 0.8};
  const auto [lo, hi] = oracle::exhaustive_bootstrap(v, 4, 0.025, 0.975);
  const FeiResult r = fei(v, 4, 100000, 3);
  EXPECT_NEAR(r.low, lo, 0.01);
  EXPECT_NEAR(r.high, hi, 0.01);
}

TEST(Fei, OrderedCenteredAndDeterministic) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.7, 1.0);
  std::vector<double> v;
  for (int i = 0; i < 64; ++i) v.push_back(u(rng));
  const FeiResult a = fei(v, 64, 500, 11);
  const FeiResult b = fei(v, 64, 500, 11);
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_LE(a.low, a.midpoint);
  EXPECT_LE(a.midpoint, a.high);
  EXPECT_DOUBLE_EQ(a.midpoint, 0.5 * (a.low + a.high));
  EXPECT_TRUE(std::is_sorted(a.samples.begin(), a.samples.end()));
}

TEST(Fei, RejectsBadArguments) {
  EXPECT_THROW(fei(std::vector<double>{}, 4, 1000, 1), EstimationError);
  EXPECT_THROW(fei(std::vector<double>{1.0}, 4, 10, 1), InvariantError);
}

TEST(Fei, StableUnderMoreResamples) {
  const auto fits = fit_run(0.89, 7, false);
  const EigenbasisFrame frame = eigenbasis_frame(toffoli_gate());
  std::vector<double> pool;
  for (const auto& f : fits) {
    const auto v = noise_eigenvalues(filter_eigenvalues(f, pair_ideal_eigenvalues(frame, f.a, f.b), 0.01, kPi / 2));
    pool.insert(pool.end(), v.begin(), v.end());
  }
  const FeiResult small = fei(pool, 64, 2000, 1);
  const FeiResult large = fei(pool, 64, 20000, 2);
  EXPECT_LT(std::abs(small.low - large.low), 0.005);
  EXPECT_LT(std::abs(small.high - large.high), 0.005);
}

TEST(DegenerateEstimate, AllOnes) {
  const std::vector<double> ones = {1.0, 1.0};
  EXPECT_EQ(degenerate_point_estimate(ones, ones, 50, 14).value, 1.0);
}

TEST(DegenerateEstimate, WeightedMeans) {
  const std::vector<double> t = {0.9, 0.9};
  const std::vector<double> n = {0.85};
  const DegenerateEstimate e = degenerate_point_estimate(t, n, 50, 14);
  EXPECT_NEAR(e.value, 0.8890625, 1e-15);
  EXPECT_FALSE(e.single_group);
}

TEST(DegenerateEstimate, EqualMeansGivePlainMean) {
  const std::vector<double> t = {0.8, 1.0};
  const std::vector<double> n = {0.9, 0.85, 0.95};
  EXPECT_NEAR(degenerate_point_estimate(t, n, 50, 14).value, 0.9, 1e-15);
}

TEST(DegenerateEstimate, SingleGroupIsFlagged) {
  const std::vector<double> t = {0.8, 0.9};
  const DegenerateEstimate e = degenerate_point_estimate(t, std::vector<double>{}, 50, 14);
  EXPECT_TRUE(e.single_group);
  EXPECT_NEAR(e.value, 0.85, 1e-15);
  EXPECT_THROW(degenerate_point_estimate(std::vector<double>{}, std::vector<double>{}, 50, 14), EstimationError);
}

TEST(DegenerateEstimate, SplitsFilteredByIdealOne) {
  const auto out = filter_eigenvalues(fit_of({{0.9, 0.5}, {-0.8, 0.5}}), kMixed, 0.01, 1.0);
  EXPECT_NEAR(degenerate_point_estimate(out, 50, 14).value, (50 * 0.9 + 14 * 0.8) / 64.0, 1e-15);
}

TEST(Multiplicities, Toffoli) {
  const auto [ts, ns] = subspace_multiplicities(eigenbasis_frame(toffoli_gate()));
  EXPECT_EQ(ts, 50);
  EXPECT_EQ(ns, 14);
}

TEST(BuildReport, NoiselessRunCollapses) {
  const auto fits = fit_run(1.0, 1, true);
  EstimationSettings s;
  const FidelityReport r = build_report(fits, eigenbasis_frame(toffoli_gate()), s);
  EXPECT_NEAR(r.fei_low, 1.0, 1e-6);
  EXPECT_NEAR(r.fei_high, 1.0, 1e-6);
  EXPECT_NEAR(r.degenerate_estimate, 1.0, 1e-6);
  EXPECT_EQ(r.d_ts, 50);
  EXPECT_EQ(r.d_ns, 14);
  EXPECT_EQ(r.d, 8);
}

TEST(BuildReport, NoisyRunInvariants) {
  const auto fits = fit_run(0.89, 9, false);
  EstimationSettings s;
  s.seed = 4;
  const FidelityReport r = build_report(fits, eigenbasis_frame(toffoli_gate()), s);
  EXPECT_LE(r.fei_low, r.midpoint);
  EXPECT_LE(r.midpoint, r.fei_high);
  EXPECT_DOUBLE_EQ(r.midpoint, 0.5 * (r.fei_low + r.fei_high));
  EXPECT_EQ(r.d_ts + r.d_ns, 64);
  EXPECT_EQ(r.resamples, 2000);
  EXPECT_EQ(static_cast<int>(r.bootstrap_samples.size()), 2000);
  int kept = 0;
  for (const auto& e : r.eigenvalues) kept += e.kept;
  EXPECT_EQ(kept, r.kept_count);
  EXPECT_GE(r.kept_count, 64);
  EXPECT_FALSE(r.oracle_fidelity.has_value());
}

TEST(BaselineEstimate, UsesEveryTerm) {
  const std::vector<ExponentialFit> fits = {fit_of({{0.9, 0.5}, {-0.8, 0.5}}, 4, 7),
                                            fit_of({{0.7, 1e-6}}, 0, 0)};
  const DegenerateEstimate e = baseline_estimate(fits, eigenbasis_frame(toffoli_gate()));
  EXPECT_NEAR(e.value, (50 * 0.8 + 14 * 0.8) / 64.0, 1e-15);
}

TEST(RejectReason, Names) {
  for (auto r : {RejectReason::kNone, RejectReason::kSmallAmplitude, RejectReason::kPhaseOutlier}) {
    EXPECT_EQ(reject_reason_from_string(to_string(r)), r);
  }
  EXPECT_EQ(to_string(RejectReason::kSmallAmplitude), "small_amplitude");
  EXPECT_EQ(to_string(RejectReason::kPhaseOutlier), "phase_outlier");
}

}  // namespace
}  // namespace csb
