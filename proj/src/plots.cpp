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

#include "csb/plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <sstream>

namespace csb {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

const ExponentialFit* find_fit(std::span<const ExponentialFit> fits, int a, int b) {
  for (const auto& f : fits) {
    if (f.a == a && f.b == b) return &f;
  }
  return nullptr;
}

std::string svg_open(double w, double h) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + px(w) + "\" height=\"" + px(h) +
         "\" viewBox=\"0 0 " + px(w) + " " + px(h) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

}  // namespace

std::string curves_csv(std::span<const DecayCurve> curves, std::span<const ExponentialFit> fits,
                       std::span<const ExponentialFit> baseline) {
  std::ostringstream out;
  out << "a,b,L,p_hat,six_term";
  if (!baseline.empty()) out << ",matrix_pencil";
  out << "\n";
  for (const auto& c : curves) {
    const ExponentialFit* f = find_fit(fits, c.a, c.b);
    const ExponentialFit* g = find_fit(baseline, c.a, c.b);
    for (std::size_t l = 0; l < c.p_hat.size(); ++l) {
      out << c.a << "," << c.b << "," << c.depths[l] << "," << num(c.p_hat[l]) << ",";
      out << (f ? num(model_eval(f->terms, c.depths[l])) : "");
      if (!baseline.empty()) out << "," << (g ? num(model_eval(g->terms, c.depths[l])) : "");
      out << "\n";
    }
  }
  return out.str();
}

std::string eigenvalues_csv(std::span<const FilteredEigenvalue> eigenvalues) {
  std::ostringstream out;
  out << "a,b,z_re,z_im,modulus,phase,f_abs,ideal_phase,lambda_e_re,lambda_e_im,kept,reason\n";
  for (const auto& e : eigenvalues) {
    out << e.a << "," << e.b << "," << num(e.z.real()) << "," << num(e.z.imag()) << ","
        << num(std::abs(e.z)) << "," << num(std::arg(e.z)) << "," << num(std::abs(e.f)) << ","
        << num(std::arg(e.assigned_ideal)) << "," << num(e.lambda_e.real()) << ","
        << num(e.lambda_e.imag()) << "," << (e.kept ? 1 : 0) << "," << to_string(e.reason) << "\n";
  }
  return out.str();
}

std::string histogram_csv(std::span<const double> samples, int bins) {
  std::ostringstream out;
  out << "bin_low,bin_high,count\n";
  if (samples.empty() || bins < 1) return out.str();
  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  double lo = *lo_it;
  double hi = *hi_it;
  if (hi <= lo) hi = lo + 1e-12;
  std::vector<int> counts(static_cast<std::size_t>(bins), 0);
  const double width = (hi - lo) / bins;
  for (double s : samples) {
    auto k = static_cast<int>((s - lo) / width);
    k = std::clamp(k, 0, bins - 1);
    ++counts[static_cast<std::size_t>(k)];
  }
  for (int k = 0; k < bins; ++k) {
    out << num(lo + k * width) << "," << num(lo + (k + 1) * width) << ","
        << counts[static_cast<std::size_t>(k)] << "\n";
  }
  return out.str();
}

std::string curves_svg(std::span<const DecayCurve> curves, std::span<const ExponentialFit> fits) {
  const int cols = 6;
  const int rows = static_cast<int>((curves.size() + cols - 1) / cols);
  const double pw = 160, ph = 110, pad = 18;
  std::ostringstream out;
  out << svg_open(cols * pw, std::max(rows, 1) * ph);
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const auto& c = curves[i];
    const double x0 = (i % cols) * pw + pad;
    const double y0 = (i / cols) * ph + pad;
    const double w = pw - 2 * pad;
    const double h = ph - 2 * pad;
    const double lmax = std::max(1, c.depths.empty() ? 1 : c.depths.back());
    auto sx = [&](double l) { return x0 + w * l / lmax; };
    auto sy = [&](double p) { return y0 + h * (1.0 - std::clamp(p, -0.1, 1.1)); };
    out << "<rect x=\"" << px(x0) << "\" y=\"" << px(y0) << "\" width=\"" << px(w)
        << "\" height=\"" << px(h) << "\" fill=\"none\" stroke=\"#999\"/>\n";
    out << "<text x=\"" << px(x0) << "\" y=\"" << px(y0 - 4) << "\" font-size=\"10\">(" << c.a
        << "," << c.b << ")</text>\n";
    for (std::size_t l = 0; l < c.p_hat.size(); ++l) {
      out << "<circle cx=\"" << px(sx(c.depths[l])) << "\" cy=\"" << px(sy(c.p_hat[l]))
          << "\" r=\"1.3\" fill=\"#e07b00\"/>\n";
    }
    if (const ExponentialFit* f = find_fit(fits, c.a, c.b)) {
      out << "<polyline fill=\"none\" stroke=\"#1f5fbf\" stroke-width=\"1\" points=\"";
      for (int s = 0; s <= 4 * static_cast<int>(lmax); ++s) {
        const double l = s / 4.0;
        // Fractional depths only shape the drawn line; principal powers suffice.
        cplx v = 0.0;
        for (const auto& t : f->terms) v += t.f * std::pow(t.z, l);
        out << px(sx(l)) << "," << px(sy(v.real())) << " ";
      }
      out << "\"/>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

std::string polar_svg(std::span<const FilteredEigenvalue> eigenvalues) {
  const double size = 420, r = 180, c = size / 2;
  std::ostringstream out;
  out << svg_open(size, size);
  out << "<circle cx=\"" << px(c) << "\" cy=\"" << px(c) << "\" r=\"" << px(r)
      << "\" fill=\"none\" stroke=\"#999\"/>\n";
  out << "<line x1=\"" << px(c - r) << "\" y1=\"" << px(c) << "\" x2=\"" << px(c + r) << "\" y2=\""
      << px(c) << "\" stroke=\"#ddd\"/>\n";
  out << "<line x1=\"" << px(c) << "\" y1=\"" << px(c - r) << "\" x2=\"" << px(c) << "\" y2=\""
      << px(c + r) << "\" stroke=\"#ddd\"/>\n";
  auto point = [&](cplx z, const char* color, double radius) {
    const double m = std::min(std::abs(z), 1.2);
    const double a = std::arg(z);
    out << "<circle cx=\"" << px(c + r * m * std::cos(a)) << "\" cy=\"" << px(c - r * m * std::sin(a))
        << "\" r=\"" << px(radius) << "\" fill=\"" << color << "\" fill-opacity=\"0.7\"/>\n";
  };
  std::map<std::pair<long, long>, cplx> ideals;
  for (const auto& e : eigenvalues) {
    ideals[{std::lround(e.assigned_ideal.real() * 1e6), std::lround(e.assigned_ideal.imag() * 1e6)}] =
        e.assigned_ideal;
  }
  for (const auto& e : eigenvalues) {
    if (!e.kept) point(e.z, "#1f5fbf", 2.0);
  }
  for (const auto& e : eigenvalues) {
    if (e.kept) point(e.z, "#2a9d3a", 2.5);
  }
  for (const auto& [key, z] : ideals) point(z, "#e07b00", 4.0);
  out << "</svg>\n";
  return out.str();
}

std::string histogram_svg(const FidelityReport& report) {
  const double w = 520, h = 300, pad = 30;
  std::ostringstream out;
  out << svg_open(w, h);
  const auto& s = report.bootstrap_samples;
  if (!s.empty()) {
    double lo = s.front();
    double hi = s.back();
    for (double v : {report.degenerate_estimate, report.oracle_fidelity.value_or(lo),
                     report.baseline_estimate.value_or(lo)}) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double span = std::max(hi - lo, 1e-6);
    lo -= 0.05 * span;
    hi += 0.05 * span;
    const int bins = 40;
    std::vector<int> counts(bins, 0);
    for (double v : s) {
      const int k = std::clamp(static_cast<int>((v - lo) / (hi - lo) * bins), 0, bins - 1);
      ++counts[static_cast<std::size_t>(k)];
    }
    const int peak = std::max(1, *std::max_element(counts.begin(), counts.end()));
    auto sx = [&](double v) { return pad + (w - 2 * pad) * (v - lo) / (hi - lo); };
    const double bw = (w - 2 * pad) / bins;
    for (int k = 0; k < bins; ++k) {
      const double bh = (h - 2 * pad) * counts[static_cast<std::size_t>(k)] / peak;
      out << "<rect x=\"" << px(pad + k * bw) << "\" y=\"" << px(h - pad - bh) << "\" width=\""
          << px(bw) << "\" height=\"" << px(bh) << "\" fill=\"#1f5fbf\" fill-opacity=\"0.6\"/>\n";
    }
    auto vline = [&](double v, const char* color) {
      out << "<line x1=\"" << px(sx(v)) << "\" y1=\"" << px(pad) << "\" x2=\"" << px(sx(v))
          << "\" y2=\"" << px(h - pad) << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
    };
    vline(report.fei_low, "#1f5fbf");
    vline(report.fei_high, "#1f5fbf");
    vline(report.degenerate_estimate, "#2a9d3a");
    if (report.oracle_fidelity) vline(*report.oracle_fidelity, "black");
    if (report.baseline_estimate) vline(*report.baseline_estimate, "#c0392b");
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace csb
