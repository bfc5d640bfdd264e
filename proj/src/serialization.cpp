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

#include "csb/io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace csb {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

const Json& field(const Json& j, const char* key, const char* where) {
  if (!j.is_object() || !j.contains(key)) {
    throw DataError(std::string(where) + ": missing field \"" + key + "\"");
  }
  return j.at(key);
}

}  // namespace

Json complex_to_json(cplx z) { return Json::array({z.real(), z.imag()}); }

cplx complex_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw DataError("complex value must be [re, im]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

Json matrix_to_json(const CMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw DataError("matrix must be a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].is_array() ? j[0].size() : 0);
  if (cols == 0) throw DataError("matrix rows must be non-empty arrays");
  CMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw DataError("matrix rows differ in length");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = complex_from_json(row[static_cast<std::size_t>(c)]);
  }
  return m;
}

Json noise_factor_to_json(const NoiseFactor& f) {
  return std::visit(
      Overloaded{
          [](const AmplitudeDampingFactor& v) {
            return Json{{"type", "amplitude_damping"}, {"gamma", v.gamma}};
          },
          [](const YRotationFactor& v) { return Json{{"type", "y_rotation"}, {"theta", v.theta}}; },
          [](const DepolarizingFactor& v) { return Json{{"type", "depolarizing"}, {"p", v.p}}; }},
      f);
}

NoiseFactor noise_factor_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    throw ConfigError("noise factor needs a \"type\" string");
  }
  const std::string type = j["type"];
  auto number = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_number()) {
      throw ConfigError("noise factor \"" + type + "\" needs a numeric \"" + key + "\"");
    }
    return j[key].get<double>();
  };
  auto unit = [&](const char* key) {
    const double v = number(key);
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(type + ": " + key + " must lie in [0, 1]");
    return v;
  };
  if (type == "amplitude_damping") return AmplitudeDampingFactor{unit("gamma")};
  if (type == "y_rotation") {
    const double theta = number("theta");
    if (!std::isfinite(theta)) throw ConfigError("y_rotation: theta must be finite");
    return YRotationFactor{theta};
  }
  if (type == "depolarizing") return DepolarizingFactor{unit("p")};
  throw ConfigError("unknown noise factor type \"" + type + "\"");
}

Json noise_spec_to_json(const NoiseSpec& spec) {
  Json qubits = Json::array();
  for (const auto& q : spec.qubits) {
    Json factors = Json::array();
    for (const auto& f : q.factors) factors.push_back(noise_factor_to_json(f));
    qubits.push_back(std::move(factors));
  }
  return Json{{"placement", to_string(spec.placement)}, {"qubits", std::move(qubits)}};
}

NoiseSpec noise_spec_from_json(const Json& j, NoisePlacement placement, int n_qubits) {
  if (!j.is_object()) throw ConfigError("noise spec must be an object");
  auto parse_list = [](const Json& list) {
    if (!list.is_array()) throw ConfigError("noise factors must be an array");
    QubitNoise q;
    for (const auto& f : list) q.factors.push_back(noise_factor_from_json(f));
    return q;
  };
  NoiseSpec spec;
  spec.placement = placement;
  if (j.contains("per_qubit")) {
    spec = NoiseSpec::uniform(placement, parse_list(j["per_qubit"]), n_qubits);
  } else if (j.contains("qubits")) {
    if (!j["qubits"].is_array()) throw ConfigError("\"qubits\" must be an array");
    for (const auto& q : j["qubits"]) spec.qubits.push_back(parse_list(q));
    if (static_cast<int>(spec.qubits.size()) != n_qubits) {
      throw ConfigError("noise spec lists " + std::to_string(spec.qubits.size()) +
                        " qubits, the gate acts on " + std::to_string(n_qubits));
    }
  } else {
    throw ConfigError("noise spec needs \"per_qubit\" or \"qubits\"");
  }
  return spec;
}

Json curves_to_json(const std::vector<DecayCurve>& curves) {
  Json out = Json::array();
  for (const auto& c : curves) {
    for (std::size_t l = 0; l < c.p_hat.size(); ++l) {
      Json rec{{"a", c.a}, {"b", c.b}, {"L", c.depths[l]}, {"p_hat", c.p_hat[l]}, {"shots", c.shots}};
      if (c.exact) rec["exact"] = true;
      out.push_back(std::move(rec));
    }
  }
  return out;
}

std::vector<DecayCurve> curves_from_json(const Json& j) {
  if (!j.is_array()) throw DataError("curve file must hold a JSON array of records");
  struct Point {
    int depth;
    double p;
    int shots;
    bool exact;
  };
  std::map<std::pair<int, int>, std::vector<Point>> grouped;
  for (const auto& rec : j) {
    auto integer = [&](const char* key) {
      const Json& v = field(rec, key, "curve record");
      if (!v.is_number_integer()) throw DataError(std::string("curve record: \"") + key + "\" must be an integer");
      return v.get<int>();
    };
    const int a = integer("a");
    const int b = integer("b");
    const int depth = integer("L");
    const int shots = integer("shots");
    const Json& pv = field(rec, "p_hat", "curve record");
    if (!pv.is_number()) throw DataError("curve record: \"p_hat\" must be a number");
    const double p = pv.get<double>();
    if (a < 0 || b < a) throw DataError("curve record: need 0 <= a <= b");
    if (depth < 0) throw DataError("curve record: negative depth");
    if (!(p >= 0.0 && p <= 1.0)) throw DataError("curve record: p_hat outside [0, 1]");
    if (shots < 0) throw DataError("curve record: negative shot count");
    const bool exact = rec.contains("exact") && rec["exact"].is_boolean() && rec["exact"].get<bool>();
    grouped[{a, b}].push_back({depth, p, shots, exact});
  }
  if (grouped.empty()) throw DataError("curve file holds no records");
  std::vector<DecayCurve> curves;
  for (auto& [key, points] : grouped) {
    std::sort(points.begin(), points.end(),
              [](const Point& l, const Point& r) { return l.depth < r.depth; });
    DecayCurve c;
    c.a = key.first;
    c.b = key.second;
    c.shots = points.front().shots;
    c.exact = points.front().exact;
    for (std::size_t l = 0; l < points.size(); ++l) {
      if (points[l].depth != static_cast<int>(l)) {
        throw DataError("curve (" + std::to_string(c.a) + "," + std::to_string(c.b) +
                        ") must cover depths 0..L_max once each");
      }
      if (points[l].shots != c.shots) {
        throw DataError("curve (" + std::to_string(c.a) + "," + std::to_string(c.b) +
                        ") mixes shot counts");
      }
      c.depths.push_back(points[l].depth);
      c.p_hat.push_back(points[l].p);
    }
    if (!c.exact && c.shots < 1) throw DataError("sampled curve needs a positive shot count");
    curves.push_back(std::move(c));
  }
  return curves;
}

Json fit_to_json(const ExponentialFit& fit) {
  Json terms = Json::array();
  for (const auto& t : fit.terms) terms.push_back({{"z", complex_to_json(t.z)}, {"f", complex_to_json(t.f)}});
  return Json{{"a", fit.a},
              {"b", fit.b},
              {"model", to_string(fit.model)},
              {"terms", std::move(terms)},
              {"rms_residual", fit.rms_residual},
              {"converged", fit.converged},
              {"rank_deficient", fit.rank_deficient},
              {"iterations", fit.iterations}};
}

ExponentialFit fit_from_json(const Json& j) {
  ExponentialFit fit;
  fit.a = field(j, "a", "fit").get<int>();
  fit.b = field(j, "b", "fit").get<int>();
  try {
    fit.model = model_tag_from_string(field(j, "model", "fit").get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what());
  }
  for (const auto& t : field(j, "terms", "fit")) {
    fit.terms.push_back({complex_from_json(field(t, "z", "term")), complex_from_json(field(t, "f", "term"))});
  }
  fit.rms_residual = field(j, "rms_residual", "fit").get<double>();
  fit.converged = j.value("converged", true);
  fit.rank_deficient = j.value("rank_deficient", false);
  fit.iterations = j.value("iterations", 0);
  return fit;
}

Json fits_to_json(const std::vector<ExponentialFit>& fits) {
  Json out = Json::array();
  for (const auto& f : fits) out.push_back(fit_to_json(f));
  return out;
}

std::vector<ExponentialFit> fits_from_json(const Json& j) {
  if (!j.is_array()) throw DataError("fit dump must be an array");
  std::vector<ExponentialFit> out;
  for (const auto& f : j) out.push_back(fit_from_json(f));
  return out;
}

Json report_to_json(const FidelityReport& r) {
  Json eig = Json::array();
  for (const auto& e : r.eigenvalues) {
    eig.push_back({{"a", e.a},
                   {"b", e.b},
                   {"z", complex_to_json(e.z)},
                   {"f", complex_to_json(e.f)},
                   {"assigned_ideal", complex_to_json(e.assigned_ideal)},
                   {"lambda_e", complex_to_json(e.lambda_e)},
                   {"kept", e.kept},
                   {"reason", to_string(e.reason)}});
  }
  Json out{{"fei_low", r.fei_low},
           {"fei_high", r.fei_high},
           {"midpoint", r.midpoint},
           {"degenerate_estimate", r.degenerate_estimate},
           {"degenerate_single_group", r.degenerate_single_group},
           {"resamples", r.resamples},
           {"kept_count", r.kept_count},
           {"d", r.d},
           {"d_ts", r.d_ts},
           {"d_ns", r.d_ns},
           {"seed", r.settings.seed},
           {"thresholds",
            {{"amp_threshold", r.settings.amp_threshold},
             {"phase_threshold", r.settings.phase_threshold}}},
           {"quantile_levels", {r.settings.level_low, r.settings.level_high}},
           {"eigenvalues", std::move(eig)}};
  if (r.oracle_fidelity) out["oracle_fidelity"] = *r.oracle_fidelity;
  if (r.baseline_estimate) out["baseline_estimate"] = *r.baseline_estimate;
  return out;
}

FidelityReport report_from_json(const Json& j) {
  try {
    FidelityReport r;
    r.fei_low = field(j, "fei_low", "report").get<double>();
    r.fei_high = field(j, "fei_high", "report").get<double>();
    r.midpoint = field(j, "midpoint", "report").get<double>();
    r.degenerate_estimate = field(j, "degenerate_estimate", "report").get<double>();
    r.degenerate_single_group = j.value("degenerate_single_group", false);
    r.resamples = field(j, "resamples", "report").get<int>();
    r.kept_count = field(j, "kept_count", "report").get<int>();
    r.d = field(j, "d", "report").get<int>();
    r.d_ts = field(j, "d_ts", "report").get<int>();
    r.d_ns = field(j, "d_ns", "report").get<int>();
    r.settings.seed = field(j, "seed", "report").get<std::uint64_t>();
    r.settings.resamples = r.resamples;
    const Json& th = field(j, "thresholds", "report");
    r.settings.amp_threshold = field(th, "amp_threshold", "thresholds").get<double>();
    r.settings.phase_threshold = field(th, "phase_threshold", "thresholds").get<double>();
    if (j.contains("quantile_levels")) {
      r.settings.level_low = j["quantile_levels"].at(0).get<double>();
      r.settings.level_high = j["quantile_levels"].at(1).get<double>();
    }
    if (j.contains("oracle_fidelity")) r.oracle_fidelity = j["oracle_fidelity"].get<double>();
    if (j.contains("baseline_estimate")) r.baseline_estimate = j["baseline_estimate"].get<double>();
    for (const auto& e : j.value("eigenvalues", Json::array())) {
      FilteredEigenvalue fe;
      fe.a = field(e, "a", "eigenvalue").get<int>();
      fe.b = field(e, "b", "eigenvalue").get<int>();
      fe.z = complex_from_json(field(e, "z", "eigenvalue"));
      fe.f = complex_from_json(field(e, "f", "eigenvalue"));
      fe.assigned_ideal = complex_from_json(field(e, "assigned_ideal", "eigenvalue"));
      fe.lambda_e = complex_from_json(field(e, "lambda_e", "eigenvalue"));
      fe.kept = field(e, "kept", "eigenvalue").get<bool>();
      fe.reason = reject_reason_from_string(field(e, "reason", "eigenvalue").get<std::string>());
      r.eigenvalues.push_back(fe);
    }
    return r;
  } catch (const Json::exception& e) {
    throw DataError(std::string("report: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("report: ") + e.what());
  }
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace csb
