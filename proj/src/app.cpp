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

#include "csb/app.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "csb/plots.hpp"

namespace csb {

namespace fs = std::filesystem;

namespace {

constexpr const char* kCompositionNote =
    "each qubit's factors are listed outermost first; the last factor acts first, so "
    "[amplitude_damping, y_rotation] is AD after RY";
constexpr const char* kSeedNote =
    "curve i (enumeration order) is sampled with mt19937_64 seeded by "
    "master_seed ^ (i * 0x9E3779B97F4A7C15)";

template <typename T>
T get_as(const Json& j, const char* key, const char* what) {
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ConfigError(std::string(what) + ": \"" + key + "\" has the wrong type");
  }
}

void check_keys(const Json& j, std::initializer_list<const char*> allowed, const char* what) {
  for (const auto& [key, value] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw ConfigError(std::string(what) + ": unknown key \"" + key + "\"");
    }
  }
}

std::string format(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

int qubit_count(int d) {
  int n = 0;
  while ((1 << n) < d) ++n;
  if ((1 << n) != d) throw ConfigError("explicit noise needs a qubit register, got d = " + std::to_string(d));
  return n;
}

void parse_noise(const Json& noise, ExperimentConfig& c) {
  if (noise.is_string()) {
    const auto s = noise.get<std::string>();
    const std::string prefix = "calibrated:";
    if (s == "none") {
      c.calibrated = false;
      c.explicit_noise = "none";
      return;
    }
    if (s.rfind(prefix, 0) == 0) {
      try {
        std::size_t used = 0;
        c.target_fidelity = std::stod(s.substr(prefix.size()), &used);
        if (used != s.size() - prefix.size()) throw std::invalid_argument(s);
      } catch (const std::exception&) {
        throw ConfigError("cannot read a fidelity from \"" + s + "\"");
      }
      c.calibrated = true;
      c.explicit_noise = Json();
      return;
    }
    throw ConfigError("\"noise\" must be \"none\", \"calibrated:<F>\" or an object");
  }
  if (noise.is_object()) {
    check_keys(noise, {"gate", "prep", "meas"}, "noise");
    if (!noise.contains("gate")) throw ConfigError("explicit noise needs a \"gate\" entry");
    c.calibrated = false;
    c.explicit_noise = noise;
    return;
  }
  throw ConfigError("\"noise\" must be a string or an object");
}

Json noise_echo(const ExperimentConfig& c) {
  if (c.calibrated) return "calibrated:" + format("%.17g", c.target_fidelity);
  return c.explicit_noise;
}

Json fit_settings_json(const ExperimentConfig& c) {
  Json ridge = "auto";
  if (c.fit.ridge) ridge = *c.fit.ridge;
  return Json{{"model", to_string(c.model)},
              {"max_iterations", c.fit.max_iterations},
              {"gradient_tol", c.fit.gradient_tol},
              {"modulus_bound", c.fit.modulus_bound},
              {"ridge", ridge},
              {"pencil_start", c.fit.pencil_start},
              {"baseline_order", c.baseline_order}};
}

CMatrix read_gate_matrix(const fs::path& path) {
  Json j;
  try {
    j = read_json_file(path);
  } catch (const DataError& e) {
    throw ConfigError(std::string("gate file: ") + e.what());
  }
  try {
    return matrix_from_json(j.is_object() ? j.at("matrix") : j);
  } catch (const std::exception& e) {
    throw ConfigError("gate file " + path.string() + ": " + e.what());
  }
}

std::vector<ExponentialFit> fit_all(const std::vector<DecayCurve>& curves, const EigenbasisFrame& frame,
                                    const ExperimentConfig& config, bool baseline) {
  std::vector<ExponentialFit> fits(curves.size());
  std::vector<std::exception_ptr> errors(curves.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < curves.size(); i = next++) {
      try {
        const DecayCurve& c = curves[i];
        if (baseline || config.model == ModelTag::kFourTermMp) {
          fits[i] = matrix_pencil_fit(c, baseline ? config.baseline_order : 4);
        } else {
          fits[i] = six_term_fit(c, pair_ideal_eigenvalues(frame, c.a, c.b), nullptr, config.fit);
        }
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned n = std::clamp(std::thread::hardware_concurrency(), 1u, 16u);
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (std::size_t i = 0; i < curves.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::invalid_argument& e) {
      throw DataError("curve (" + std::to_string(curves[i].a) + "," + std::to_string(curves[i].b) +
                      "): " + e.what());
    }
  }
  return fits;
}

}  // namespace

ExperimentConfig config_from_json(const Json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  check_keys(j, {"schema", "gate", "noise", "calibration", "shots", "l_max", "seed", "fit", "estimation",
                 "output_dir"},
             "config");
  if (j.contains("schema") && j["schema"] != kConfigSchema) {
    throw ConfigError(std::string("unsupported config schema, expected \"") + kConfigSchema + "\"");
  }
  ExperimentConfig c;
  c.base_dir = base_dir;
  if (!j.contains("gate")) throw ConfigError("config has no gate definition (\"gate\": \"toffoli\" or a matrix file)");
  c.gate = get_as<std::string>(j, "gate", "config");
  if (j.contains("noise")) parse_noise(j["noise"], c);
  if (j.contains("calibration")) {
    const Json& cal = j["calibration"];
    check_keys(cal, {"tolerance", "theta_ratio"}, "calibration");
    if (cal.contains("tolerance")) c.calibration_tolerance = get_as<double>(cal, "tolerance", "calibration");
    if (cal.contains("theta_ratio")) c.theta_ratio = get_as<double>(cal, "theta_ratio", "calibration");
  }
  if (j.contains("shots")) c.shots = get_as<int>(j, "shots", "config");
  if (j.contains("l_max")) c.l_max = get_as<int>(j, "l_max", "config");
  if (j.contains("seed")) c.seed = get_as<std::uint64_t>(j, "seed", "config");
  if (j.contains("output_dir")) c.output_dir = get_as<std::string>(j, "output_dir", "config");
  if (j.contains("fit")) {
    const Json& f = j["fit"];
    check_keys(f, {"model", "max_iterations", "gradient_tol", "modulus_bound", "ridge", "pencil_start",
                   "baseline_order"},
               "fit");
    if (f.contains("model")) {
      try {
        c.model = model_tag_from_string(get_as<std::string>(f, "model", "fit"));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }
    if (f.contains("max_iterations")) c.fit.max_iterations = get_as<int>(f, "max_iterations", "fit");
    if (f.contains("gradient_tol")) c.fit.gradient_tol = get_as<double>(f, "gradient_tol", "fit");
    if (f.contains("modulus_bound")) c.fit.modulus_bound = get_as<double>(f, "modulus_bound", "fit");
    if (f.contains("ridge")) {
      if (f["ridge"] == "auto") {
        c.fit.ridge.reset();
      } else {
        c.fit.ridge = get_as<double>(f, "ridge", "fit");
      }
    }
    if (f.contains("pencil_start")) c.fit.pencil_start = get_as<bool>(f, "pencil_start", "fit");
    if (f.contains("baseline_order")) c.baseline_order = get_as<int>(f, "baseline_order", "fit");
  }
  if (j.contains("estimation")) {
    const Json& e = j["estimation"];
    check_keys(e, {"amp_threshold", "phase_threshold", "resamples", "quantile_levels"}, "estimation");
    if (e.contains("amp_threshold")) c.estimation.amp_threshold = get_as<double>(e, "amp_threshold", "estimation");
    if (e.contains("phase_threshold")) {
      c.estimation.phase_threshold = get_as<double>(e, "phase_threshold", "estimation");
    }
    if (e.contains("resamples")) c.estimation.resamples = get_as<int>(e, "resamples", "estimation");
    if (e.contains("quantile_levels")) {
      const Json& q = e["quantile_levels"];
      if (!q.is_array() || q.size() != 2 || !q[0].is_number() || !q[1].is_number()) {
        throw ConfigError("estimation: \"quantile_levels\" must be two numbers");
      }
      c.estimation.level_low = q[0].get<double>();
      c.estimation.level_high = q[1].get<double>();
    }
  }
  c.estimation.seed = c.seed;

  if (c.shots < 1) throw ConfigError("shots must be at least 1");
  if (c.l_max < 12) throw ConfigError("l_max must be at least 12");
  if (c.calibrated && !(c.target_fidelity > 0.5 && c.target_fidelity <= 1.0)) {
    throw ConfigError("calibration target must lie in (0.5, 1]");
  }
  if (!(c.calibration_tolerance > 0.0)) throw ConfigError("calibration tolerance must be positive");
  if (!(c.theta_ratio >= 0.0)) throw ConfigError("theta_ratio must be non-negative");
  if (c.fit.max_iterations < 1) throw ConfigError("fit: max_iterations must be at least 1");
  if (c.fit.ridge && *c.fit.ridge < 0.0) throw ConfigError("fit: ridge must be non-negative");
  if (c.baseline_order < 1) throw ConfigError("fit: baseline_order must be at least 1");
  if (c.estimation.amp_threshold < 0.0) throw ConfigError("estimation: amp_threshold must be non-negative");
  if (!(c.estimation.phase_threshold > 0.0)) throw ConfigError("estimation: phase_threshold must be positive");
  if (c.estimation.resamples < 1) throw ConfigError("estimation: resamples must be at least 1");
  const double lo = c.estimation.level_low;
  const double hi = c.estimation.level_high;
  if (!(lo > 0.0 && lo < 0.5 && hi > 0.5 && hi < 1.0) || std::abs(lo + hi - 1.0) > 1e-12) {
    throw ConfigError("quantile levels must be symmetric about 0.5 and lie in (0, 1)");
  }
  return c;
}

Json config_to_json(const ExperimentConfig& c) {
  std::string gate = c.gate;
  if (gate != "toffoli" && fs::path(gate).is_relative() && !c.base_dir.empty()) {
    gate = (c.base_dir / gate).lexically_normal().string();
  }
  Json fit = fit_settings_json(c);
  return Json{{"schema", kConfigSchema},
              {"gate", gate},
              {"noise", noise_echo(c)},
              {"calibration", {{"tolerance", c.calibration_tolerance}, {"theta_ratio", c.theta_ratio}}},
              {"shots", c.shots},
              {"l_max", c.l_max},
              {"seed", c.seed},
              {"fit", fit},
              {"estimation",
               {{"amp_threshold", c.estimation.amp_threshold},
                {"phase_threshold", c.estimation.phase_threshold},
                {"resamples", c.estimation.resamples},
                {"quantile_levels", {c.estimation.level_low, c.estimation.level_high}}}},
              {"output_dir", c.output_dir}};
}

ExperimentConfig load_config(const fs::path& path) {
  Json j;
  try {
    j = read_json_file(path);
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
  return config_from_json(j, path.parent_path());
}

UnitaryGate resolve_gate(const ExperimentConfig& config) {
  if (config.gate == "toffoli") return toffoli_gate();
  fs::path p(config.gate);
  if (p.is_relative()) p = config.base_dir / p;
  CMatrix u = read_gate_matrix(p);
  try {
    return UnitaryGate(std::move(u));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("gate " + p.string() + ": " + e.what());
  }
}

ResolvedNoise resolve_noise(const ExperimentConfig& config, const UnitaryGate& gate) {
  const int d = gate.dim();
  if (config.calibrated) {
    CalibrationResult cal;
    try {
      cal = calibrated_default_noise(gate, config.target_fidelity, config.calibration_tolerance,
                                     config.theta_ratio);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    NoiseTriple specs = cal.noise;
    return ResolvedNoise{specs, cal, specs.gate.channel(), specs.prep.channel(), specs.meas.channel()};
  }
  if (config.explicit_noise.is_string()) {
    const int n = qubit_count(d);
    NoiseTriple specs{NoiseSpec::uniform(NoisePlacement::kGate, {}, n),
                      NoiseSpec::uniform(NoisePlacement::kPrep, {}, n),
                      NoiseSpec::uniform(NoisePlacement::kMeas, {}, n)};
    return ResolvedNoise{specs, std::nullopt, QuantumChannel::identity(d), QuantumChannel::identity(d),
                         QuantumChannel::identity(d)};
  }
  const int n = qubit_count(d);
  const Json& j = config.explicit_noise;
  NoiseTriple specs;
  try {
    specs.gate = noise_spec_from_json(j.at("gate"), NoisePlacement::kGate, n);
    specs.prep = noise_spec_from_json(j.contains("prep") ? j.at("prep") : j.at("gate"), NoisePlacement::kPrep, n);
    specs.meas = noise_spec_from_json(j.contains("meas") ? j.at("meas") : j.at("gate"), NoisePlacement::kMeas, n);
    return ResolvedNoise{specs, std::nullopt, specs.gate.channel(), specs.prep.channel(), specs.meas.channel()};
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("noise: ") + e.what());
  }
}

fs::path sidecar_path_for(const fs::path& curves_path) {
  fs::path p = curves_path;
  return p.replace_filename(curves_path.stem().string() + ".sidecar.json");
}

SimulateResult cmd_simulate(const ExperimentConfig& config, const SimulateOptions& options) {
  const UnitaryGate gate = resolve_gate(config);
  const ResolvedNoise noise = resolve_noise(config, gate);
  const double oracle = process_fidelity(gate, compose(noise.gate, QuantumChannel::unitary(gate.matrix())));

  ProtocolSettings ps;
  ps.l_max = config.l_max;
  ps.shots = config.shots;
  ps.seed = config.seed;
  ps.exact = options.exact;
  const auto curves = run_protocol(gate, noise.gate, noise.prep, noise.meas, ps);

  const fs::path out = options.out_dir.empty() ? fs::path(config.output_dir) : options.out_dir;
  SimulateResult result;
  result.curves_path = out / "curves.json";
  result.sidecar_path = sidecar_path_for(result.curves_path);
  result.oracle_fidelity = oracle;

  Json calibration = nullptr;
  if (noise.calibration) {
    calibration = {{"target_fidelity", config.target_fidelity},
                   {"tolerance", config.calibration_tolerance},
                   {"gamma", noise.calibration->gamma},
                   {"theta", noise.calibration->theta},
                   {"theta_ratio", noise.calibration->theta_ratio}};
  }
  Json sidecar{{"schema", kSidecarSchema},
               {"oracle_fidelity", oracle},
               {"exact", options.exact},
               {"calibration", calibration},
               {"noise",
                {{"gate", noise_spec_to_json(noise.specs.gate)},
                 {"prep", noise_spec_to_json(noise.specs.prep)},
                 {"meas", noise_spec_to_json(noise.specs.meas)}}},
               {"composition_order", kCompositionNote},
               {"seed_scheme", kSeedNote},
               {"config", config_to_json(config)}};
  write_json_file(result.curves_path, curves_to_json(curves));
  write_json_file(result.sidecar_path, sidecar);
  return result;
}

FidelityReport cmd_process(const ExperimentConfig& config, const ProcessOptions& options) {
  const UnitaryGate gate = resolve_gate(config);
  const EigenbasisFrame frame = eigenbasis_frame(gate);
  const auto curves = curves_from_json(read_json_file(options.curves_path));
  if (curves.empty()) throw DataError("curve file holds no records");
  for (const auto& c : curves) {
    if (c.b >= gate.dim()) {
      throw DataError("curve (" + std::to_string(c.a) + "," + std::to_string(c.b) +
                      ") indexes past the gate dimension " + std::to_string(gate.dim()));
    }
  }

  const auto fits = fit_all(curves, frame, config, false);
  FidelityReport report = build_report(fits, frame, config.estimation);

  std::vector<ExponentialFit> baseline;
  if (options.baseline) {
    baseline = fit_all(curves, frame, config, true);
    report.baseline_estimate = baseline_estimate(baseline, frame).value;
  }
  const fs::path sidecar = sidecar_path_for(options.curves_path);
  if (fs::exists(sidecar)) {
    const Json s = read_json_file(sidecar);
    if (s.contains("oracle_fidelity") && s["oracle_fidelity"].is_number()) {
      report.oracle_fidelity = s["oracle_fidelity"].get<double>();
    }
  }

  const fs::path out = options.out_dir.empty() ? fs::path(config.output_dir) : options.out_dir;
  Json rj = report_to_json(report);
  rj["schema"] = kReportSchema;
  rj["fit_settings"] = fit_settings_json(config);
  rj["seed_scheme"] = kSeedNote;
  rj["config"] = config_to_json(config);
  write_json_file(out / "report.json", rj);
  write_json_file(out / "fits.json", fits_to_json(fits));
  if (options.baseline) write_json_file(out / "fits_baseline.json", fits_to_json(baseline));
  write_text_file(out / "curves_fit.csv", curves_csv(curves, fits, baseline));
  write_text_file(out / "eigenvalues.csv", eigenvalues_csv(report.eigenvalues));
  write_text_file(out / "bootstrap_histogram.csv", histogram_csv(report.bootstrap_samples));
  if (options.svg) {
    write_text_file(out / "curves.svg", curves_svg(curves, fits));
    write_text_file(out / "eigenvalues_polar.svg", polar_svg(report.eigenvalues));
    write_text_file(out / "bootstrap_histogram.svg", histogram_svg(report));
  }
  return report;
}

std::string format_report(const FidelityReport& r) {
  std::ostringstream out;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "FEI = [%.6f, %.6f]\n", r.fei_low, r.fei_high);
  out << buf;
  out << "midpoint = " << format("%.6f", r.midpoint) << "\n";
  out << "degenerate estimate = " << format("%.6f", r.degenerate_estimate)
      << (r.degenerate_single_group ? " (one subspace empty)" : "") << "\n";
  std::snprintf(buf, sizeof(buf), "kept eigenvalues = %d (d_ts = %d, d_ns = %d)\n", r.kept_count, r.d_ts, r.d_ns);
  out << buf;
  std::snprintf(buf, sizeof(buf), "thresholds: amp = %.6g, delta = %.6f\n", r.settings.amp_threshold,
                r.settings.phase_threshold);
  out << buf;
  std::snprintf(buf, sizeof(buf), "resamples = %d, quantiles = [%.6g, %.6g]\n", r.resamples, r.settings.level_low,
                r.settings.level_high);
  out << buf;
  out << "seed = " << r.settings.seed << "\n";
  if (r.oracle_fidelity) out << "oracle fidelity = " << format("%.6f", *r.oracle_fidelity) << "\n";
  if (r.baseline_estimate) out << "baseline estimate = " << format("%.6f", *r.baseline_estimate) << "\n";
  return out.str();
}

void cmd_report(const fs::path& report_path, std::ostream& out) {
  out << format_report(report_from_json(read_json_file(report_path)));
}

}  // namespace csb
