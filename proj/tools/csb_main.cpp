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

// csb: simulate decay curves, fit them and estimate the gate fidelity.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "csb/app.hpp"

namespace fs = std::filesystem;

namespace {

struct Args {
  std::string config;
  std::string curves;
  std::string report;
  std::string out;
  bool baseline = false;
  bool exact = false;
  bool svg = false;
  std::optional<std::uint64_t> seed;
};

csb::ExperimentConfig config_for(const Args& args) {
  csb::ExperimentConfig c = csb::load_config(args.config);
  if (args.seed) {
    c.seed = *args.seed;
    c.estimation.seed = *args.seed;
  }
  return c;
}

// Without --config, process falls back on the config echo that simulate left
// next to the curves. Ingested data has no such file and needs a gate.
csb::ExperimentConfig process_config(const Args& args) {
  if (!args.config.empty()) return config_for(args);
  const fs::path sidecar = csb::sidecar_path_for(args.curves);
  if (!fs::exists(sidecar)) {
    throw csb::ConfigError("no gate definition for " + args.curves +
                           ": pass --config with a \"gate\" entry");
  }
  const csb::Json s = csb::read_json_file(sidecar);
  if (!s.contains("config")) throw csb::ConfigError(sidecar.string() + " carries no config echo");
  csb::ExperimentConfig c = csb::config_from_json(s["config"], sidecar.parent_path());
  if (args.seed) {
    c.seed = *args.seed;
    c.estimation.seed = *args.seed;
  }
  return c;
}

void print_summary(const csb::FidelityReport& report, const fs::path& out) {
  std::cout << csb::format_report(report);
  std::cout << "wrote " << (out / "report.json").string() << "\n";
}

int run(CLI::App& app, const Args& args) {
  if (app.got_subcommand("default-config")) {
    csb::ExperimentConfig c;
    std::cout << csb::config_to_json(c).dump(2) << "\n";
    return csb::kExitOk;
  }
  if (app.got_subcommand("simulate")) {
    const auto c = config_for(args);
    const auto r = csb::cmd_simulate(c, {args.out, args.exact});
    std::cout << "oracle fidelity = " << r.oracle_fidelity << "\n";
    std::cout << "wrote " << r.curves_path.string() << "\n";
    return csb::kExitOk;
  }
  if (app.got_subcommand("process")) {
    const auto c = process_config(args);
    const fs::path out = args.out.empty() ? fs::path(c.output_dir) : fs::path(args.out);
    print_summary(csb::cmd_process(c, {args.curves, out, args.baseline, args.svg}), out);
    return csb::kExitOk;
  }
  if (app.got_subcommand("run")) {
    const auto c = config_for(args);
    const fs::path out = args.out.empty() ? fs::path(c.output_dir) : fs::path(args.out);
    const auto sim = csb::cmd_simulate(c, {out, args.exact});
    print_summary(csb::cmd_process(c, {sim.curves_path, out, args.baseline, args.svg}), out);
    return csb::kExitOk;
  }
  if (app.got_subcommand("report")) {
    csb::cmd_report(args.report, std::cout);
    return csb::kExitOk;
  }
  std::cerr << app.help();
  return csb::kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Channel spectrum benchmarking: simulate, fit and estimate gate fidelity"};
  app.require_subcommand(1);
  Args args;
  std::uint64_t seed = 0;
  std::vector<CLI::Option*> seed_options;

  auto add_seed = [&](CLI::App* sub) {
    seed_options.push_back(sub->add_option("--seed", seed, "Master seed, overrides the config"));
  };

  auto* sim = app.add_subcommand("simulate", "Write curves.json and its sidecar");
  sim->add_option("--config", args.config, "Experiment config JSON")->required()->check(CLI::ExistingFile);
  sim->add_option("--out", args.out, "Output directory");
  sim->add_flag("--exact", args.exact, "Exact probabilities, no shot sampling");
  add_seed(sim);

  auto* proc = app.add_subcommand("process", "Fit curves and write the fidelity report");
  proc->add_option("--curves", args.curves, "Curve JSON")->required()->check(CLI::ExistingFile);
  proc->add_option("--config", args.config, "Experiment config JSON")->check(CLI::ExistingFile);
  proc->add_option("--out", args.out, "Output directory");
  proc->add_flag("--baseline", args.baseline, "Also run the four-term matrix pencil baseline");
  proc->add_flag("--svg", args.svg, "Also render SVG figures");
  add_seed(proc);

  auto* all = app.add_subcommand("run", "simulate followed by process");
  all->add_option("--config", args.config, "Experiment config JSON")->required()->check(CLI::ExistingFile);
  all->add_option("--out", args.out, "Output directory");
  all->add_flag("--exact", args.exact, "Exact probabilities, no shot sampling");
  all->add_flag("--baseline", args.baseline, "Also run the four-term matrix pencil baseline");
  all->add_flag("--svg", args.svg, "Also render SVG figures");
  add_seed(all);

  auto* rep = app.add_subcommand("report", "Print a report summary");
  rep->add_option("report", args.report, "report.json")->required()->check(CLI::ExistingFile);

  app.add_subcommand("default-config", "Print the default config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? csb::kExitOk : csb::kExitConfig;
  }
  for (const auto* opt : seed_options) {
    if (opt->count() > 0) args.seed = seed;
  }

  try {
    return run(app, args);
  } catch (const csb::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return csb::kExitConfig;
  } catch (const csb::CalibrationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return csb::kExitConfig;
  } catch (const csb::EstimationError& e) {
    std::cerr << "estimation failed: " << e.what() << "\n";
    return csb::kExitEstimation;
  } catch (const csb::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return csb::kExitData;
  } catch (const std::exception& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return csb::kExitData;
  }
}
