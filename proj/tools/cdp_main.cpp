/*
 * Copyright 2026 The cdp Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Command-line front end: simulate, detect, evaluate.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "cdp/cli.hpp"

namespace {

/// Accepts "0.5" or a fraction such as "1/3".
double parse_scale(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return std::stod(text);
    return std::stod(text.substr(0, slash)) / std::stod(text.substr(slash + 1));
  } catch (const std::exception&) {
    throw cdp::InvalidArgument("invalid --scale '" + text + "'");
  }
}

std::string* add_config(CLI::App* cmd, std::string& path) {
  cmd->add_option("--config", path, "Flat key=value file mirroring the flags; flags given on the command line win");
  return &path;
}

/// Fills options of `cmd` that were not given on the command line from a
/// key=value file, parsed with CLI11's INI reader.
void apply_config(CLI::App* cmd, const std::string& path) {
  if (path.empty()) return;
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_file(path);
  } catch (const CLI::Error& e) {
    throw cdp::InvalidArgument("cannot read config '" + path + "': " + e.what());
  }
  for (const CLI::ConfigItem& item : items) {
    if (item.name == "++" || item.name == "--") continue;  // section markers
    CLI::Option* opt = cmd->get_option_no_throw("--" + item.name);
    if (opt == nullptr) throw cdp::InvalidArgument("config '" + path + "': unknown key '" + item.name + "'");
    if (opt->count() > 0) continue;
    if (opt->get_type_size() == 0) {
      // Flags: accept true/false style values.
      const std::string v = item.inputs.empty() ? "true" : item.inputs.front();
      if (v == "true" || v == "1" || v == "on" || v == "yes") opt->add_result(std::string("true"));
      else if (v != "false" && v != "0" && v != "off" && v != "no") {
        throw cdp::InvalidArgument("config '" + path + "': bad flag value for '" + item.name + "'");
      }
    } else {
      opt->add_result(item.inputs);
    }
    opt->run_callback();
  }
}

void require(CLI::App* cmd, const std::string& name) {
  if (cmd->get_option(name)->count() == 0) throw cdp::InvalidArgument(name + " is required");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Per-vertex change detection in dynamic networks (spectral embedding + Procrustes)"};
  app.set_version_flag("--version", CDP_VERSION);
  app.require_subcommand(1);

  std::string sim_config, det_config, ev_config;

  cdp::cli::SimulateOptions sim;
  std::string sim_scale = "1";
  auto* simulate = app.add_subcommand("simulate", "Generate a DCSBM change-scenario sequence");
  add_config(simulate, sim_config);
  simulate->add_option("--scenario", sim.scenario, "Scenario name")->capture_default_str();
  simulate->add_option("--change-type", sim.change_type, "point or interval")->capture_default_str();
  simulate->add_option("--T", sim.T, "Sequence length")->capture_default_str();
  simulate->add_option("--t-star", sim.t_star, "Change instant (interval start)")->capture_default_str();
  simulate->add_option("--t-end", sim.t_end, "Interval end")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Base seed")->capture_default_str();
  simulate->add_option("--scale", sim_scale, "Block-size multiplier, e.g. 1/3")->capture_default_str();
  simulate->add_flag("--freeze-theta", sim.freeze_theta, "Reuse one degree vector per model");
  simulate->add_option("--out", sim.out, "Output directory");

  cdp::cli::DetectOptions det;
  Eigen::Index det_n = 0;
  auto* detect = app.add_subcommand("detect", "Score vertex changes in an edge-list sequence");
  add_config(detect, det_config);
  detect->add_option("--input", det.input, "Edge-list file (t i j weight)");
  detect->add_option("--n", det_n, "Vertex count (default: header or 1 + max index)");
  detect->add_option("--method", det.method, "cdp, act or actm")->capture_default_str();
  detect->add_option("--window", det.window, "Window size w")->capture_default_str();
  detect->add_option("--epsilon", det.epsilon, "Rank-selection threshold")->capture_default_str();
  detect->add_option("--threshold", det.threshold, "z-score detection threshold")->capture_default_str();
  detect->add_option("--seed", det.seed, "Seed for the randomized rank test")->capture_default_str();
  detect->add_flag("--baseline-preprocess", det.baseline_preprocess, "Run act/actm on the log-scaled matrix");
  detect->add_option("--out", det.out, "Output directory");

  cdp::cli::EvaluateOptions ev;
  std::string ev_scale = "1";
  auto* evaluate = app.add_subcommand("evaluate", "Repeat a scenario and compute phi / log-odds / sign tests");
  add_config(evaluate, ev_config);
  evaluate->add_option("--scenario", ev.scenario, "Scenario name")->capture_default_str();
  evaluate->add_option("--change-type", ev.change_type, "point or interval")->capture_default_str();
  evaluate->add_option("--T", ev.T, "Sequence length")->capture_default_str();
  evaluate->add_option("--t-star", ev.t_star, "Change instant (interval start)")->capture_default_str();
  evaluate->add_option("--t-end", ev.t_end, "Interval end")->capture_default_str();
  evaluate->add_option("--method", ev.methods, "Methods (comma separated)")->delimiter(',')->capture_default_str();
  evaluate->add_option("--window", ev.windows, "Window sizes (comma separated)")->delimiter(',')->capture_default_str();
  evaluate->add_option("--runs", ev.runs, "Simulation runs")->capture_default_str();
  evaluate->add_option("--seed", ev.seed, "Base seed")->capture_default_str();
  evaluate->add_option("--scale", ev_scale, "Block-size multiplier, e.g. 1/3")->capture_default_str();
  evaluate->add_option("--samples", ev.samples, "Sample count N for phi")->capture_default_str();
  evaluate->add_option("--epsilon", ev.epsilon, "Rank-selection threshold")->capture_default_str();
  evaluate->add_flag("--baseline-preprocess", ev.baseline_preprocess, "Run act/actm on the log-scaled matrix");
  evaluate->add_flag("--freeze-theta", ev.freeze_theta, "Reuse one degree vector per model");
  evaluate->add_option("--out", ev.out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    if (*simulate) {
      apply_config(simulate, sim_config);
      require(simulate, "--out");
      sim.scale = parse_scale(sim_scale);
      cdp::cli::cmd_simulate(sim);
    } else if (*detect) {
      apply_config(detect, det_config);
      require(detect, "--input");
      require(detect, "--out");
      if (det_n > 0) det.n = det_n;
      cdp::cli::cmd_detect(det);
    } else if (*evaluate) {
      apply_config(evaluate, ev_config);
      require(evaluate, "--out");
      ev.scale = parse_scale(ev_scale);
      cdp::cli::cmd_evaluate(ev);
    }
  } catch (const cdp::cli::StageFailure& e) {
    std::cerr << "cdp " << command << ": " << e.diagnostic() << '\n';
    return 1;
  } catch (const cdp::Error& e) {
    std::cerr << "cdp " << command << ": setup failed"
              << (e.time() ? " at t=" + std::to_string(*e.time()) : std::string()) << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "cdp " << command << ": " << e.what() << '\n';
    return 1;
  }
  return 0;
}
