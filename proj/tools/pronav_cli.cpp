// Copyright 2026 The pronav Authors.
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

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pronav/pronav.hpp"

namespace {

int exit_code(const std::exception& e) {
  if (dynamic_cast<const pronav::ParseError*>(&e)) return 2;
  if (dynamic_cast<const pronav::SchemaError*>(&e)) return 2;
  if (dynamic_cast<const pronav::CalibrationError*>(&e)) return 3;
  if (dynamic_cast<const pronav::SignalQualityError*>(&e)) return 4;
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Proprioceptive terrain traversability and gait selection"};
  app.require_subcommand(1);

  std::string logs_dir, out, profile_path, input = "-", vel = "const:0.5,0", scenario,
                                            params_path, gait = "trot", decisions_out;
  double chi2 = 0;
  double seconds = 60;
  std::uint64_t seed = 1;
  std::vector<std::string> eval_logs, eval_decisions;
  std::string eval_csv, method = "pronav", scenario_name = "default";
  double goal_x = 0, goal_y = 0;

  auto* calibrate = app.add_subcommand("calibrate", "fit a calibration profile from labeled logs");
  calibrate->add_option("--logs", logs_dir, "directory of labeled .jsonl logs")->required();
  calibrate->add_option("--out", out, "profile path")->required();
  calibrate->add_option("--chi2", chi2, "terrain-gait ellipse level");

  auto* run = app.add_subcommand("run", "stream a log through the pipeline");
  run->add_option("--profile", profile_path)->required();
  run->add_option("--input", input, "log path or - for stdin");
  run->add_option("--vel", vel, "replay:FILE or const:V,W");
  run->add_option("--out", out, "decision stream path or - for stdout")->required();

  auto* simulate = app.add_subcommand("simulate", "generate a telemetry log from a scenario");
  simulate->add_option("--scenario", scenario)->required();
  simulate->add_option("--params", params_path, "terrain parameter table (defaults built in)");
  simulate->add_option("--seed", seed);
  simulate->add_option("--gait", gait, "fixed gait: trot, crawl or amble");
  simulate->add_option("--profile", profile_path, "run the gait policy in the loop");
  simulate->add_option("--out", out)->required();

  auto* corpus = app.add_subcommand("corpus", "write the simulated calibration corpus");
  corpus->add_option("--out", out, "output directory")->required();
  corpus->add_option("--params", params_path);
  corpus->add_option("--seconds", seconds);
  corpus->add_option("--seed", seed)->default_val(pronav::kCorpusSeed);

  auto* params = app.add_subcommand("params", "write the default terrain parameter table");
  params->add_option("--out", out)->required();

  auto* evaluate = app.add_subcommand("evaluate", "compute trial metrics");
  evaluate->add_option("--logs", eval_logs)->required();
  evaluate->add_option("--decisions", eval_decisions)->required();
  evaluate->add_option("--profile", profile_path)->required();
  evaluate->add_option("--goal-x", goal_x);
  evaluate->add_option("--goal-y", goal_y);
  evaluate->add_option("--method", method);
  evaluate->add_option("--scenario", scenario_name);
  evaluate->add_option("--out", out, "JSON report")->required();
  evaluate->add_option("--csv", eval_csv, "CSV table")->required();

  auto* plot = app.add_subcommand("plot", "render decisions over the calibrated zones");
  plot->add_option("--profile", profile_path)->required();
  plot->add_option("--decisions", decisions_out)->required();
  plot->add_option("--out", out, "SVG path; a .csv with the points is written next to it")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    pronav::Config cfg = pronav::config_from_env();
    if (*calibrate) {
      if (chi2 > 0) cfg.chi2 = chi2;
      const auto result = pronav::cmd_calibrate(logs_dir, out, cfg);
      for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
      std::cerr << "lvz " << result.profile.lvz_id << ", " << result.profile.ellipses.size()
                << " ellipses\n";
    } else if (*run) {
      const auto profile = pronav::load_profile(profile_path);
      auto source = pronav::parse_velocity_source(vel);
      std::ifstream file;
      std::istream* in = &std::cin;
      if (input != "-") {
        file.open(input);
        if (!file) throw pronav::Error("cannot open " + input);
        in = &file;
      }
      if (out == "-") {
        pronav::cmd_run(profile, cfg, *in, *source, std::cout);
      } else {
        std::ofstream os(out);
        if (!os) throw pronav::Error("cannot write " + out);
        pronav::cmd_run(profile, cfg, *in, *source, os);
      }
    } else if (*simulate) {
      const auto table =
          params_path.empty() ? pronav::default_param_table() : pronav::load_param_table(params_path);
      pronav::SimulateOptions opt;
      opt.seed = seed;
      auto g = pronav::gait_from_string(gait);
      if (!g) throw pronav::ConfigError("unknown gait '" + gait + "'");
      opt.fixed_gait = *g;
      if (!profile_path.empty()) opt.profile = pronav::load_profile(profile_path);
      pronav::cmd_simulate(pronav::load_scenario(scenario), table, cfg, opt, out);
    } else if (*corpus) {
      const auto table =
          params_path.empty() ? pronav::default_param_table() : pronav::load_param_table(params_path);
      pronav::cmd_corpus(out, table, seconds, seed);
    } else if (*params) {
      std::ofstream(out) << pronav::param_table_to_json(pronav::default_param_table()).dump(2)
                         << '\n';
    } else if (*evaluate) {
      pronav::EvaluateOptions opt;
      opt.goal = {goal_x, goal_y};
      opt.method = method;
      opt.scenario = scenario_name;
      pronav::cmd_evaluate(eval_logs, eval_decisions, pronav::load_profile(profile_path), cfg, opt,
                           out, eval_csv);
    } else if (*plot) {
      pronav::cmd_plot(pronav::load_profile(profile_path), decisions_out, out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e);
  }
  return 0;
}
