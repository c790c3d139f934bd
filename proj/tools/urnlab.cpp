// Copyright 2026 The urnlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// urnlab <experiment> --config <path> [--seed S] [--out path.csv] [flags]
//
// Exit codes: 0 all assertions passed, 1 assertion failure, 2 usage or
// configuration error.

#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "urnlab/config.hpp"
#include "urnlab/experiments.hpp"
#include "urnlab/version.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SBARW urn simulator and verification harness"};
  // "--h" is the box width, so help is long-form only.
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_version_flag("--version", std::string(urnlab::artifact_version()));

  std::string experiment;
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;
  std::vector<std::string> sets;

  app.add_option("experiment", experiment,
                 "grow | theorem-check | coupling-check | record-identity | "
                 "tv-identity | schedule-table | aux-walk-check")
      ->required();
  app.add_option("--config", config_path, "flat key = value config file");

  // Flag name -> config key.
  const std::vector<std::pair<std::string, std::string>> flag_keys = {
      {"--seed", "seed"},
      {"--out", "out"},
      {"--model", "model"},
      {"--n", "n"},
      {"--n-from", "n_from"},
      {"--n-to", "n_to"},
      {"--m", "m"},
      {"--h", "h"},
      {"--gamma", "gamma"},
      {"--mode", "mode"},
      {"--replicas", "replicas"},
      {"--workers", "workers"},
      {"--pairs", "pairs"},
      {"--samples", "samples"},
  };
  std::vector<std::string> flag_values(flag_keys.size());
  for (std::size_t i = 0; i < flag_keys.size(); ++i) {
    app.add_option(flag_keys[i].first, flag_values[i],
                   "overrides config key '" + flag_keys[i].second + "'");
  }
  bool allow_large_n = false;
  app.add_flag("--allow-large-n", allow_large_n,
               "lift the 10^7 ball memory guard");
  app.add_option("--set", sets, "extra key=value override (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  urnlab::ExperimentConfig config;
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path, std::ios::binary);
      if (!in) {
        std::cerr << "urnlab: cannot read config '" << config_path << "'\n";
        return kExitUsage;
      }
      const std::string text((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
      config = urnlab::parse_config(text);
    }
    urnlab::apply_setting(config, "experiment", experiment);
    for (std::size_t i = 0; i < flag_keys.size(); ++i) {
      if (!flag_values[i].empty()) {
        urnlab::apply_setting(config, flag_keys[i].second, flag_values[i]);
      }
    }
    for (const std::string& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) {
        throw urnlab::ConfigError(0, s, "--set expects key=value");
      }
      urnlab::apply_setting(config, s.substr(0, eq), s.substr(eq + 1));
    }
    if (allow_large_n) urnlab::apply_setting(config, "allow_large_n", "true");
    urnlab::finalize_config(config);
  } catch (const std::exception& e) {
    std::cerr << "urnlab: " << e.what() << '\n';
    return kExitUsage;
  }

  urnlab::Report report;
  try {
    report = urnlab::run_experiment(config);
  } catch (const std::domain_error& e) {
    std::cerr << "urnlab: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "urnlab: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "urnlab: " << e.what() << '\n';
    return kExitFail;
  }

  if (config.out.empty() || config.out == "-") {
    urnlab::write_report_csv(std::cout, report);
    urnlab::write_report_meta_json(std::cerr, report, config);
  } else {
    std::ofstream out(config.out, std::ios::binary | std::ios::trunc);
    std::ofstream meta(config.out + ".meta.json",
                       std::ios::binary | std::ios::trunc);
    if (!out || !meta) {
      std::cerr << "urnlab: cannot write '" << config.out << "'\n";
      return kExitUsage;
    }
    urnlab::write_report_csv(out, report);
    urnlab::write_report_meta_json(meta, report, config);
  }
  for (const std::string& note : report.notes) {
    std::cerr << "urnlab: " << note << '\n';
  }
  return report.passed ? kExitPass : kExitFail;
}
