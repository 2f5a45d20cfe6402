// Copyright 2026 The dfgp Authors. All rights reserved.
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


// Command-line front end: dfgp {run,restart,verify,sweep,certify} --config PATH.
// The default worker count comes from DFGP_WORKERS.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "dfgp/io/config.hpp"
#include "dfgp/io/execute.hpp"

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<long> replicates;
  int workers = 0;
  std::string out;
  bool skip_certify = false;
};

void add_flags(CLI::App* cmd, Flags& flags) {
  cmd->add_option("--config", flags.config, "experiment config (JSON)")->required();
  cmd->add_option("--seed", flags.seed, "seed base, overrides run.seed");
  cmd->add_option("--replicates", flags.replicates, "replicate count")->check(CLI::PositiveNumber);
  cmd->add_option("--workers", flags.workers, "worker threads (default: $DFGP_WORKERS)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--out", flags.out, "output directory, overrides output.dir");
  cmd->add_flag("--skip-certify", flags.skip_certify, "skip the assumption certification");
}

int dispatch(dfgp::io::Mode mode, const Flags& flags) {
  namespace io = dfgp::io;
  io::ExperimentConfig config;
  const std::filesystem::path out_flag = flags.out;
  try {
    config = io::parse_config(flags.config, mode);
  } catch (const std::exception& e) {
    std::cerr << "dfgp: " << e.what() << "\n";
    if (!out_flag.empty()) {
      try {
        io::write_text(out_flag / "error.json", io::error_json(e).dump(2) + "\n");
      } catch (...) {
      }
    }
    return io::kExitError;
  }

  io::ExecuteOptions options;
  options.out_dir = out_flag;
  options.workers = flags.workers;
  options.seed = flags.seed;
  options.replicates = flags.replicates;
  options.skip_certify = flags.skip_certify;
  const io::ExecuteResult result = io::execute(config, options);

  if (result.certified) {
    std::cout << (*result.certified ? "PASS " : "FAIL ") << "certification\n";
  }
  for (const auto& report : result.reports) {
    std::cout << (report.passed ? "PASS " : "FAIL ") << report.lemma_id
              << " worst_ratio=" << report.worst_ratio << "\n";
  }
  if (!result.message.empty()) std::cerr << "dfgp: " << result.message << "\n";
  const std::string dir = out_flag.empty() ? config.output_dir : out_flag.string();
  std::cout << "artifacts: " << dir << "\n";
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Derivative-free gradient play in strongly monotone games"};
  app.set_version_flag("--version", std::string(dfgp::kVersion));
  app.require_subcommand(1);

  struct Entry {
    const char* name;
    const char* help;
    dfgp::io::Mode mode;
  };
  const Entry entries[] = {
      {"run", "replicated runs at epsilon or explicit (delta, T)", dfgp::io::Mode::kRun},
      {"restart", "staged runs with shrinking delta", dfgp::io::Mode::kRestart},
      {"verify", "numerical checks of the smoothing and rate bounds", dfgp::io::Mode::kVerify},
      {"sweep", "one replicated run per epsilon in sweep.epsilons", dfgp::io::Mode::kSweep},
      {"certify", "falsification test of the declared constants", dfgp::io::Mode::kCertify},
  };
  Flags flags;
  int exit_code = 0;
  for (const Entry& e : entries) {
    CLI::App* cmd = app.add_subcommand(e.name, e.help);
    add_flags(cmd, flags);
    const dfgp::io::Mode mode = e.mode;
    cmd->callback([&flags, &exit_code, mode] { exit_code = dispatch(mode, flags); });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : dfgp::io::kExitError;
  }
  return exit_code;
}
