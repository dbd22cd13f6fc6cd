// Copyright (c) 2026 The fairot authors.
//
// This software is licensed under the Apache License, Version 2.0 (the "License").
// You may not use this file except in compliance with the License. You may
// obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0.

#include <iostream>

#include <CLI11.hpp>

#include "fairot/cli.hpp"
#include "fairot/error.hpp"

namespace {

// Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
int dispatch(const std::string& command, const fairot::RunConfig& config) {
  try {
    if (command == "generate") {
      fairot::cmd_generate(config);
    } else if (command == "repair") {
      fairot::cmd_repair(config);
    } else if (command == "evaluate") {
      fairot::cmd_evaluate(config);
    } else {
      fairot::cmd_sweep(config);
    }
  } catch (const fairot::UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const fairot::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  fairot::RunConfig config;
  CLI::App app{"Optimal-transport score repair and fairness evaluation"};
  app.require_subcommand(1);

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", config.out_dir, "Output directory")->capture_default_str();
  };
  const auto add_repair_options = [&](CLI::App* cmd) {
    cmd->add_option("--input", config.input_csv, "Population CSV (id,<features...>,score)");
    cmd->add_option("--synthetic-spec", config.synthetic_spec,
                    "Synthetic population spec (JSON); built-in default when neither "
                    "--input nor --synthetic-spec is given");
    cmd->add_option("--seed", config.seed, "Override the synthetic spec's seed");
    cmd->add_option("--bin-width", config.bin_width, "Score bin width")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--theta-group", config.theta_group,
                    "Per-group fairness override, <feature>=<value>[,...]:<theta>; repeatable");
  };
  const auto add_eval_options = [&](CLI::App* cmd) {
    cmd->add_option("--k-step", config.k_step,
                    "Cutoff grid step (default 1000 for populations >= 50000, else 100)");
    cmd->add_option("--threshold", config.threshold,
                    "Disparity threshold (0.8 = US four-fifths rule, 0.75 = EU practice)")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
  };

  CLI::App* generate = app.add_subcommand("generate", "Draw a synthetic scored population");
  generate->add_option("--synthetic-spec", config.synthetic_spec,
                       "Synthetic population spec (JSON); built-in default when omitted");
  generate->add_option("--seed", config.seed, "Override the spec's seed");
  add_common(generate);

  CLI::App* repair = app.add_subcommand("repair", "Transport raw scores toward the barycenter");
  add_repair_options(repair);
  repair->add_option("--theta", config.theta, "Fairness parameter in [0, 1]")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  add_common(repair);

  CLI::App* evaluate =
      app.add_subcommand("evaluate", "Compare a repaired population against its raw scores");
  evaluate->add_option("raw", config.raw_csv, "Raw population CSV")->required();
  evaluate->add_option("repaired", config.repaired_csv, "Repaired CSV")->required();
  evaluate
      ->add_option("--bin-width", config.bin_width, "Score bin width")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  add_eval_options(evaluate);
  add_common(evaluate);

  CLI::App* sweep = app.add_subcommand("sweep", "Repair and evaluate over several thetas");
  add_repair_options(sweep);
  sweep->add_option("--thetas", config.thetas, "Fairness parameters to sweep")
      ->delimiter(',')
      ->required();
  add_eval_options(sweep);
  add_common(sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  return dispatch(app.get_subcommands().front()->get_name(), config);
}
