// Copyright (c) 2026 The fairot authors.
//
// This software is licensed under the Apache License, Version 2.0 (the "License").
// You may not use this file except in compliance with the License. You may
// obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fairot {

/// Options shared by the command-line entry points.
struct RunConfig {
  std::string input_csv;       // population to repair/sweep
  std::string synthetic_spec;  // JSON spec; empty = built-in default
  std::string raw_csv;         // evaluate: raw population
  std::string repaired_csv;    // evaluate: repaired population
  double bin_width = 1.0;
  double theta = 1.0;
  std::vector<std::string> theta_group;  // "<feature>=<value>[,...]:<theta>" selectors
  std::size_t k_step = 0;                // 0 = 1000 for populations >= 50000, else 100
  double threshold = 0.8;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::vector<double> thetas;  // sweep values
};

/// Strictly increasing cutoff grid: multiples of the step, always ending at
/// the population size. step 0 selects the population-sized default.
std::vector<std::size_t> default_k_grid(std::size_t population, std::size_t step);

void cmd_generate(const RunConfig& config);
void cmd_repair(const RunConfig& config);
void cmd_evaluate(const RunConfig& config);
void cmd_sweep(const RunConfig& config);

}  // namespace fairot
