// Copyright (c) 2026 The fairot authors.
//
// This software is licensed under the Apache License, Version 2.0 (the "License").
// You may not use this file except in compliance with the License. You may
// obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fairot/population.hpp"
#include "fairot/types.hpp"

namespace fairot {

/// Parameters of one synthetic group: trait values, member count, and the
/// truncated integer normal its scores are drawn from.
struct SyntheticGroupSpec {
  GroupKey key;
  std::size_t count = 0;
  double mean = 0.0;
  double std_dev = 1.0;
};

/// Full synthetic population specification. Scores are integers drawn from
/// per-group normals and redrawn (not clamped) when they land outside
/// [min_score, max_score].
struct SyntheticSpec {
  std::vector<std::string> schema;  // protected feature names
  std::vector<SyntheticGroupSpec> groups;
  long long min_score = 0;
  long long max_score = 100;
  std::uint64_t seed = 1;

  void validate() const;
};

/// The spec shipped with the tool: six groups over gender x ethnicity,
/// 100,000 individuals, integer scores in [3, 88], with three groups
/// centered visibly lower than the other three.
SyntheticSpec default_synthetic_spec();

/// Read a synthetic spec from its JSON description.
SyntheticSpec load_synthetic_spec(const std::filesystem::path& path);

/// Draw the population described by the spec. Deterministic for a fixed
/// seed and build; ids are sequential and zero-padded.
std::vector<ScoreRecord> generate_synthetic(const SyntheticSpec& spec);

/// Feature names of a population CSV: the header columns between id and score.
std::vector<std::string> read_population_schema(const std::filesystem::path& path);

/// Load a population CSV with header `id,<features...>,score`.
std::vector<ScoreRecord> load_population_csv(const std::filesystem::path& path,
                                             const std::vector<std::string>& schema);

/// Write a population CSV with header `id,<features...>,score`.
void write_population_csv(const std::filesystem::path& path,
                          std::span<const ScoreRecord> records,
                          const std::vector<std::string>& schema);

/// Write repaired scores as `id,<features...>,raw_score,fair_score`,
/// rows in ascending id order.
void write_repair_csv(const std::filesystem::path& path, std::span<const ScoreRecord> records,
                      const std::vector<std::string>& schema, const ArrayXd& fair_scores);

/// A repaired population read back from disk; fair_scores aligns with records.
struct RepairedPopulation {
  std::vector<ScoreRecord> records;  // raw_score carries the raw column
  ArrayXd fair_scores;
};

/// Load a repaired-score CSV written by write_repair_csv.
RepairedPopulation load_repair_csv(const std::filesystem::path& path,
                                   const std::vector<std::string>& schema);

/// Render a double with 12 significant digits (the file interchange format).
std::string format_number(double value);

}  // namespace fairot
