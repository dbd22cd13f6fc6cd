// Copyright (c) 2026 The fairot authors.
//
// This software is licensed under the Apache License, Version 2.0 (the "License").
// You may not use this file except in compliance with the License. You may
// obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0.

#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fairot/distribution.hpp"
#include "fairot/types.hpp"

namespace fairot {

/// One scored individual: unique id, protected-feature values, raw score.
struct ScoreRecord {
  std::string id;
  std::vector<std::string> traits;
  double raw_score = 0.0;
};

/// Combination of protected-feature values identifying a group.
/// Ordered lexicographically so that group enumeration is deterministic.
struct GroupKey {
  std::vector<std::string> values;

  auto operator<=>(const GroupKey&) const = default;

  std::string label() const {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i > 0) out += '|';
      out += values[i];
    }
    return out;
  }
};

/// A population split into disjoint trait groups with population weights.
struct GroupPartition {
  std::vector<GroupKey> keys;                     // lexicographic order
  std::vector<std::vector<std::size_t>> members;  // record indices, ascending
  std::vector<double> weights;                    // group size / population size
  std::vector<std::size_t> group_of;              // record index -> group index
  std::size_t population = 0;

  std::size_t group_count() const { return keys.size(); }

  std::optional<std::size_t> find(const GroupKey& key) const {
    for (std::size_t g = 0; g < keys.size(); ++g) {
      if (keys[g] == key) return g;
    }
    return std::nullopt;
  }
};

/// Split records into groups by their trait vectors.
///
/// Every record belongs to exactly one group; weights are group counts over
/// the population size. Throws on an empty population or when a record's
/// trait vector does not match the schema length.
inline GroupPartition partition_population(std::span<const ScoreRecord> records,
                                           const std::vector<std::string>& schema) {
  if (records.empty()) {
    throw std::invalid_argument("cannot partition an empty population");
  }
  std::map<GroupKey, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].traits.size() != schema.size()) {
      throw std::invalid_argument("record '" + records[i].id +
                                  "' has a trait vector of unexpected length");
    }
    groups[GroupKey{records[i].traits}].push_back(i);
  }
  GroupPartition part;
  part.population = records.size();
  part.group_of.assign(records.size(), 0);
  const double total = static_cast<double>(records.size());
  for (auto& [key, idx] : groups) {
    const std::size_t g = part.keys.size();
    for (const std::size_t i : idx) part.group_of[i] = g;
    part.keys.push_back(key);
    part.weights.push_back(static_cast<double>(idx.size()) / total);
    part.members.push_back(std::move(idx));
  }
  return part;
}

/// Raw scores of all records as a dense array, aligned with record order.
inline ArrayXd raw_score_array(std::span<const ScoreRecord> records) {
  ArrayXd out(static_cast<Index>(records.size()));
  for (std::size_t i = 0; i < records.size(); ++i) {
    out(static_cast<Index>(i)) = records[i].raw_score;
  }
  return out;
}

/// Binned score distribution of one group of records.
inline EmpiricalDistribution<double> group_distribution(std::span<const ScoreRecord> records,
                                                        const std::vector<std::size_t>& members,
                                                        double bin_width) {
  std::vector<double> values;
  values.reserve(members.size());
  for (const std::size_t i : members) values.push_back(records[i].raw_score);
  return empirical_distribution<double>(values, bin_width);
}

}  // namespace fairot
