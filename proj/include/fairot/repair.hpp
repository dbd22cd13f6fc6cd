// Copyright (c) 2026 The fairot authors.
//
// This software is licensed under the Apache License, Version 2.0 (the "License").
// You may not use this file except in compliance with the License. You may
// obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0.

#pragma once

#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fairot/barycenter.hpp"
#include "fairot/distribution.hpp"
#include "fairot/population.hpp"
#include "fairot/transport.hpp"
#include "fairot/types.hpp"

namespace fairot {

inline constexpr std::size_t kSmallGroupSize = 30;
inline constexpr Index kMaxGridSize = 100000;

/// Per-group fairness parameter: 0 keeps raw scores, 1 pushes a group fully
/// onto the barycenter. Groups without an override use the default.
struct ThetaPolicy {
  double default_theta = 1.0;
  std::map<GroupKey, double> overrides;

  double for_group(const GroupKey& key) const {
    const auto it = overrides.find(key);
    return it == overrides.end() ? default_theta : it->second;
  }

  void validate() const {
    const auto check = [](double v) {
      if (!(v >= 0.0) || !(v <= 1.0)) {
        throw std::domain_error("fairness parameter must lie in [0, 1]");
      }
    };
    check(default_theta);
    for (const auto& [key, v] : overrides) check(v);
  }
};

/// Outcome of repairing a scored population.
///
/// fair_scores is aligned with the input record order. group_maps carry the
/// per-group partial transports; fair_group_dists are the corresponding
/// distributions realized on the barycenter's mass grid, so at theta = 1
/// they coincide with the barycenter exactly.
struct RepairResult {
  GroupPartition partition;
  ArrayXd fair_scores;
  std::vector<double> thetas;  // resolved per group
  std::vector<MonotoneMap<double>> group_maps;
  std::vector<EmpiricalDistribution<double>> raw_group_dists;
  std::vector<EmpiricalDistribution<double>> fair_group_dists;
  EmpiricalDistribution<double> barycenter_dist;
  EmpiricalDistribution<double> aggregate_fair;
  double bin_width = 1.0;
  Index grid_size = 0;
  double grid_resolution = 0.0;
  std::vector<std::size_t> small_groups;  // indices of groups under kSmallGroupSize
};

/// Exact-match application of a repair map to one raw score.
/// Throws when the score is off the map's support, which signals a
/// partition/map mismatch upstream.
inline double apply_map_to_individual(double raw_score, const MonotoneMap<double>& map) {
  return map.at(raw_score);
}

/// Repair a scored population.
///
/// Pipeline: partition by traits, bin each group's raw scores, compute the
/// weighted barycenter of the group distributions, interpolate each group's
/// transport by its fairness parameter, and send every individual through
/// its group map at the individual's bin center. Groups with parameter zero
/// keep their raw scores bit-for-bit.
///
/// grid_size 0 selects the default: one grid node per individual, capped.
inline RepairResult repair(std::span<const ScoreRecord> records,
                           const std::vector<std::string>& schema, const ThetaPolicy& policy,
                           double bin_width, Index grid_size = 0) {
  if (!(bin_width > 0.0)) throw std::invalid_argument("bin width must be positive");
  policy.validate();

  GroupPartition partition = partition_population(records, schema);
  const std::size_t group_count = partition.group_count();

  for (const auto& [key, v] : policy.overrides) {
    if (!partition.find(key)) {
      throw std::invalid_argument("fairness override for unknown group '" + key.label() + "'");
    }
  }

  std::vector<double> thetas(group_count);
  std::vector<std::size_t> small_groups;
  std::vector<EmpiricalDistribution<double>> raw_dists;
  raw_dists.reserve(group_count);
  for (std::size_t g = 0; g < group_count; ++g) {
    thetas[g] = policy.for_group(partition.keys[g]);
    if (partition.members[g].size() < kSmallGroupSize) small_groups.push_back(g);
    raw_dists.push_back(group_distribution(records, partition.members[g], bin_width));
  }

  if (grid_size <= 0) {
    grid_size = std::min<Index>(static_cast<Index>(records.size()), kMaxGridSize);
  }
  BarycenterResult<double> bary = barycenter(raw_dists, partition.weights, grid_size);

  ArrayXd fair(static_cast<Index>(records.size()));
  std::vector<MonotoneMap<double>> group_maps;
  std::vector<EmpiricalDistribution<double>> fair_dists;
  group_maps.reserve(group_count);
  fair_dists.reserve(group_count);
  for (std::size_t g = 0; g < group_count; ++g) {
    const double theta = thetas[g];
    auto [map, image] = displacement_interpolate(raw_dists[g], bary.maps[g], theta);
    (void)image;  // the reported group distribution is realized on the mass grid instead
    const ArrayXd group_grid = raw_dists[g].quantile_grid(grid_size);
    fair_dists.push_back(grid_measure<double>((1.0 - theta) * group_grid +
                                              theta * bary.grid_quantiles));
    for (const std::size_t i : partition.members[g]) {
      if (theta == 0.0) {
        fair(static_cast<Index>(i)) = records[i].raw_score;
      } else {
        fair(static_cast<Index>(i)) = map.at(bin_center(records[i].raw_score, bin_width));
      }
    }
    group_maps.push_back(std::move(map));
  }

  EmpiricalDistribution<double> aggregate = mixture(fair_dists, partition.weights);

  return RepairResult{std::move(partition),
                      std::move(fair),
                      std::move(thetas),
                      std::move(group_maps),
                      std::move(raw_dists),
                      std::move(fair_dists),
                      std::move(bary.barycenter),
                      std::move(aggregate),
                      bin_width,
                      grid_size,
                      bary.grid_resolution,
                      std::move(small_groups)};
}

}  // namespace fairot
