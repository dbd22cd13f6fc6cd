// Copyright (c) 2026 The fairot authors.
//
// This software is licensed under the Apache License, Version 2.0 (the "License").
// You may not use this file except in compliance with the License. You may
// obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "fairot/distribution.hpp"
#include "fairot/population.hpp"
#include "fairot/transport.hpp"
#include "fairot/types.hpp"

namespace fairot {

/// Record indices ordered best-first by (score descending, id ascending).
using Ranking = std::vector<std::size_t>;

inline Ranking rank_by_score(std::span<const ScoreRecord> records, const ArrayXd& scores) {
  if (static_cast<std::size_t>(scores.size()) != records.size()) {
    throw std::invalid_argument("one score per record required");
  }
  Ranking order(records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double sa = scores(static_cast<Index>(a));
    const double sb = scores(static_cast<Index>(b));
    if (sa != sb) return sa > sb;
    return records[a].id < records[b].id;
  });
  return order;
}

namespace detail {

inline void check_scores(const GroupPartition& partition, const ArrayXd& raw,
                         const ArrayXd& fair) {
  if (static_cast<std::size_t>(raw.size()) != partition.population ||
      static_cast<std::size_t>(fair.size()) != partition.population) {
    throw std::invalid_argument("raw and fair scores must cover the whole population");
  }
}

}  // namespace detail

/// Weighted within-group variance of the displacement (fair - raw).
///
/// Equals the group-averaged half mean squared difference of pairwise
/// displacement deltas, i.e. how much the repair distorts score differences
/// between members of the same group.
inline double individual_fairness_error(const GroupPartition& partition, const ArrayXd& raw,
                                        const ArrayXd& fair) {
  detail::check_scores(partition, raw, fair);
  double total = 0.0;
  for (std::size_t g = 0; g < partition.group_count(); ++g) {
    const auto& members = partition.members[g];
    double mean = 0.0;
    for (const std::size_t i : members) {
      mean += fair(static_cast<Index>(i)) - raw(static_cast<Index>(i));
    }
    mean /= static_cast<double>(members.size());
    double var = 0.0;
    for (const std::size_t i : members) {
      const double d = fair(static_cast<Index>(i)) - raw(static_cast<Index>(i)) - mean;
      var += d * d;
    }
    var /= static_cast<double>(members.size());
    total += partition.weights[g] * var;
  }
  return total;
}

/// Negative half of the weighted mean squared displacement; zero exactly
/// when no score moves.
inline double decision_maker_utility(const GroupPartition& partition, const ArrayXd& raw,
                                     const ArrayXd& fair) {
  detail::check_scores(partition, raw, fair);
  double total = 0.0;
  for (std::size_t g = 0; g < partition.group_count(); ++g) {
    const auto& members = partition.members[g];
    double mean_sq = 0.0;
    for (const std::size_t i : members) {
      const double d = fair(static_cast<Index>(i)) - raw(static_cast<Index>(i));
      mean_sq += d * d;
    }
    mean_sq /= static_cast<double>(members.size());
    total += partition.weights[g] * mean_sq;
  }
  return -0.5 * total;
}

/// Statistical-parity gap: the largest W2 distance from a group's fair
/// distribution to the weighted aggregate. Zero (up to grid resolution)
/// exactly when all groups share one fair distribution.
inline double parity_gap(const std::vector<EmpiricalDistribution<double>>& group_dists,
                         const std::vector<double>& weights) {
  const EmpiricalDistribution<double> aggregate = mixture(group_dists, weights);
  double gap = 0.0;
  for (const auto& dist : group_dists) {
    gap = std::max(gap, wasserstein2(dist, aggregate));
  }
  return gap;
}

/// Share of the raw top k retained in the fair top k.
inline double precision_at_k(const Ranking& raw_ranking, const Ranking& fair_ranking,
                             std::size_t k) {
  if (raw_ranking.size() != fair_ranking.size()) {
    throw std::invalid_argument("rankings must cover the same population");
  }
  if (k < 1 || k > raw_ranking.size()) throw std::domain_error("k outside [1, population]");
  std::vector<char> in_raw_top(raw_ranking.size(), 0);
  for (std::size_t n = 0; n < k; ++n) in_raw_top[raw_ranking[n]] = 1;
  std::size_t hits = 0;
  for (std::size_t n = 0; n < k; ++n) hits += in_raw_top[fair_ranking[n]];
  return static_cast<double>(hits) / static_cast<double>(k);
}

/// Normalized discounted cumulative gain of the fair ranking at cutoff k.
/// Gains are the raw scores; the raw ordering is the ideal ranking.
inline double ndcg_at_k(const ArrayXd& raw_scores, const Ranking& fair_ranking, std::size_t k) {
  if (static_cast<std::size_t>(raw_scores.size()) != fair_ranking.size()) {
    throw std::invalid_argument("one raw score per ranked record required");
  }
  if (k < 1 || k > fair_ranking.size()) throw std::domain_error("k outside [1, population]");
  if ((raw_scores < 0.0).any()) {
    throw std::domain_error("ndcg gains must be nonnegative");
  }
  std::vector<double> ideal(raw_scores.data(), raw_scores.data() + raw_scores.size());
  std::partial_sort(ideal.begin(), ideal.begin() + static_cast<std::ptrdiff_t>(k), ideal.end(),
                    std::greater<double>());
  double dcg = 0.0, ideal_dcg = 0.0;
  for (std::size_t n = 1; n <= k; ++n) {
    const double discount = std::log2(static_cast<double>(n) + 1.0);
    dcg += raw_scores(static_cast<Index>(fair_ranking[n - 1])) / discount;
    ideal_dcg += ideal[n - 1] / discount;
  }
  return ideal_dcg == 0.0 ? 1.0 : dcg / ideal_dcg;
}

/// Ratio of a group's selection rate in the top k to its population share.
inline double disparity_measure(const Ranking& ranking, const GroupPartition& partition,
                                std::size_t group, std::size_t k) {
  if (group >= partition.group_count()) throw std::invalid_argument("no such group");
  if (partition.members[group].empty()) throw std::invalid_argument("group is empty");
  if (k < 1 || k > ranking.size()) throw std::domain_error("k outside [1, population]");
  std::size_t selected = 0;
  for (std::size_t n = 0; n < k; ++n) {
    if (partition.group_of[ranking[n]] == group) ++selected;
  }
  const double rate = static_cast<double>(selected) / static_cast<double>(k);
  return rate / partition.weights[group];
}

inline double disparity_measure(const Ranking& ranking, const GroupPartition& partition,
                                const GroupKey& group, std::size_t k) {
  const auto g = partition.find(group);
  if (!g) throw std::invalid_argument("no such group '" + group.label() + "'");
  return disparity_measure(ranking, partition, *g, k);
}

/// Smallest grid cutoff from which the group's disparity stays at or above
/// the threshold for every larger grid cutoff; empty when never sustained.
inline std::optional<std::size_t> crossing_rank(const Ranking& ranking,
                                                const GroupPartition& partition,
                                                std::size_t group, double threshold,
                                                std::span<const std::size_t> k_grid) {
  if (!(threshold > 0.0) || !(threshold <= 1.0)) {
    throw std::domain_error("threshold must lie in (0, 1]");
  }
  if (k_grid.empty()) throw std::invalid_argument("empty cutoff grid");
  for (std::size_t i = 0; i < k_grid.size(); ++i) {
    if (k_grid[i] < 1 || k_grid[i] > ranking.size() ||
        (i > 0 && k_grid[i] <= k_grid[i - 1])) {
      throw std::invalid_argument("cutoff grid must be strictly increasing within range");
    }
  }
  std::optional<std::size_t> crossing;
  for (std::size_t i = k_grid.size(); i-- > 0;) {
    if (disparity_measure(ranking, partition, group, k_grid[i]) >= threshold) {
      crossing = k_grid[i];
    } else {
      break;
    }
  }
  return crossing;
}

inline std::optional<std::size_t> crossing_rank(const Ranking& ranking,
                                                const GroupPartition& partition,
                                                const GroupKey& group, double threshold,
                                                std::span<const std::size_t> k_grid) {
  const auto g = partition.find(group);
  if (!g) throw std::invalid_argument("no such group '" + group.label() + "'");
  return crossing_rank(ranking, partition, *g, threshold, k_grid);
}

/// Metric curves over a cutoff grid plus the scalar trade-off summary.
struct FairnessReport {
  std::vector<std::size_t> k_grid;
  ArrayXd p_at_k;
  ArrayXd ndcg;
  std::vector<ArrayXd> selected_share;  // per group, per cutoff
  std::vector<ArrayXd> disparity;       // per group, per cutoff
  double e_ind = 0.0;
  double utility = 0.0;
  double parity = 0.0;
  std::vector<std::optional<std::size_t>> crossing;  // per group
};

/// Evaluate all metrics in one pass over the population.
///
/// group_dists are the fair per-group distributions used for the parity
/// gap; callers decide whether these come from the transport itself or are
/// re-binned from realized fair scores.
inline FairnessReport build_fairness_report(
    std::span<const ScoreRecord> records, const GroupPartition& partition, const ArrayXd& raw,
    const ArrayXd& fair, const std::vector<EmpiricalDistribution<double>>& group_dists,
    std::vector<std::size_t> k_grid, double threshold) {
  detail::check_scores(partition, raw, fair);
  if ((raw < 0.0).any()) throw std::domain_error("ndcg gains must be nonnegative");
  if (!(threshold > 0.0) || !(threshold <= 1.0)) {
    throw std::domain_error("threshold must lie in (0, 1]");
  }

  FairnessReport report;
  report.k_grid = std::move(k_grid);
  const std::size_t points = report.k_grid.size();
  const std::size_t groups = partition.group_count();
  const Ranking raw_ranking = rank_by_score(records, raw);
  const Ranking fair_ranking = rank_by_score(records, fair);

  report.p_at_k.resize(static_cast<Index>(points));
  report.ndcg.resize(static_cast<Index>(points));
  report.selected_share.assign(groups, ArrayXd(static_cast<Index>(points)));
  report.disparity.assign(groups, ArrayXd(static_cast<Index>(points)));

  // Prefix gains along both rankings; the raw ranking is the ideal order.
  std::vector<double> dcg(records.size() + 1, 0.0), ideal_dcg(records.size() + 1, 0.0);
  std::vector<std::size_t> position_in_raw(records.size());
  for (std::size_t n = 0; n < records.size(); ++n) {
    const double discount = std::log2(static_cast<double>(n) + 2.0);
    dcg[n + 1] = dcg[n] + raw(static_cast<Index>(fair_ranking[n])) / discount;
    ideal_dcg[n + 1] = ideal_dcg[n] + raw(static_cast<Index>(raw_ranking[n])) / discount;
    position_in_raw[raw_ranking[n]] = n;
  }

  std::vector<std::size_t> group_selected(groups, 0);
  std::size_t consumed = 0;
  for (std::size_t p = 0; p < points; ++p) {
    const std::size_t k = report.k_grid[p];
    if (k < 1 || k > records.size() || (p > 0 && k <= report.k_grid[p - 1])) {
      throw std::invalid_argument("cutoff grid must be strictly increasing within range");
    }
    while (consumed < k) {
      ++group_selected[partition.group_of[fair_ranking[consumed]]];
      ++consumed;
    }
    std::size_t hits = 0;
    for (std::size_t n = 0; n < k; ++n) hits += position_in_raw[fair_ranking[n]] < k;
    report.p_at_k(static_cast<Index>(p)) =
        static_cast<double>(hits) / static_cast<double>(k);
    report.ndcg(static_cast<Index>(p)) =
        ideal_dcg[k] == 0.0 ? 1.0 : dcg[k] / ideal_dcg[k];
    for (std::size_t g = 0; g < groups; ++g) {
      const double share =
          static_cast<double>(group_selected[g]) / static_cast<double>(k);
      report.selected_share[g](static_cast<Index>(p)) = share;
      report.disparity[g](static_cast<Index>(p)) = share / partition.weights[g];
    }
  }

  report.e_ind = individual_fairness_error(partition, raw, fair);
  report.utility = decision_maker_utility(partition, raw, fair);
  report.parity = parity_gap(group_dists, partition.weights);

  report.crossing.assign(groups, std::nullopt);
  for (std::size_t g = 0; g < groups; ++g) {
    std::optional<std::size_t> crossing;
    for (std::size_t p = points; p-- > 0;) {
      if (report.disparity[g](static_cast<Index>(p)) >= threshold) {
        crossing = report.k_grid[p];
      } else {
        break;
      }
    }
    report.crossing[g] = crossing;
  }
  return report;
}

}  // namespace fairot
