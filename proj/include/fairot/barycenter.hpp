// Copyright (c) 2026 The fairot authors.
//
// This software is licensed under the Apache License, Version 2.0 (the "License").
// You may not use this file except in compliance with the License. You may
// obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0.

#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "fairot/distribution.hpp"
#include "fairot/transport.hpp"
#include "fairot/types.hpp"

namespace fairot {

/// Weighted Wasserstein-2 barycenter of a family of distributions, realized
/// on a uniform midpoint mass grid, together with the monotone map that
/// carries each input distribution onto it.
template <typename Scalar = double>
struct BarycenterResult {
  EmpiricalDistribution<Scalar> barycenter;
  std::vector<MonotoneMap<Scalar>> maps;  // one per input, same order
  ArrayX<Scalar> grid_quantiles;          // weighted quantile average at each grid node
  Index grid_size = 0;
  // Largest spread of grid targets collapsed into a single map knot; bounds
  // the W2 gap between any pushforward and the barycenter.
  Scalar grid_resolution = Scalar(0);
};

/// Weighted barycenter via quantile averaging.
///
/// In one dimension the barycenter's quantile function is the weighted
/// average of the input quantile functions. It is evaluated on the midpoint
/// grid p_i = (i + 1/2) / grid_size; each input's map sends a source bin to
/// the mean of the grid nodes that fall inside the bin's mass range. Bins
/// too light to capture a grid node are sent through the quantile average
/// at the midpoint of their mass range.
template <typename Scalar = double>
BarycenterResult<Scalar> barycenter(const std::vector<EmpiricalDistribution<Scalar>>& dists,
                                    const std::vector<Scalar>& weights, Index grid_size) {
  const std::size_t count = dists.size();
  if (count == 0 || count != weights.size()) {
    throw std::invalid_argument("barycenter needs one weight per distribution");
  }
  if (grid_size < 1) throw std::invalid_argument("grid size must be positive");
  Scalar weight_total = Scalar(0);
  for (const Scalar w : weights) {
    if (!(w > Scalar(0))) throw std::invalid_argument("barycenter weights must be positive");
    weight_total += w;
  }
  if (std::abs(weight_total - Scalar(1)) > Scalar(1e-12)) {
    throw std::invalid_argument("barycenter weights must sum to one");
  }

  std::vector<ArrayX<Scalar>> grid(count);
  for (std::size_t l = 0; l < count; ++l) grid[l] = dists[l].quantile_grid(grid_size);

  ArrayX<Scalar> average = ArrayX<Scalar>::Zero(grid_size);
  for (std::size_t l = 0; l < count; ++l) average += weights[l] * grid[l];

  // The quantile average evaluated off the grid, for underweight bins.
  const auto average_at = [&](Scalar p) {
    Scalar value = Scalar(0);
    for (std::size_t l = 0; l < count; ++l) value += weights[l] * dists[l].quantile(p);
    return value;
  };

  BarycenterResult<Scalar> result{grid_measure(average), {}, std::move(average), grid_size,
                                  Scalar(0)};
  result.maps.reserve(count);

  for (std::size_t l = 0; l < count; ++l) {
    const EmpiricalDistribution<Scalar>& dist = dists[l];
    const Index bins = dist.size();
    ArrayX<Scalar> targets(bins);
    Index node = 0;
    for (Index j = 0; j < bins; ++j) {
      Index first = node;
      while (node < grid_size &&
             (Scalar(node) + Scalar(0.5)) / Scalar(grid_size) <= dist.cumulative()(j)) {
        ++node;
      }
      if (node > first) {
        targets(j) = result.grid_quantiles.segment(first, node - first).mean();
        const Scalar spread =
            result.grid_quantiles(node - 1) - result.grid_quantiles(first);
        if (spread > result.grid_resolution) result.grid_resolution = spread;
      } else {
        const Scalar below = (j == 0) ? Scalar(0) : dist.cumulative()(j - 1);
        Scalar p = (below + dist.cumulative()(j)) / Scalar(2);
        if (!(p > Scalar(0))) p = Scalar(0.5) / Scalar(grid_size);
        targets(j) = average_at(p);
      }
    }
    result.maps.emplace_back(dist.centers(), std::move(targets));
  }
  return result;
}

/// Partial transport toward a target: the map (1-theta)*Id + theta*T and the
/// image of the source under it. theta = 0 is the identity, theta = 1 the
/// full transport.
template <typename Scalar = double>
std::pair<MonotoneMap<Scalar>, EmpiricalDistribution<Scalar>> displacement_interpolate(
    const EmpiricalDistribution<Scalar>& source, const MonotoneMap<Scalar>& map_to_target,
    Scalar theta) {
  if (!(theta >= Scalar(0)) || !(theta <= Scalar(1))) {
    throw std::domain_error("interpolation parameter must lie in [0, 1]");
  }
  ArrayX<Scalar> targets(source.size());
  for (Index j = 0; j < source.size(); ++j) {
    const Scalar s = source.centers()(j);
    targets(j) = (Scalar(1) - theta) * s + theta * map_to_target.at(s);
  }
  MonotoneMap<Scalar> interpolated(source.centers(), std::move(targets));
  EmpiricalDistribution<Scalar> image = pushforward(source, interpolated);
  return {std::move(interpolated), std::move(image)};
}

}  // namespace fairot
