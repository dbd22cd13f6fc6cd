// Copyright (c) 2026 The fairot authors.
//
// This software is licensed under the Apache License, Version 2.0 (the "License").
// You may not use this file except in compliance with the License. You may
// obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0.

#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fairot/distribution.hpp"
#include "fairot/types.hpp"

namespace fairot {

/// A nondecreasing piecewise map between score values.
///
/// Knots pair strictly increasing source scores with nondecreasing target
/// scores. Evaluation between knots interpolates linearly; outside the knot
/// range it clamps to the nearest knot.
template <typename Scalar = double>
class MonotoneMap {
 public:
  MonotoneMap(ArrayX<Scalar> sources, ArrayX<Scalar> targets)
      : sources_(std::move(sources)), targets_(std::move(targets)) {
    if (sources_.size() == 0 || sources_.size() != targets_.size()) {
      throw std::invalid_argument("map needs matching, nonempty knot arrays");
    }
    for (Index i = 1; i < sources_.size(); ++i) {
      if (!(sources_(i) > sources_(i - 1))) {
        throw std::invalid_argument("map sources must be strictly increasing");
      }
      if (targets_(i) < targets_(i - 1)) {
        throw std::invalid_argument("map targets must be nondecreasing");
      }
    }
  }

  static MonotoneMap identity(const ArrayX<Scalar>& support) {
    return MonotoneMap(support, support);
  }

  Index size() const { return sources_.size(); }
  const ArrayX<Scalar>& sources() const { return sources_; }
  const ArrayX<Scalar>& targets() const { return targets_; }

  /// Piecewise-linear evaluation with clamping outside the knot range.
  Scalar operator()(Scalar x) const {
    const Index n = sources_.size();
    if (x <= sources_(0)) return targets_(0);
    if (x >= sources_(n - 1)) return targets_(n - 1);
    const Scalar* begin = sources_.data();
    auto it = std::lower_bound(begin, begin + n, x);
    const Index hi = static_cast<Index>(it - begin);
    if (sources_(hi) == x) return targets_(hi);
    const Index lo = hi - 1;
    const Scalar t = (x - sources_(lo)) / (sources_(hi) - sources_(lo));
    return (Scalar(1) - t) * targets_(lo) + t * targets_(hi);
  }

  /// Exact-match knot lookup; throws when x is not a knot source.
  Scalar at(Scalar x) const {
    const Scalar* begin = sources_.data();
    const Scalar* end = begin + sources_.size();
    auto it = std::lower_bound(begin, end, x);
    if (it == end || *it != x) {
      throw std::domain_error("score is not on the map's observed support");
    }
    return targets_(static_cast<Index>(it - begin));
  }

 private:
  ArrayX<Scalar> sources_;
  ArrayX<Scalar> targets_;
};

/// A coupling between two binned distributions.
///
/// Entries are kept sorted by (source, target); a valid plan has
/// nonnegative masses and monotone support (no crossing pairs).
template <typename Scalar = double>
class TransportPlan {
 public:
  struct Entry {
    Index source;
    Index target;
    Scalar mass;
  };

  TransportPlan(ArrayX<Scalar> source_support, ArrayX<Scalar> target_support,
                std::vector<Entry> entries)
      : source_support_(std::move(source_support)),
        target_support_(std::move(target_support)),
        entries_(std::move(entries)) {
    for (std::size_t e = 0; e < entries_.size(); ++e) {
      const Entry& cur = entries_[e];
      if (cur.source < 0 || cur.source >= source_support_.size() || cur.target < 0 ||
          cur.target >= target_support_.size()) {
        throw std::invalid_argument("plan entry indexes outside the supports");
      }
      if (!(cur.mass >= Scalar(0))) {
        throw std::invalid_argument("plan masses must be nonnegative");
      }
      if (e > 0) {
        const Entry& prev = entries_[e - 1];
        const bool sorted = prev.source < cur.source ||
                            (prev.source == cur.source && prev.target < cur.target);
        if (!sorted || cur.target < prev.target) {
          throw std::invalid_argument("plan support must be monotone (no crossings)");
        }
      }
    }
  }

  const ArrayX<Scalar>& source_support() const { return source_support_; }
  const ArrayX<Scalar>& target_support() const { return target_support_; }
  const std::vector<Entry>& entries() const { return entries_; }

  ArrayX<Scalar> row_sums() const {
    ArrayX<Scalar> out = ArrayX<Scalar>::Zero(source_support_.size());
    for (const Entry& e : entries_) out(e.source) += e.mass;
    return out;
  }

  ArrayX<Scalar> col_sums() const {
    ArrayX<Scalar> out = ArrayX<Scalar>::Zero(target_support_.size());
    for (const Entry& e : entries_) out(e.target) += e.mass;
    return out;
  }

 private:
  ArrayX<Scalar> source_support_;
  ArrayX<Scalar> target_support_;
  std::vector<Entry> entries_;
};

namespace detail {

template <typename Scalar>
void check_plan_matches_source(const TransportPlan<Scalar>& plan,
                               const EmpiricalDistribution<Scalar>& source, Scalar tolerance) {
  if (plan.source_support().size() != source.size() ||
      (plan.source_support() != source.centers()).any()) {
    throw std::invalid_argument("plan source support does not match the distribution");
  }
  const ArrayX<Scalar> rows = plan.row_sums();
  if (((rows - source.masses()).abs() > tolerance).any()) {
    throw std::invalid_argument("plan marginals do not match the source masses");
  }
}

}  // namespace detail

/// Monotone (quantile-matching) coupling between two 1-D distributions.
///
/// Walks both mass sequences in sorted support order, always moving the
/// smaller remaining mass. In one dimension this coupling is optimal for
/// the quadratic cost.
template <typename Scalar = double>
TransportPlan<Scalar> optimal_plan_1d(const EmpiricalDistribution<Scalar>& source,
                                      const EmpiricalDistribution<Scalar>& target) {
  const Index m = source.size();
  const Index n = target.size();
  std::vector<typename TransportPlan<Scalar>::Entry> entries;
  entries.reserve(static_cast<std::size_t>(m + n));
  Index i = 0, j = 0;
  Scalar remaining_src = source.masses()(0);
  Scalar remaining_tgt = target.masses()(0);
  while (i < m && j < n) {
    const Scalar moved = std::min(remaining_src, remaining_tgt);
    if (moved > Scalar(0)) entries.push_back({i, j, moved});
    remaining_src -= moved;
    remaining_tgt -= moved;
    if (!(remaining_src > Scalar(0))) {
      ++i;
      if (i < m) remaining_src = source.masses()(i);
    }
    if (!(remaining_tgt > Scalar(0))) {
      ++j;
      if (j < n) remaining_tgt = target.masses()(j);
    }
  }
  return TransportPlan<Scalar>(source.centers(), target.centers(), std::move(entries));
}

/// Quadratic transport cost of a plan against its source distribution.
template <typename Scalar = double>
Scalar transport_cost(const EmpiricalDistribution<Scalar>& source,
                      const TransportPlan<Scalar>& plan) {
  detail::check_plan_matches_source(plan, source, Scalar(1e-9));
  Scalar cost = Scalar(0);
  for (const auto& e : plan.entries()) {
    const Scalar diff = plan.target_support()(e.target) - plan.source_support()(e.source);
    cost += e.mass * diff * diff;
  }
  return cost;
}

/// Wasserstein-2 distance: square root of the optimal quadratic cost.
template <typename Scalar = double>
Scalar wasserstein2(const EmpiricalDistribution<Scalar>& a,
                    const EmpiricalDistribution<Scalar>& b) {
  return std::sqrt(transport_cost(a, optimal_plan_1d(a, b)));
}

/// Collapse a plan to a monotone map by barycentric projection.
///
/// Each source bin maps to the mass-weighted mean of its targets. A bin
/// with a single target reproduces that target exactly, so deterministic
/// plans round-trip without arithmetic.
template <typename Scalar = double>
MonotoneMap<Scalar> map_from_plan(const TransportPlan<Scalar>& plan,
                                  const EmpiricalDistribution<Scalar>& source) {
  detail::check_plan_matches_source(plan, source, Scalar(1e-9));
  std::vector<Scalar> sources, targets;
  sources.reserve(static_cast<std::size_t>(source.size()));
  targets.reserve(static_cast<std::size_t>(source.size()));
  const auto& entries = plan.entries();
  for (std::size_t e = 0; e < entries.size();) {
    const Index bin = entries[e].source;
    std::size_t end = e;
    Scalar mass = Scalar(0), weighted = Scalar(0);
    while (end < entries.size() && entries[end].source == bin) {
      mass += entries[end].mass;
      weighted += entries[end].mass * plan.target_support()(entries[end].target);
      ++end;
    }
    sources.push_back(plan.source_support()(bin));
    if (end - e == 1) {
      targets.push_back(plan.target_support()(entries[e].target));
    } else {
      targets.push_back(weighted / mass);
    }
    e = end;
  }
  ArrayX<Scalar> s(static_cast<Index>(sources.size()));
  ArrayX<Scalar> t(static_cast<Index>(targets.size()));
  for (Index k = 0; k < s.size(); ++k) {
    s(k) = sources[static_cast<std::size_t>(k)];
    t(k) = targets[static_cast<std::size_t>(k)];
  }
  return MonotoneMap<Scalar>(std::move(s), std::move(t));
}

/// Image of a distribution under a monotone map; colliding bins merge.
/// The map must cover every positive-mass support point exactly.
template <typename Scalar = double>
EmpiricalDistribution<Scalar> pushforward(const EmpiricalDistribution<Scalar>& source,
                                          const MonotoneMap<Scalar>& map) {
  std::vector<Scalar> centers;
  std::vector<Scalar> masses;
  for (Index i = 0; i < source.size(); ++i) {
    if (!(source.masses()(i) > Scalar(0))) continue;
    const Scalar y = map.at(source.centers()(i));
    if (!centers.empty() && y == centers.back()) {
      masses.back() += source.masses()(i);
    } else {
      centers.push_back(y);
      masses.push_back(source.masses()(i));
    }
  }
  ArrayX<Scalar> c(static_cast<Index>(centers.size()));
  ArrayX<Scalar> m(static_cast<Index>(centers.size()));
  for (Index k = 0; k < c.size(); ++k) {
    c(k) = centers[static_cast<std::size_t>(k)];
    m(k) = masses[static_cast<std::size_t>(k)];
  }
  return EmpiricalDistribution<Scalar>(std::move(c), std::move(m));
}

}  // namespace fairot
