// Copyright (c) 2026 The fairot authors.
//
// This software is licensed under the Apache License, Version 2.0 (the "License").
// You may not use this file except in compliance with the License. You may
// obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0.

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fairot/types.hpp"

namespace fairot {

/// Center of the histogram bin a value falls into.
///
/// Values are assigned to half-open bins [k*w, (k+1)*w); the representative
/// support point is the bin center. Values already at a bin center are fixed
/// points of this function, which makes re-binning idempotent.
template <typename Scalar>
Scalar bin_center(Scalar value, Scalar width) {
  return (std::floor(value / width) + Scalar(0.5)) * width;
}

/// A weighted, binned one-dimensional distribution.
///
/// Support points (bin centers) are strictly increasing; masses are
/// nonnegative and sum to one. A point mass is the single-bin case.
/// Immutable after construction, so instances can be shared across threads.
template <typename Scalar = double>
class EmpiricalDistribution {
 public:
  EmpiricalDistribution(ArrayX<Scalar> centers, ArrayX<Scalar> masses)
      : centers_(std::move(centers)), masses_(std::move(masses)) {
    if (centers_.size() == 0) {
      throw std::invalid_argument("distribution needs at least one bin");
    }
    if (centers_.size() != masses_.size()) {
      throw std::invalid_argument("bin center / mass count mismatch");
    }
    // Kahan summation: the one-mass invariant must hold to 1e-12 even for
    // distributions with hundreds of thousands of bins.
    Scalar total = Scalar(0), carry = Scalar(0);
    for (Index i = 0; i < centers_.size(); ++i) {
      if (!std::isfinite(centers_(i))) {
        throw std::invalid_argument("non-finite bin center");
      }
      if (i > 0 && !(centers_(i) > centers_(i - 1))) {
        throw std::invalid_argument("bin centers must be strictly increasing");
      }
      if (!(masses_(i) >= Scalar(0))) {
        throw std::invalid_argument("bin masses must be nonnegative");
      }
      const Scalar y = masses_(i) - carry;
      const Scalar t = total + y;
      carry = (t - total) - y;
      total = t;
    }
    if (std::abs(total - Scalar(1)) > Scalar(1e-12)) {
      throw std::invalid_argument("bin masses must sum to one");
    }
    cumulative_ = cumulative_sum(masses_);
    // Pin the top of the CDF so that quantile(1) is always the maximum of
    // the support, independent of rounding in the mass sum.
    cumulative_(cumulative_.size() - 1) = Scalar(1);
  }

  static EmpiricalDistribution point_mass(Scalar location) {
    ArrayX<Scalar> c(1), m(1);
    c(0) = location;
    m(0) = Scalar(1);
    return EmpiricalDistribution(std::move(c), std::move(m));
  }

  Index size() const { return centers_.size(); }
  const ArrayX<Scalar>& centers() const { return centers_; }
  const ArrayX<Scalar>& masses() const { return masses_; }
  const ArrayX<Scalar>& cumulative() const { return cumulative_; }
  Scalar min() const { return centers_(0); }
  Scalar max() const { return centers_(centers_.size() - 1); }

  /// Right-continuous CDF: fraction of mass at or below x.
  Scalar cdf(Scalar x) const {
    const Scalar* begin = centers_.data();
    const Scalar* end = begin + centers_.size();
    auto it = std::upper_bound(begin, end, x);
    if (it == begin) return Scalar(0);
    return cumulative_(static_cast<Index>(it - begin) - 1);
  }

  /// Generalized inverse of the CDF: inf{x : cdf(x) >= p}, p in (0, 1].
  Scalar quantile(Scalar p) const {
    if (!(p > Scalar(0)) || p > Scalar(1)) {
      throw std::domain_error("quantile requires p in (0, 1]");
    }
    const Scalar* begin = cumulative_.data();
    const Scalar* end = begin + cumulative_.size();
    auto it = std::lower_bound(begin, end, p);
    const Index i = (it == end) ? cumulative_.size() - 1 : static_cast<Index>(it - begin);
    return centers_(i);
  }

  /// Quantiles at the midpoint mass grid p_i = (i + 1/2) / n, i = 0..n-1.
  ArrayX<Scalar> quantile_grid(Index n) const {
    if (n < 1) throw std::invalid_argument("grid size must be positive");
    ArrayX<Scalar> out(n);
    Index bin = 0;
    for (Index i = 0; i < n; ++i) {
      const Scalar p = (Scalar(i) + Scalar(0.5)) / Scalar(n);
      while (cumulative_(bin) < p) ++bin;
      out(i) = centers_(bin);
    }
    return out;
  }

  Scalar mean() const { return (centers_ * masses_).sum(); }

  Scalar variance() const {
    const Scalar m = mean();
    return ((centers_ - m).square() * masses_).sum();
  }

 private:
  ArrayX<Scalar> centers_;
  ArrayX<Scalar> masses_;
  ArrayX<Scalar> cumulative_;
};

/// Quantile-function view of a distribution (the 1-D transport carrier).
template <typename Scalar = double>
struct QuantileFunction {
  const EmpiricalDistribution<Scalar>* dist;

  explicit QuantileFunction(const EmpiricalDistribution<Scalar>& d) : dist(&d) {}
  Scalar operator()(Scalar p) const { return dist->quantile(p); }
};

/// Bin a sample of raw values into an EmpiricalDistribution.
///
/// Every value lands in the bin [k*w, (k+1)*w) and is represented by the
/// bin center; masses are occupation counts over the sample size.
template <typename Scalar = double>
EmpiricalDistribution<Scalar> empirical_distribution(std::span<const Scalar> values,
                                                     Scalar bin_width) {
  if (values.empty()) {
    throw std::invalid_argument("cannot bin an empty sample");
  }
  if (!(bin_width > Scalar(0))) {
    throw std::invalid_argument("bin width must be positive");
  }
  std::map<Scalar, Index> counts;
  for (const Scalar v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite value in sample");
    counts[bin_center(v, bin_width)] += 1;
  }
  ArrayX<Scalar> centers(static_cast<Index>(counts.size()));
  ArrayX<Scalar> masses(static_cast<Index>(counts.size()));
  const Scalar total = static_cast<Scalar>(values.size());
  Index i = 0;
  for (const auto& [center, count] : counts) {
    centers(i) = center;
    masses(i) = static_cast<Scalar>(count) / total;
    ++i;
  }
  return EmpiricalDistribution<Scalar>(std::move(centers), std::move(masses));
}

/// Distribution of n equal-mass atoms at nondecreasing locations; exact
/// duplicates are merged into a single bin.
template <typename Scalar = double>
EmpiricalDistribution<Scalar> grid_measure(const ArrayX<Scalar>& sorted_atoms) {
  const Index n = sorted_atoms.size();
  if (n == 0) throw std::invalid_argument("grid measure needs at least one atom");
  std::vector<Scalar> centers;
  std::vector<Index> counts;
  for (Index i = 0; i < n; ++i) {
    if (i > 0 && sorted_atoms(i) < sorted_atoms(i - 1)) {
      throw std::invalid_argument("grid atoms must be nondecreasing");
    }
    if (!centers.empty() && sorted_atoms(i) == centers.back()) {
      ++counts.back();
    } else {
      centers.push_back(sorted_atoms(i));
      counts.push_back(1);
    }
  }
  ArrayX<Scalar> c(static_cast<Index>(centers.size()));
  ArrayX<Scalar> m(static_cast<Index>(centers.size()));
  for (Index i = 0; i < c.size(); ++i) {
    c(i) = centers[static_cast<std::size_t>(i)];
    m(i) = static_cast<Scalar>(counts[static_cast<std::size_t>(i)]) / static_cast<Scalar>(n);
  }
  return EmpiricalDistribution<Scalar>(std::move(c), std::move(m));
}

/// Weighted mixture of distributions; coinciding bins are merged.
template <typename Scalar = double>
EmpiricalDistribution<Scalar> mixture(const std::vector<EmpiricalDistribution<Scalar>>& dists,
                                      const std::vector<Scalar>& weights) {
  if (dists.empty() || dists.size() != weights.size()) {
    throw std::invalid_argument("mixture needs one weight per distribution");
  }
  std::map<Scalar, Scalar> bins;
  Scalar weight_total = Scalar(0);
  for (std::size_t k = 0; k < dists.size(); ++k) {
    if (!(weights[k] > Scalar(0))) throw std::invalid_argument("mixture weights must be positive");
    weight_total += weights[k];
    for (Index i = 0; i < dists[k].size(); ++i) {
      bins[dists[k].centers()(i)] += weights[k] * dists[k].masses()(i);
    }
  }
  if (std::abs(weight_total - Scalar(1)) > Scalar(1e-12)) {
    throw std::invalid_argument("mixture weights must sum to one");
  }
  ArrayX<Scalar> c(static_cast<Index>(bins.size()));
  ArrayX<Scalar> m(static_cast<Index>(bins.size()));
  Index i = 0;
  for (const auto& [center, mass] : bins) {
    c(i) = center;
    m(i) = mass;
    ++i;
  }
  return EmpiricalDistribution<Scalar>(std::move(c), std::move(m));
}

/// The translation of a distribution by z.
template <typename Scalar = double>
EmpiricalDistribution<Scalar> translate(const EmpiricalDistribution<Scalar>& dist, Scalar z) {
  return EmpiricalDistribution<Scalar>(dist.centers() + z, dist.masses());
}

}  // namespace fairot
