// Copyright (c) 2026 The fairot authors.
//
// This software is licensed under the Apache License, Version 2.0 (the "License").
// You may not use this file except in compliance with the License. You may
// obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0.

#include <doctest.h>

#include <random>
#include <vector>

#include "fairot/distribution.hpp"
#include "fairot/population.hpp"
#include "test_support.hpp"

using namespace fairot;
using test::make_dist;

namespace {

std::vector<ScoreRecord> records_with_traits(
    const std::vector<std::vector<std::string>>& traits) {
  std::vector<ScoreRecord> out;
  for (std::size_t i = 0; i < traits.size(); ++i) {
    out.push_back({"id" + std::to_string(i), traits[i], static_cast<double>(i)});
  }
  return out;
}

}  // namespace

TEST_CASE("partition: one record per gender x ethnicity combination") {
  std::vector<std::vector<std::string>> traits;
  for (const char* g : {"0", "1"}) {
    for (const char* e : {"0", "1", "2"}) traits.push_back({g, e});
  }
  const auto records = records_with_traits(traits);
  const GroupPartition part = partition_population(records, {"gender", "ethnicity"});
  REQUIRE(part.group_count() == 6);
  for (std::size_t g = 0; g < 6; ++g) {
    CHECK(part.members[g].size() == 1);
    CHECK(part.weights[g] == 1.0 / 6.0);
  }
  // deterministic lexicographic ordering
  CHECK(part.keys.front() == GroupKey{{"0", "0"}});
  CHECK(part.keys.back() == GroupKey{{"1", "2"}});
}

TEST_CASE("partition: single group and hand-counted weights") {
  const auto single = records_with_traits({{"1"}, {"1"}, {"1"}});
  const GroupPartition one = partition_population(single, {"f"});
  REQUIRE(one.group_count() == 1);
  CHECK(one.weights[0] == 1.0);

  const auto records =
      records_with_traits({{"0", "0"}, {"0", "0"}, {"1", "0"}, {"1", "1"}});
  const GroupPartition part = partition_population(records, {"a", "b"});
  REQUIRE(part.group_count() == 3);
  CHECK(part.weights[0] == 0.5);
  CHECK(part.weights[1] == 0.25);
  CHECK(part.weights[2] == 0.25);
  // every record in exactly one group
  std::vector<int> seen(records.size(), 0);
  for (const auto& members : part.members) {
    for (const std::size_t i : members) seen[i] += 1;
  }
  for (const int c : seen) CHECK(c == 1);
}

TEST_CASE("partition: errors") {
  CHECK_THROWS_AS(partition_population({}, {"f"}), std::invalid_argument);
  const auto bad = records_with_traits({{"0", "1"}, {"0"}});
  CHECK_THROWS_AS(partition_population(bad, {"a", "b"}), std::invalid_argument);
}

TEST_CASE("partition: weights are exact group fractions") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const auto records = test::random_population(rng, 1 + rng() % 200, 4);
    const GroupPartition part = partition_population(records, {"f"});
    double sum = 0.0;
    for (std::size_t g = 0; g < part.group_count(); ++g) {
      CHECK(part.weights[g] == static_cast<double>(part.members[g].size()) /
                                   static_cast<double>(records.size()));
      sum += part.weights[g];
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("binning: hand examples") {
  const std::vector<double> v1 = {10, 10, 20};
  const auto d1 = empirical_distribution<double>(v1, 1.0);
  REQUIRE(d1.size() == 2);
  CHECK(d1.centers()(0) == 10.5);
  CHECK(d1.centers()(1) == 20.5);
  CHECK(d1.masses()(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(d1.masses()(1) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  const std::vector<double> v2 = {5};
  const auto d2 = empirical_distribution<double>(v2, 1.0);
  REQUIRE(d2.size() == 1);
  CHECK(d2.masses()(0) == 1.0);

  std::vector<double> v3;
  for (int s = 3; s <= 88; ++s) v3.push_back(s);
  const auto d3 = empirical_distribution<double>(v3, 1.0);
  REQUIRE(d3.size() == 86);
  for (Index i = 0; i < d3.size(); ++i) CHECK(d3.masses()(i) == 1.0 / 86.0);
  CHECK(d3.min() == 3.5);
  CHECK(d3.max() == 88.5);
}

TEST_CASE("binning: errors") {
  const std::vector<double> empty;
  CHECK_THROWS_AS(empirical_distribution<double>(empty, 1.0), std::invalid_argument);
  const std::vector<double> bad = {1.0, std::numeric_limits<double>::infinity()};
  CHECK_THROWS_AS(empirical_distribution<double>(bad, 1.0), std::invalid_argument);
  const std::vector<double> fine = {1.0};
  CHECK_THROWS_AS(empirical_distribution<double>(fine, 0.0), std::invalid_argument);
}

TEST_CASE("cdf: step semantics") {
  const auto point = EmpiricalDistribution<double>::point_mass(5.0);
  CHECK(point.cdf(5.0) == 1.0);
  CHECK(point.cdf(4.999) == 0.0);

  const auto two = make_dist({1, 3}, {0.5, 0.5});
  CHECK(two.cdf(2.0) == 0.5);

  const auto three = make_dist({1, 2, 3}, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  CHECK(three.cdf(2.0) == 2.0 / 3.0);
  CHECK(three.cdf(-1e18) == 0.0);
  CHECK(three.cdf(1e18) == 1.0);
}

TEST_CASE("quantile: generalized inverse semantics") {
  const auto point = EmpiricalDistribution<double>::point_mass(5.0);
  CHECK(point.quantile(0.3) == 5.0);

  const auto two = make_dist({1, 3}, {0.5, 0.5});
  CHECK(two.quantile(0.5) == 1.0);
  CHECK(two.quantile(0.51) == 3.0);

  const auto three = make_dist({1, 2, 3}, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  CHECK(three.quantile(1.0) == 3.0);

  CHECK_THROWS_AS(two.quantile(0.0), std::domain_error);
  CHECK_THROWS_AS(two.quantile(1.0001), std::domain_error);
  CHECK_THROWS_AS(two.quantile(-0.2), std::domain_error);
}

TEST_CASE("distribution invariants: round trip and monotonicity") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto dist = test::random_distribution(rng, 10);
    // quantile(cdf(x)) <= x on every support point
    for (Index i = 0; i < dist.size(); ++i) {
      const double x = dist.centers()(i);
      CHECK(dist.quantile(dist.cdf(x)) <= x);
    }
    // cdf(quantile(p)) >= p on the mass grid, quantile nondecreasing
    double prev = -std::numeric_limits<double>::infinity();
    for (Index i = 0; i < dist.size(); ++i) {
      const double p = dist.cumulative()(i);
      const double q = dist.quantile(p);
      CHECK(dist.cdf(q) >= p);
      CHECK(q >= prev);
      prev = q;
    }
  }
}

TEST_CASE("distribution invariants: binning is idempotent") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> width_dist(0.1, 5.0);
  for (int trial = 0; trial < 30; ++trial) {
    const double width = width_dist(rng);
    std::vector<double> values;
    std::uniform_real_distribution<double> value(-100.0, 100.0);
    for (int i = 0; i < 40; ++i) values.push_back(value(rng));
    const auto once = empirical_distribution<double>(values, width);
    // feeding the binned sample back in with the same width must not move
    // any bin; expand centers by their multiplicities to keep masses equal
    std::vector<double> expanded;
    for (Index i = 0; i < once.size(); ++i) {
      const auto copies = static_cast<int>(
          std::llround(once.masses()(i) * static_cast<double>(values.size())));
      for (int c = 0; c < copies; ++c) expanded.push_back(once.centers()(i));
    }
    const auto twice = empirical_distribution<double>(expanded, width);
    REQUIRE(twice.size() == once.size());
    for (Index i = 0; i < once.size(); ++i) {
      CHECK(twice.centers()(i) == once.centers()(i));
      CHECK(twice.masses()(i) == doctest::Approx(once.masses()(i)).epsilon(1e-12));
    }
  }
}

TEST_CASE("grid measure merges duplicates") {
  const auto dist = grid_measure<double>(test::make_array({1, 1, 2, 5, 5, 5}));
  REQUIRE(dist.size() == 3);
  CHECK(dist.masses()(0) == doctest::Approx(2.0 / 6.0));
  CHECK(dist.masses()(1) == doctest::Approx(1.0 / 6.0));
  CHECK(dist.masses()(2) == doctest::Approx(3.0 / 6.0));
  CHECK_THROWS_AS(grid_measure<double>(test::make_array({2, 1})), std::invalid_argument);
}

TEST_CASE("mixture merges coinciding bins") {
  const auto a = EmpiricalDistribution<double>::point_mass(0.0);
  const auto b = make_dist({0.0, 10.0}, {0.5, 0.5});
  const auto mix = mixture<double>({a, b}, {0.5, 0.5});
  REQUIRE(mix.size() == 2);
  CHECK(mix.centers()(0) == 0.0);
  CHECK(mix.masses()(0) == 0.75);
  CHECK(mix.masses()(1) == 0.25);
  CHECK_THROWS_AS(mixture<double>({a, b}, {0.5, 0.4}), std::invalid_argument);
}

TEST_CASE("translate and moments") {
  const auto d = make_dist({0, 2, 4}, {0.25, 0.5, 0.25});
  CHECK(d.mean() == 2.0);
  CHECK(d.variance() == 2.0);
  const auto shifted = translate(d, 7.0);
  CHECK(shifted.mean() == 9.0);
  CHECK(shifted.min() == 7.0);
  CHECK(shifted.max() == 11.0);
}

TEST_CASE("quantile function view") {
  const auto d = make_dist({1, 3}, {0.5, 0.5});
  const QuantileFunction<double> q(d);
  CHECK(q(0.5) == 1.0);
  CHECK(q(1.0) == 3.0);
}
