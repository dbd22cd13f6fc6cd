// Copyright (c) 2026 The fairot authors.
//
// This software is licensed under the Apache License, Version 2.0 (the "License").
// You may not use this file except in compliance with the License. You may
// obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0.

#include "fairot/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <unordered_map>

#include "fairot/repair.hpp"
#include "fairot/data.hpp"
#include "fairot/error.hpp"
#include "fairot/metrics.hpp"
#include "json_out.hpp"

namespace fs = std::filesystem;

namespace fairot {

namespace {

struct LoadedInput {
  std::vector<ScoreRecord> records;
  std::vector<std::string> schema;
  std::optional<SyntheticSpec> spec;  // set when the population was generated
  std::string description;
};

LoadedInput load_input(const RunConfig& config) {
  if (!config.input_csv.empty() && !config.synthetic_spec.empty()) {
    throw UsageError("pass either --input or --synthetic-spec, not both");
  }
  LoadedInput in;
  if (!config.input_csv.empty()) {
    in.schema = read_population_schema(config.input_csv);
    in.records = load_population_csv(config.input_csv, in.schema);
    in.description = config.input_csv;
  } else {
    SyntheticSpec spec = config.synthetic_spec.empty()
                             ? default_synthetic_spec()
                             : load_synthetic_spec(config.synthetic_spec);
    if (config.seed) spec.seed = *config.seed;
    in.records = generate_synthetic(spec);
    in.schema = spec.schema;
    in.description =
        config.synthetic_spec.empty() ? "synthetic:default" : "synthetic:" + config.synthetic_spec;
    in.spec = std::move(spec);
  }
  return in;
}

// Expand "--theta-group <feature>=<value>[,...]:<theta>" selectors against
// the groups present in the data. Later selectors win on overlap.
ThetaPolicy resolve_policy(double default_theta, const std::vector<std::string>& selectors,
                           const std::vector<std::string>& schema,
                           std::span<const ScoreRecord> records) {
  ThetaPolicy policy;
  policy.default_theta = default_theta;
  if (selectors.empty()) return policy;

  std::set<GroupKey> keys;
  for (const auto& record : records) keys.insert(GroupKey{record.traits});

  for (const std::string& selector : selectors) {
    const std::size_t colon = selector.rfind(':');
    if (colon == std::string::npos || colon + 1 == selector.size()) {
      throw UsageError("bad --theta-group '" + selector +
                       "'; want <feature>=<value>[,...]:<theta>");
    }
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(selector.substr(colon + 1), &used);
      if (used != selector.size() - colon - 1) throw std::invalid_argument("trailing junk");
    } catch (const std::exception&) {
      throw UsageError("bad theta value in --theta-group '" + selector + "'");
    }
    if (!(value >= 0.0) || !(value <= 1.0)) {
      throw UsageError("theta in --theta-group '" + selector + "' must lie in [0, 1]");
    }

    std::map<std::size_t, std::string> constraints;  // feature index -> value
    std::string pairs = selector.substr(0, colon);
    std::size_t start = 0;
    while (start <= pairs.size()) {
      const std::size_t comma = pairs.find(',', start);
      const std::string pair =
          pairs.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      const std::size_t eq = pair.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw UsageError("bad --theta-group '" + selector +
                         "'; want <feature>=<value>[,...]:<theta>");
      }
      const std::string feature = pair.substr(0, eq);
      const auto it = std::find(schema.begin(), schema.end(), feature);
      if (it == schema.end()) {
        throw UsageError("unknown feature '" + feature + "' in --theta-group");
      }
      constraints[static_cast<std::size_t>(it - schema.begin())] = pair.substr(eq + 1);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }

    bool matched = false;
    for (const GroupKey& key : keys) {
      bool ok = true;
      for (const auto& [index, want] : constraints) {
        if (key.values[index] != want) {
          ok = false;
          break;
        }
      }
      if (ok) {
        policy.overrides[key] = value;
        matched = true;
      }
    }
    if (!matched) {
      throw DataError("--theta-group '" + selector + "' matches no group in the data");
    }
  }
  return policy;
}

void warn_small_groups(const RepairResult& result) {
  for (const std::size_t g : result.small_groups) {
    std::cerr << "warning: group '" << result.partition.keys[g].label() << "' has "
              << result.partition.members[g].size() << " members (fewer than "
              << kSmallGroupSize << "); the repair is unreliable for small groups\n";
  }
}

void write_spec_json(detail::JsonWriter& w, const SyntheticSpec& spec) {
  w.begin_object();
  w.key("seed");
  w.unsigned_integer(spec.seed);
  w.key("min_score");
  w.integer(spec.min_score);
  w.key("max_score");
  w.integer(spec.max_score);
  w.key("features");
  w.begin_array();
  for (const auto& f : spec.schema) w.string(f);
  w.end_array();
  w.key("groups");
  w.begin_array();
  for (const auto& g : spec.groups) {
    w.begin_object();
    w.key("traits");
    w.begin_array();
    for (const auto& t : g.key.values) w.string(t);
    w.end_array();
    w.key("count");
    w.unsigned_integer(g.count);
    w.key("mean");
    w.number(g.mean);
    w.key("std_dev");
    w.number(g.std_dev);
    w.end_object();
  }
  w.end_array();
  w.end_object();
}

void write_repair_outputs(const fs::path& dir, std::span<const ScoreRecord> records,
                          const std::vector<std::string>& schema, const RepairResult& result,
                          const LoadedInput& input) {
  fs::create_directories(dir);
  write_repair_csv(dir / "repaired.csv", records, schema, result.fair_scores);

  std::ofstream os(dir / "manifest.json");
  if (!os) throw DataError("cannot write '" + (dir / "manifest.json").string() + "'");
  detail::JsonWriter w(os);
  w.begin_object();
  w.key("command");
  w.string("repair");
  w.key("input");
  w.string(input.description);
  if (input.spec) {
    w.key("synthetic_spec");
    write_spec_json(w, *input.spec);
  }
  w.key("population");
  w.unsigned_integer(records.size());
  w.key("bin_width");
  w.number(result.bin_width);
  w.key("grid_size");
  w.integer(result.grid_size);
  w.key("grid_resolution");
  w.number(result.grid_resolution);
  w.key("parity_gap");
  w.number(parity_gap(result.fair_group_dists, result.partition.weights));
  w.key("features");
  w.begin_array();
  for (const auto& f : schema) w.string(f);
  w.end_array();
  w.key("groups");
  w.begin_array();
  for (std::size_t g = 0; g < result.partition.group_count(); ++g) {
    w.begin_object();
    w.key("index");
    w.unsigned_integer(g + 1);
    w.key("traits");
    w.begin_array();
    for (const auto& t : result.partition.keys[g].values) w.string(t);
    w.end_array();
    w.key("count");
    w.unsigned_integer(result.partition.members[g].size());
    w.key("weight");
    w.number(result.partition.weights[g]);
    w.key("theta");
    w.number(result.thetas[g]);
    w.key("small_group");
    w.boolean(result.partition.members[g].size() < kSmallGroupSize);
    w.end_object();
  }
  w.end_array();
  w.key("barycenter");
  w.begin_object();
  w.key("mean");
  w.number(result.barycenter_dist.mean());
  w.key("std_dev");
  w.number(std::sqrt(result.barycenter_dist.variance()));
  w.key("min");
  w.number(result.barycenter_dist.min());
  w.key("max");
  w.number(result.barycenter_dist.max());
  w.key("bins");
  w.integer(result.barycenter_dist.size());
  w.end_object();
  w.end_object();
}

std::vector<EmpiricalDistribution<double>> rebin_groups(const GroupPartition& partition,
                                                        const ArrayXd& scores,
                                                        double bin_width) {
  std::vector<EmpiricalDistribution<double>> out;
  out.reserve(partition.group_count());
  for (std::size_t g = 0; g < partition.group_count(); ++g) {
    std::vector<double> values;
    values.reserve(partition.members[g].size());
    for (const std::size_t i : partition.members[g]) {
      values.push_back(scores(static_cast<Index>(i)));
    }
    out.push_back(empirical_distribution<double>(values, bin_width));
  }
  return out;
}

std::optional<std::size_t> full_parity_rank(const FairnessReport& report) {
  std::optional<std::size_t> rank;
  for (const auto& crossing : report.crossing) {
    if (!crossing) return std::nullopt;
    if (!rank || *crossing > *rank) rank = *crossing;
  }
  return rank;
}

// Writes metrics_k.csv and report.json; returns the report for reuse.
FairnessReport run_evaluation(const fs::path& dir, std::span<const ScoreRecord> records,
                              const GroupPartition& partition, const ArrayXd& raw,
                              const ArrayXd& fair,
                              const std::vector<EmpiricalDistribution<double>>& group_dists,
                              const RunConfig& config) {
  const std::size_t step =
      config.k_step != 0 ? config.k_step : (records.size() >= 50000 ? 1000 : 100);
  const std::vector<std::size_t> k_grid = default_k_grid(records.size(), config.k_step);
  FairnessReport report = build_fairness_report(records, partition, raw, fair, group_dists,
                                                k_grid, config.threshold);

  fs::create_directories(dir);
  {
    std::ofstream os(dir / "metrics_k.csv");
    if (!os) throw DataError("cannot write '" + (dir / "metrics_k.csv").string() + "'");
    os << "k,p_at_k,ndcg";
    for (std::size_t g = 1; g <= partition.group_count(); ++g) {
      os << ",share_g" << g << ",disparity_g" << g;
    }
    os << '\n';
    for (std::size_t p = 0; p < report.k_grid.size(); ++p) {
      os << report.k_grid[p] << ',' << format_number(report.p_at_k(static_cast<Index>(p)))
         << ',' << format_number(report.ndcg(static_cast<Index>(p)));
      for (std::size_t g = 0; g < partition.group_count(); ++g) {
        os << ',' << format_number(report.selected_share[g](static_cast<Index>(p))) << ','
           << format_number(report.disparity[g](static_cast<Index>(p)));
      }
      os << '\n';
    }
  }

  std::ofstream os(dir / "report.json");
  if (!os) throw DataError("cannot write '" + (dir / "report.json").string() + "'");
  detail::JsonWriter w(os);
  w.begin_object();
  w.key("command");
  w.string("evaluate");
  w.key("population");
  w.unsigned_integer(records.size());
  w.key("bin_width");
  w.number(config.bin_width);
  w.key("k_step");
  w.unsigned_integer(step);
  w.key("threshold");
  w.number(config.threshold);
  w.key("individual_fairness_error");
  w.number(report.e_ind);
  w.key("utility");
  w.number(report.utility);
  w.key("parity_gap");
  w.number(report.parity);
  const auto full_rank = full_parity_rank(report);
  w.key("min_crossing_rank");
  if (full_rank) {
    w.unsigned_integer(*full_rank);
  } else {
    w.null();
  }
  w.key("groups");
  w.begin_array();
  for (std::size_t g = 0; g < partition.group_count(); ++g) {
    w.begin_object();
    w.key("index");
    w.unsigned_integer(g + 1);
    w.key("traits");
    w.begin_array();
    for (const auto& t : partition.keys[g].values) w.string(t);
    w.end_array();
    w.key("count");
    w.unsigned_integer(partition.members[g].size());
    w.key("weight");
    w.number(partition.weights[g]);
    w.key("crossing_rank");
    if (report.crossing[g]) {
      w.unsigned_integer(*report.crossing[g]);
    } else {
      w.null();
    }
    w.end_object();
  }
  w.end_array();
  w.end_object();
  return report;
}

}  // namespace

std::vector<std::size_t> default_k_grid(std::size_t population, std::size_t step) {
  if (population == 0) throw std::invalid_argument("empty population");
  if (step == 0) step = population >= 50000 ? 1000 : 100;
  std::vector<std::size_t> grid;
  for (std::size_t k = step; k <= population; k += step) grid.push_back(k);
  if (grid.empty() || grid.back() != population) grid.push_back(population);
  return grid;
}

void cmd_generate(const RunConfig& config) {
  SyntheticSpec spec = config.synthetic_spec.empty() ? default_synthetic_spec()
                                                     : load_synthetic_spec(config.synthetic_spec);
  if (config.seed) spec.seed = *config.seed;
  const std::vector<ScoreRecord> records = generate_synthetic(spec);

  const fs::path dir(config.out_dir);
  fs::create_directories(dir);
  write_population_csv(dir / "population.csv", records, spec.schema);

  std::ofstream os(dir / "manifest.json");
  if (!os) throw DataError("cannot write '" + (dir / "manifest.json").string() + "'");
  detail::JsonWriter w(os);
  w.begin_object();
  w.key("command");
  w.string("generate");
  w.key("output");
  w.string("population.csv");
  w.key("records");
  w.unsigned_integer(records.size());
  w.key("synthetic_spec");
  write_spec_json(w, spec);
  w.end_object();

  std::cout << "wrote " << (dir / "population.csv").string() << " (" << records.size()
            << " rows)\n";
}

void cmd_repair(const RunConfig& config) {
  const LoadedInput input = load_input(config);
  const ThetaPolicy policy =
      resolve_policy(config.theta, config.theta_group, input.schema, input.records);
  const RepairResult result = repair(input.records, input.schema, policy, config.bin_width);
  warn_small_groups(result);

  const fs::path dir(config.out_dir);
  write_repair_outputs(dir, input.records, input.schema, result, input);
  if (input.spec) {
    write_population_csv(dir / "population.csv", input.records, input.schema);
  }
  std::cout << "wrote " << (dir / "repaired.csv").string() << " (" << input.records.size()
            << " rows)\n";
}

void cmd_evaluate(const RunConfig& config) {
  const std::vector<std::string> schema = read_population_schema(config.raw_csv);
  const std::vector<ScoreRecord> records = load_population_csv(config.raw_csv, schema);
  const RepairedPopulation repaired = load_repair_csv(config.repaired_csv, schema);
  if (records.size() != repaired.records.size()) {
    throw DataError("id mismatch between files: different row counts");
  }
  std::unordered_map<std::string, std::size_t> index;
  index.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) index[records[i].id] = i;
  ArrayXd fair(static_cast<Index>(records.size()));
  for (std::size_t r = 0; r < repaired.records.size(); ++r) {
    const auto it = index.find(repaired.records[r].id);
    if (it == index.end()) {
      throw DataError("id mismatch between files: '" + repaired.records[r].id +
                      "' only in the repaired file");
    }
    if (records[it->second].traits != repaired.records[r].traits) {
      throw DataError("trait mismatch between files for id '" + repaired.records[r].id + "'");
    }
    fair(static_cast<Index>(it->second)) = repaired.fair_scores(static_cast<Index>(r));
  }

  const GroupPartition partition = partition_population(records, schema);
  const ArrayXd raw = raw_score_array(records);
  const auto group_dists = rebin_groups(partition, fair, config.bin_width);
  run_evaluation(config.out_dir, records, partition, raw, fair, group_dists, config);
  std::cout << "wrote " << (fs::path(config.out_dir) / "report.json").string() << '\n';
}

void cmd_sweep(const RunConfig& config) {
  if (config.thetas.empty()) throw UsageError("sweep needs --thetas <list>");
  std::vector<double> thetas = config.thetas;
  std::sort(thetas.begin(), thetas.end());
  thetas.erase(std::unique(thetas.begin(), thetas.end()), thetas.end());
  for (const double theta : thetas) {
    if (!(theta >= 0.0) || !(theta <= 1.0)) {
      throw UsageError("sweep thetas must lie in [0, 1]");
    }
  }

  const LoadedInput input = load_input(config);
  const fs::path dir(config.out_dir);
  fs::create_directories(dir);
  if (input.spec) {
    write_population_csv(dir / "population.csv", input.records, input.schema);
  }

  struct SweepRow {
    double theta;
    double e_ind;
    double utility;
    double parity;
    std::optional<std::size_t> full_rank;
  };

  const auto run_one = [&](double theta) {
    const ThetaPolicy policy =
        resolve_policy(theta, config.theta_group, input.schema, input.records);
    const RepairResult result = repair(input.records, input.schema, policy, config.bin_width);
    const fs::path theta_dir = dir / ("theta_" + format_number(theta));
    write_repair_outputs(theta_dir, input.records, input.schema, result, input);
    const ArrayXd raw = raw_score_array(input.records);
    const auto group_dists = rebin_groups(result.partition, result.fair_scores,
                                          config.bin_width);
    const FairnessReport report = run_evaluation(theta_dir, input.records, result.partition,
                                                 raw, result.fair_scores, group_dists, config);
    return SweepRow{theta, report.e_ind, report.utility,
                    parity_gap(result.fair_group_dists, result.partition.weights),
                    full_parity_rank(report)};
  };

  std::vector<std::future<SweepRow>> futures;
  futures.reserve(thetas.size());
  for (const double theta : thetas) {
    futures.push_back(std::async(std::launch::async, run_one, theta));
  }
  std::vector<SweepRow> rows;
  rows.reserve(thetas.size());
  for (auto& f : futures) rows.push_back(f.get());

  std::ofstream os(dir / "sweep.csv");
  if (!os) throw DataError("cannot write '" + (dir / "sweep.csv").string() + "'");
  os << "theta,individual_fairness_error,utility,parity_gap,min_crossing_rank\n";
  for (const SweepRow& row : rows) {
    os << format_number(row.theta) << ',' << format_number(row.e_ind) << ','
       << format_number(row.utility) << ',' << format_number(row.parity) << ',';
    if (row.full_rank) os << *row.full_rank;
    os << '\n';
  }
  std::cout << "wrote " << (dir / "sweep.csv").string() << " (" << rows.size() << " rows)\n";
}

}  // namespace fairot
