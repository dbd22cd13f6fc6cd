// Copyright (c) 2026 The fairot authors.
//
// This software is licensed under the Apache License, Version 2.0 (the "License").
// You may not use this file except in compliance with the License. You may
// obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0.

#include "fairot/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "fairot/error.hpp"

namespace fairot {

namespace {

constexpr int kRedrawLimit = 100000;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::string pad_id(std::uint64_t n, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%0*llu", width, static_cast<unsigned long long>(n));
  return buf;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (const char c : line) {
    if (c == ',') {
      out.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  out.push_back(field);
  return out;
}

double parse_score(const std::string& text, std::size_t line_no) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw DataError("line " + std::to_string(line_no) + ": unparseable score '" + text + "'");
  }
  if (used != text.size() || !std::isfinite(value)) {
    throw DataError("line " + std::to_string(line_no) + ": unparseable score '" + text + "'");
  }
  return value;
}

}  // namespace

std::string format_number(double value) {
  if (value == 0.0) value = 0.0;  // normalize negative zero
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

void SyntheticSpec::validate() const {
  if (schema.empty()) throw DataError("synthetic spec needs at least one feature");
  if (groups.empty()) throw DataError("synthetic spec needs at least one group");
  if (min_score >= max_score) throw DataError("synthetic spec needs min_score < max_score");
  for (const auto& g : groups) {
    if (g.key.values.size() != schema.size()) {
      throw DataError("group '" + g.key.label() + "' does not match the feature schema");
    }
    if (g.count == 0) throw DataError("group '" + g.key.label() + "' has zero count");
    if (!(g.std_dev > 0.0)) throw DataError("group '" + g.key.label() + "' needs std_dev > 0");
    if (g.mean < static_cast<double>(min_score) - 8.0 * g.std_dev ||
        g.mean > static_cast<double>(max_score) + 8.0 * g.std_dev) {
      throw DataError("group '" + g.key.label() +
                      "': mean lies too far outside the score range (infeasible truncation)");
    }
  }
}

SyntheticSpec default_synthetic_spec() {
  SyntheticSpec spec;
  spec.schema = {"gender", "ethnicity"};
  spec.min_score = 3;
  spec.max_score = 88;
  spec.seed = 20260808;
  spec.groups = {
      {GroupKey{{"0", "0"}}, 16667, 56.0, 12.0}, {GroupKey{{"0", "1"}}, 16667, 53.0, 12.0},
      {GroupKey{{"0", "2"}}, 16667, 43.0, 13.0}, {GroupKey{{"1", "0"}}, 16667, 50.0, 12.0},
      {GroupKey{{"1", "1"}}, 16666, 40.0, 13.0}, {GroupKey{{"1", "2"}}, 16666, 33.0, 14.0},
  };
  return spec;
}

std::vector<ScoreRecord> generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  std::size_t total = 0;
  for (const auto& g : spec.groups) total += g.count;
  int width = 1;
  for (std::size_t t = total; t >= 10; t /= 10) ++width;

  std::vector<ScoreRecord> out;
  out.reserve(total);
  std::uint64_t next_id = 1;
  for (std::size_t gi = 0; gi < spec.groups.size(); ++gi) {
    const auto& g = spec.groups[gi];
    std::mt19937_64 rng(splitmix64(spec.seed ^ (0x9E3779B97F4A7C15ULL * (gi + 1))));
    std::normal_distribution<double> normal(g.mean, g.std_dev);
    for (std::size_t c = 0; c < g.count; ++c) {
      long long score = 0;
      int attempts = 0;
      do {
        if (++attempts > kRedrawLimit) {
          throw DataError("group '" + g.key.label() +
                          "': could not draw a score inside the range (infeasible truncation)");
        }
        score = std::llround(normal(rng));
      } while (score < spec.min_score || score > spec.max_score);
      out.push_back({pad_id(next_id++, width), g.key.values, static_cast<double>(score)});
    }
  }
  return out;
}

SyntheticSpec load_synthetic_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open synthetic spec '" + path.string() + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("invalid synthetic spec '" + path.string() + "': " + e.what());
  }
  SyntheticSpec spec;
  try {
    spec.schema = doc.at("features").get<std::vector<std::string>>();
    spec.min_score = doc.at("min_score").get<long long>();
    spec.max_score = doc.at("max_score").get<long long>();
    spec.seed = doc.at("seed").get<std::uint64_t>();
    for (const auto& g : doc.at("groups")) {
      SyntheticGroupSpec group;
      group.key.values = g.at("traits").get<std::vector<std::string>>();
      group.count = g.at("count").get<std::size_t>();
      group.mean = g.at("mean").get<double>();
      group.std_dev = g.at("std_dev").get<double>();
      spec.groups.push_back(std::move(group));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError("invalid synthetic spec '" + path.string() + "': " + e.what());
  }
  spec.validate();
  return spec;
}

std::vector<std::string> read_population_schema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open population file '" + path.string() + "'");
  std::string header;
  if (!std::getline(in, header)) throw DataError("population file is empty");
  std::vector<std::string> columns = split_line(header);
  if (columns.size() < 3 || columns.front() != "id" || columns.back() != "score") {
    throw DataError("population header must be 'id,<features...>,score'");
  }
  return {columns.begin() + 1, columns.end() - 1};
}

std::vector<ScoreRecord> load_population_csv(const std::filesystem::path& path,
                                             const std::vector<std::string>& schema) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open population file '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError("population file is empty");
  std::vector<std::string> expected = {"id"};
  expected.insert(expected.end(), schema.begin(), schema.end());
  expected.push_back("score");
  if (split_line(line) != expected) {
    std::string want;
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) want += ',';
      want += expected[i];
    }
    throw DataError("unexpected header; want '" + want + "'");
  }

  std::vector<ScoreRecord> records;
  std::unordered_set<std::string> seen;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> fields = split_line(line);
    if (fields.size() != expected.size()) {
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(expected.size()) + " fields, got " +
                      std::to_string(fields.size()));
    }
    if (fields[0].empty()) {
      throw DataError("line " + std::to_string(line_no) + ": empty id");
    }
    if (!seen.insert(fields[0]).second) {
      throw DataError("line " + std::to_string(line_no) + ": duplicate id '" + fields[0] + "'");
    }
    ScoreRecord record;
    record.id = std::move(fields[0]);
    record.traits.assign(fields.begin() + 1, fields.end() - 1);
    record.raw_score = parse_score(fields.back(), line_no);
    records.push_back(std::move(record));
  }
  if (records.empty()) throw DataError("population file has no data rows");
  return records;
}

void write_population_csv(const std::filesystem::path& path,
                          std::span<const ScoreRecord> records,
                          const std::vector<std::string>& schema) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << "id";
  for (const auto& feature : schema) out << ',' << feature;
  out << ",score\n";
  for (const auto& record : records) {
    out << record.id;
    for (const auto& trait : record.traits) out << ',' << trait;
    out << ',' << format_number(record.raw_score) << '\n';
  }
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

RepairedPopulation load_repair_csv(const std::filesystem::path& path,
                                   const std::vector<std::string>& schema) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open repaired file '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError("repaired file is empty");
  std::vector<std::string> expected = {"id"};
  expected.insert(expected.end(), schema.begin(), schema.end());
  expected.push_back("raw_score");
  expected.push_back("fair_score");
  if (split_line(line) != expected) {
    throw DataError("unexpected repaired-file header in '" + path.string() + "'");
  }

  RepairedPopulation out;
  std::vector<double> fair;
  std::unordered_set<std::string> seen;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> fields = split_line(line);
    if (fields.size() != expected.size()) {
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(expected.size()) + " fields, got " +
                      std::to_string(fields.size()));
    }
    if (fields[0].empty() || !seen.insert(fields[0]).second) {
      throw DataError("line " + std::to_string(line_no) + ": bad or duplicate id");
    }
    ScoreRecord record;
    record.id = std::move(fields[0]);
    record.traits.assign(fields.begin() + 1, fields.end() - 2);
    record.raw_score = parse_score(fields[fields.size() - 2], line_no);
    fair.push_back(parse_score(fields.back(), line_no));
    out.records.push_back(std::move(record));
  }
  if (out.records.empty()) throw DataError("repaired file has no data rows");
  out.fair_scores.resize(static_cast<Index>(fair.size()));
  for (std::size_t i = 0; i < fair.size(); ++i) {
    out.fair_scores(static_cast<Index>(i)) = fair[i];
  }
  return out;
}

void write_repair_csv(const std::filesystem::path& path, std::span<const ScoreRecord> records,
                      const std::vector<std::string>& schema, const ArrayXd& fair_scores) {
  if (static_cast<std::size_t>(fair_scores.size()) != records.size()) {
    throw std::invalid_argument("one fair score per record required");
  }
  std::vector<std::size_t> order(records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return records[a].id < records[b].id; });

  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << "id";
  for (const auto& feature : schema) out << ',' << feature;
  out << ",raw_score,fair_score\n";
  for (const std::size_t i : order) {
    out << records[i].id;
    for (const auto& trait : records[i].traits) out << ',' << trait;
    out << ',' << format_number(records[i].raw_score) << ','
        << format_number(fair_scores(static_cast<Index>(i))) << '\n';
  }
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

}  // namespace fairot
