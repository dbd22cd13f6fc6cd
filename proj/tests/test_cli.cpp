// Copyright (c) 2026 The fairot authors.
//
// This software is licensed under the Apache License, Version 2.0 (the "License").
// You may not use this file except in compliance with the License. You may
// obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0.

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairot/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code;
  fs::path dir;
};

// Runs the installed binary inside a scratch directory.
class Scratch {
 public:
  Scratch() {
    dir_ = fs::temp_directory_path() / ("fairot_cli_" + std::to_string(counter_++));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  const fs::path& dir() const { return dir_; }

  int run(const std::string& args) const {
    const std::string command = "cd '" + dir_.string() + "' && '" + FAIROT_BIN + "' " + args +
                                " >cmd_stdout.txt 2>cmd_stderr.txt";
    const int status = std::system(command.c_str());
    return WEXITSTATUS(status);
  }

 private:
  fs::path dir_;
  static int counter_;
};

int Scratch::counter_ = 0;

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_tiny_population(const fs::path& path) {
  std::ofstream out(path);
  out << "id,group,score\n";
  for (int i = 0; i < 40; ++i) {
    // group a scores 60..99, group b scores 20..59
    out << "a" << i << ",a," << 60 + i << "\n";
    out << "b" << i << ",b," << 20 + i << "\n";
  }
}

std::vector<std::string> csv_column(const fs::path& path, std::size_t column) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  std::vector<std::string> out;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string field;
    for (std::size_t c = 0; c <= column; ++c) std::getline(ss, field, ',');
    out.push_back(field);
  }
  return out;
}

}  // namespace

TEST_CASE("generate: default spec and seeded determinism") {
  Scratch scratch;
  REQUIRE(scratch.run("generate --seed 7 --out g1") == 0);
  REQUIRE(scratch.run("generate --seed 7 --out g2") == 0);
  REQUIRE(scratch.run("generate --seed 8 --out g3") == 0);

  const std::string first = slurp(scratch.dir() / "g1/population.csv");
  CHECK(first == slurp(scratch.dir() / "g2/population.csv"));
  CHECK(first != slurp(scratch.dir() / "g3/population.csv"));

  std::istringstream lines(first);
  std::string line;
  std::size_t rows = 0;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 100001);  // header + one row per individual

  const auto manifest = nlohmann::json::parse(slurp(scratch.dir() / "g1/manifest.json"));
  CHECK(manifest["command"] == "generate");
  CHECK(manifest["synthetic_spec"]["seed"] == 7);
  CHECK(manifest["records"] == 100000);
}

TEST_CASE("generate: invalid spec exits with the data error code") {
  Scratch scratch;
  std::ofstream(scratch.dir() / "bad.json") << "{\"seed\": 1}";
  CHECK(scratch.run("generate --synthetic-spec bad.json --out g") == 2);
  const std::string message = slurp(scratch.dir() / "cmd_stderr.txt");
  CHECK(message.find("error") != std::string::npos);
}

TEST_CASE("repair: zero parameter leaves the score column unchanged") {
  Scratch scratch;
  write_tiny_population(scratch.dir() / "pop.csv");
  REQUIRE(scratch.run("repair --input pop.csv --theta 0 --out r0") == 0);
  const auto raw = csv_column(scratch.dir() / "r0/repaired.csv", 2);
  const auto fair = csv_column(scratch.dir() / "r0/repaired.csv", 3);
  CHECK(raw == fair);

  const auto manifest = nlohmann::json::parse(slurp(scratch.dir() / "r0/manifest.json"));
  CHECK(manifest["command"] == "repair");
  CHECK(manifest["population"] == 80);
  for (const auto& g : manifest["groups"]) CHECK(g["theta"] == 0.0);
}

TEST_CASE("repair: full transport aligns both groups in the manifest") {
  Scratch scratch;
  write_tiny_population(scratch.dir() / "pop.csv");
  REQUIRE(scratch.run("repair --input pop.csv --theta 1 --out r1") == 0);
  const auto manifest = nlohmann::json::parse(slurp(scratch.dir() / "r1/manifest.json"));
  CHECK(manifest["parity_gap"].get<double>() <= 1e-6);
}

TEST_CASE("repair: group override changes only the selected rows") {
  Scratch scratch;
  write_tiny_population(scratch.dir() / "pop.csv");
  REQUIRE(scratch.run("repair --input pop.csv --theta 0 --out base") == 0);
  REQUIRE(scratch.run("repair --input pop.csv --theta 0 --theta-group group=b:1.0 "
                      "--out override") == 0);

  std::ifstream base_file(scratch.dir() / "base/repaired.csv");
  std::ifstream override_file(scratch.dir() / "override/repaired.csv");
  std::string base_line, override_line;
  std::getline(base_file, base_line);
  std::getline(override_file, override_line);
  while (std::getline(base_file, base_line) && std::getline(override_file, override_line)) {
    const bool group_b = base_line.find(",b,") != std::string::npos;
    if (group_b) {
      CHECK(base_line != override_line);
    } else {
      CHECK(base_line == override_line);
    }
  }

  CHECK(scratch.run("repair --input pop.csv --theta-group nope=b:1.0 --out x") == 1);
  CHECK(scratch.run("repair --input pop.csv --theta-group group=zz:1.0 --out x") == 2);
  CHECK(scratch.run("repair --input pop.csv --theta 7 --out x") == 1);
}

TEST_CASE("evaluate: identity repair scores perfectly") {
  Scratch scratch;
  write_tiny_population(scratch.dir() / "pop.csv");
  REQUIRE(scratch.run("repair --input pop.csv --theta 0 --out r0") == 0);
  REQUIRE(scratch.run("evaluate pop.csv r0/repaired.csv --k-step 10 --out e0") == 0);

  const auto report = nlohmann::json::parse(slurp(scratch.dir() / "e0/report.json"));
  CHECK(report["individual_fairness_error"] == 0.0);
  CHECK(report["utility"] == 0.0);

  std::ifstream metrics(scratch.dir() / "e0/metrics_k.csv");
  std::string line;
  std::getline(metrics, line);
  CHECK(line == "k,p_at_k,ndcg,share_g1,disparity_g1,share_g2,disparity_g2");
  std::size_t rows = 0;
  while (std::getline(metrics, line)) {
    std::stringstream ss(line);
    std::string k, p, ndcg;
    std::getline(ss, k, ',');
    std::getline(ss, p, ',');
    std::getline(ss, ndcg, ',');
    CHECK(p == "1");
    CHECK(ndcg == "1");
    ++rows;
  }
  CHECK(rows == 8);  // 10..80 in steps of ten
}

TEST_CASE("repair: a feature-value selector covers every matching group") {
  Scratch scratch;
  {
    std::ofstream out(scratch.dir() / "pop.csv");
    out << "id,gender,ethnicity,score\n";
    int serial = 0;
    for (const char* gender : {"0", "1"}) {
      for (const char* ethnicity : {"0", "1", "2"}) {
        for (int m = 0; m < 10; ++m) {
          out << "r" << ++serial << ',' << gender << ',' << ethnicity << ','
              << 10 * (serial % 7) + m << "\n";
        }
      }
    }
  }
  REQUIRE(scratch.run("repair --input pop.csv --theta 0 --theta-group ethnicity=2:1.0 "
                      "--out sel") == 0);
  const auto manifest = nlohmann::json::parse(slurp(scratch.dir() / "sel/manifest.json"));
  for (const auto& g : manifest["groups"]) {
    const double expected = g["traits"][1] == "2" ? 1.0 : 0.0;
    CHECK(g["theta"] == expected);
  }
  // rows outside the selected ethnicity keep their raw scores
  std::ifstream file(scratch.dir() / "sel/repaired.csv");
  std::string line;
  std::getline(file, line);
  while (std::getline(file, line)) {
    if (line.find(",2,") != std::string::npos) continue;
    const auto last = line.rfind(',');
    const auto prev = line.rfind(',', last - 1);
    CHECK(line.substr(prev + 1, last - prev - 1) == line.substr(last + 1));
  }

  // the EU threshold variant is accepted and recorded
  REQUIRE(scratch.run("evaluate pop.csv sel/repaired.csv --threshold 0.75 --out eu") == 0);
  const auto report = nlohmann::json::parse(slurp(scratch.dir() / "eu/report.json"));
  CHECK(report["threshold"] == 0.75);
}

TEST_CASE("evaluate: hand-computed scalars on the two-triple fixture") {
  Scratch scratch;
  {
    std::ofstream out(scratch.dir() / "pop.csv");
    out << "id,g,score\n";
    out << "a1,a,10.5\na2,a,20.5\na3,a,30.5\n";
    out << "b1,b,40.5\nb2,b,50.5\nb3,b,60.5\n";
  }
  REQUIRE(scratch.run("repair --input pop.csv --theta 1 --out r") == 0);
  REQUIRE(scratch.run("evaluate pop.csv r/repaired.csv --k-step 2 --out e") == 0);
  const auto report = nlohmann::json::parse(slurp(scratch.dir() / "e/report.json"));
  // both groups move by a constant 15, so pairwise differences survive and
  // the utility is -(1/2) * 15^2
  CHECK(report["individual_fairness_error"] == 0.0);
  CHECK(report["utility"] == -112.5);
}

TEST_CASE("evaluate: mismatched ids exit with the data error code") {
  Scratch scratch;
  write_tiny_population(scratch.dir() / "pop.csv");
  REQUIRE(scratch.run("repair --input pop.csv --theta 0 --out r0") == 0);
  // corrupt one id in the raw file
  std::string content = slurp(scratch.dir() / "pop.csv");
  content.replace(content.find("a0,"), 3, "zz,");
  std::ofstream(scratch.dir() / "pop2.csv") << content;
  CHECK(scratch.run("evaluate pop2.csv r0/repaired.csv --out e") == 2);
}

TEST_CASE("sweep: trade-off table is sorted and order independent") {
  Scratch scratch;
  write_tiny_population(scratch.dir() / "pop.csv");
  REQUIRE(scratch.run("sweep --input pop.csv --thetas 0,0.5,1 --k-step 10 --out s1") == 0);
  REQUIRE(scratch.run("sweep --input pop.csv --thetas 1,0.5,0 --k-step 10 --out s2") == 0);
  const std::string table = slurp(scratch.dir() / "s1/sweep.csv");
  CHECK(table == slurp(scratch.dir() / "s2/sweep.csv"));

  std::istringstream lines(table);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "theta,individual_fairness_error,utility,parity_gap,min_crossing_rank");
  std::vector<double> thetas, parity;
  while (std::getline(lines, line)) {
    std::stringstream ss(line);
    std::string field;
    std::getline(ss, field, ',');
    thetas.push_back(std::stod(field));
    std::getline(ss, field, ',');
    std::getline(ss, field, ',');
    std::getline(ss, field, ',');
    parity.push_back(std::stod(field));
  }
  REQUIRE(thetas.size() == 3);
  CHECK(thetas[0] == 0.0);
  CHECK(thetas[2] == 1.0);
  // the two groups are fully separated, so parity strictly improves
  CHECK(parity[1] < parity[0]);
  CHECK(parity[2] < parity[1]);

  for (const char* theta : {"0", "0.5", "1"}) {
    CHECK(fs::exists(scratch.dir() / "s1" / (std::string("theta_") + theta) / "report.json"));
  }
}

TEST_CASE("sweep: a single zero row has no fairness error") {
  Scratch scratch;
  write_tiny_population(scratch.dir() / "pop.csv");
  REQUIRE(scratch.run("sweep --input pop.csv --thetas 0 --k-step 20 --out s") == 0);
  std::istringstream lines(slurp(scratch.dir() / "s/sweep.csv"));
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  CHECK(row.substr(0, 4) == "0,0,");
}

TEST_CASE("usage errors exit with code one") {
  Scratch scratch;
  CHECK(scratch.run("") == 1);
  CHECK(scratch.run("bogus") == 1);
  CHECK(scratch.run("repair --no-such-flag") == 1);
  CHECK(scratch.run("sweep --input pop.csv") == 1);  // missing --thetas
  CHECK(scratch.run("sweep --input pop.csv --thetas 0,2 --out s") == 1);
  CHECK(scratch.run("evaluate only_one.csv") == 1);
  write_tiny_population(scratch.dir() / "pop.csv");
  CHECK(scratch.run("repair --input pop.csv --synthetic-spec also.json --out x") == 1);
  CHECK(scratch.run("--help") == 0);
}

TEST_CASE("repair on a missing input exits with the data error code") {
  Scratch scratch;
  CHECK(scratch.run("repair --input nope.csv --out x") == 2);
}

TEST_CASE("cutoff grids end at the population size") {
  CHECK(fairot::default_k_grid(80, 10) ==
        std::vector<std::size_t>({10, 20, 30, 40, 50, 60, 70, 80}));
  CHECK(fairot::default_k_grid(75, 20) == std::vector<std::size_t>({20, 40, 60, 75}));
  CHECK(fairot::default_k_grid(5, 100) == std::vector<std::size_t>({5}));
  // the default step switches at fifty thousand
  CHECK(fairot::default_k_grid(50000, 0).front() == 1000);
  CHECK(fairot::default_k_grid(49999, 0).front() == 100);
  CHECK(fairot::default_k_grid(49999, 0).back() == 49999);
}
