// Copyright 2026 The oqc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"
#include "oqc/io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace oqc {
namespace {

namespace fs = std::filesystem;
using io::json;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    root_ = fs::temp_directory_path() / (std::string("oqc_cli_") + info->name());
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  fs::path write_config(const std::string& name, const json& doc) {
    const fs::path p = root_ / name;
    std::ofstream(p) << doc.dump();
    return p;
  }

  int run(const std::string& sub, const fs::path& config, const fs::path& out, std::vector<std::string> extra = {}) {
    std::vector<std::string> argv{"oqc", sub, "-c", config.string(), "-o", out.string()};
    argv.insert(argv.end(), extra.begin(), extra.end());
    return cli::run(argv);
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
  }

  static std::vector<double> last_row(const fs::path& csv) {
    std::istringstream in(slurp(csv));
    std::string line, last;
    while (std::getline(in, line))
      if (!line.empty()) last = line;
    std::vector<double> out;
    std::istringstream cells(last);
    std::string cell;
    while (std::getline(cells, cell, ',')) out.push_back(std::stod(cell));
    return out;
  }

  fs::path root_;
};

json qubit_simulation(double n) {
  return {{"model", {{"qubit", {{"omega", 1.0}, {"mu", 1.0}, {"gamma", 0.5}}}}},
          {"segments", json::array({{{"dt", 10.0}, {"u", 0.0}, {"n", n}, {"repeat", 10}}})}};
}

TEST_F(CliTest, SimulateRelaxesToThermalState) {
  const fs::path out = root_ / "sim";
  ASSERT_EQ(run("simulate", write_config("sim.json", qubit_simulation(1.0)), out), 0);
  // t, x, y, z, then [re, im] per entry row-major
  const auto row = last_row(out / "final_state.csv");
  ASSERT_EQ(row.size(), 12u);
  EXPECT_NEAR(row[0], 100.0, 1e-12);
  EXPECT_NEAR(row[3], 1.0 / 3.0, 1e-6);
  EXPECT_NEAR(row[4], 2.0 / 3.0, 1e-6);
  EXPECT_NEAR(row[10], 1.0 / 3.0, 1e-6);
  EXPECT_NEAR(row[6], 0.0, 1e-9);
  EXPECT_TRUE(fs::exists(out / "trajectory.csv"));
  EXPECT_TRUE(fs::exists(out / "trajectory.json"));
  EXPECT_TRUE(fs::exists(out / "manifest.json"));
}

TEST_F(CliTest, StiefelMaxReachesLargestEigenvalue) {
  const json cfg{{"rho", json::array({json::array({json::array({0.5, 0}), json::array({0.5, 0})}),
                                      json::array({json::array({0.5, 0}), json::array({0.5, 0})})})},
                 {"observable", json::array({json::array({json::array({1, 0}), json::array({0, 0})}),
                                             json::array({json::array({0, 0}), json::array({-1, 0})})})},
                 {"starts", 3},
                 {"seed", 5}};
  const fs::path out = root_ / "stiefel";
  ASSERT_EQ(run("stiefel-max", write_config("st.json", cfg), out), 0);
  const json report = json::parse(slurp(out / "report.json"));
  EXPECT_DOUBLE_EQ(report["lambda_max"].get<double>(), 1.0);
  ASSERT_EQ(report["runs"].size(), 3u);
  for (const auto& r : report["runs"]) EXPECT_NEAR(r["final_objective"].get<double>(), 1.0, 1e-8);
}

TEST_F(CliTest, MissingFieldIsValidationError) {
  json cfg = qubit_simulation(0.0);
  cfg["segments"][0].erase("dt");
  const fs::path out = root_ / "bad";
  testing::internal::CaptureStderr();
  EXPECT_EQ(run("simulate", write_config("bad.json", cfg), out), 1);
  const std::string err = testing::internal::GetCapturedStderr();
  EXPECT_NE(err.find("segments[0].dt"), std::string::npos) << err;
  EXPECT_TRUE(fs::exists(out / "FAILED"));
  EXPECT_FALSE(fs::exists(out / "manifest.json"));
}

TEST_F(CliTest, MalformedInputsAreValidationErrors) {
  const fs::path out = root_ / "bad";
  testing::internal::CaptureStderr();
  EXPECT_EQ(run("simulate", root_ / "does_not_exist.json", out), 1);
  std::ofstream(root_ / "broken.json") << "{ not json";
  EXPECT_EQ(run("simulate", root_ / "broken.json", out), 1);
  json cfg = qubit_simulation(0.0);
  cfg["initial_state"] = json::array({json::array({json::array({2, 0}), json::array({0, 0})}),
                                      json::array({json::array({0, 0}), json::array({-1, 0})})});
  EXPECT_EQ(run("simulate", write_config("neg.json", cfg), out), 1);
  EXPECT_EQ(cli::run({"oqc", "teleport", "-c", "x", "-o", "y"}), 1);
  EXPECT_EQ(cli::run({"oqc"}), 1);
  EXPECT_EQ(cli::run({"oqc", "simulate", "-c", "x"}), 1);
  testing::internal::GetCapturedStderr();
  testing::internal::CaptureStdout();
  EXPECT_EQ(cli::run({"oqc", "--help"}), 0);
  testing::internal::GetCapturedStdout();
}

TEST_F(CliTest, RuntimeFailureLeavesMarkerAndNoManifest) {
  const fs::path out = root_ / "fail";
  fs::create_directories(out);
  std::ofstream(out / "manifest.json") << "{}";
  json cfg{{"omega", 1.0}, {"gamma", 0.1}, {"samples", 3}};
  testing::internal::CaptureStderr();
  EXPECT_EQ(run("reachable", write_config("r.json", cfg), out), 2);
  EXPECT_NE(testing::internal::GetCapturedStderr().find("not converged"), std::string::npos);
  EXPECT_TRUE(fs::exists(out / "FAILED"));
  EXPECT_FALSE(fs::exists(out / "manifest.json"));
  for (const auto& e : fs::directory_iterator(out)) EXPECT_NE(e.path().extension(), ".partial");
}

TEST_F(CliTest, SearchBudgetIsRuntimeFailure) {
  json cfg = json::parse(slurp(fs::path(OQC_CONFIG_DIR) / "kraus_damping.json"));
  cfg["max_states"] = 1;
  testing::internal::CaptureStderr();
  EXPECT_EQ(run("kraus-search", write_config("k.json", cfg), root_ / "k"), 2);
  EXPECT_NE(testing::internal::GetCapturedStderr().find("budget"), std::string::npos);
}

TEST_F(CliTest, RerunsAreByteIdentical) {
  for (const std::string name : {"simulate_qutrit", "stiefel_qutrit", "ingrape_state", "kraus_damping"}) {
    const fs::path cfg = fs::path(OQC_CONFIG_DIR) / (name + ".json");
    std::string sub = name.substr(0, name.find('_'));
    if (sub == "kraus") sub = "kraus-search";
    if (sub == "stiefel") sub = "stiefel-max";
    ASSERT_EQ(run(sub, cfg, root_ / (name + "_a"), {"--workers", "1"}), 0) << name;
    ASSERT_EQ(run(sub, cfg, root_ / (name + "_b"), {"--workers", "3"}), 0) << name;
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(root_ / (name + "_a"))) {
      if (e.path().filename() == "manifest.json") continue;
      EXPECT_EQ(slurp(e.path()), slurp(root_ / (name + "_b") / e.path().filename())) << name << " " << e.path();
      ++files;
    }
    EXPECT_GT(files, 0u);
  }
}

TEST_F(CliTest, ManifestRecordsProvenance) {
  const fs::path cfg = write_config("sim.json", qubit_simulation(0.0));
  const fs::path out = root_ / "m";
  ASSERT_EQ(run("simulate", cfg, out, {"--seed", "42"}), 0);
  const json m = json::parse(slurp(out / "manifest.json"));
  EXPECT_EQ(m["subcommand"], "simulate");
  EXPECT_EQ(m["seed"], 42);
  EXPECT_EQ(m["config_fnv1a64"], io::fnv1a_hex(slurp(cfg)));
  ASSERT_FALSE(m["libraries"]["eigen"].get<std::string>().empty());
  for (const auto& o : m["outputs"]) EXPECT_EQ(o["fnv1a64"], io::fnv1a_hex(slurp(out / o["file"].get<std::string>())));
  EXPECT_EQ(m["outputs"].size(), 3u);
}

TEST_F(CliTest, KrausSearchOutcomes) {
  const fs::path a = root_ / "orbit", b = root_ / "none";
  ASSERT_EQ(run("kraus-search", fs::path(OQC_CONFIG_DIR) / "kraus_hadamard_orbit.json", a), 0);
  ASSERT_EQ(run("kraus-search", fs::path(OQC_CONFIG_DIR) / "kraus_unreachable.json", b), 0);
  const json found = json::parse(slurp(a / "outcome.json"));
  EXPECT_EQ(found["outcome"], "Found");
  EXPECT_EQ(found["replay_verified"], true);
  const json none = json::parse(slurp(b / "outcome.json"));
  EXPECT_EQ(none["outcome"], "NotFoundUpToDepth");
  EXPECT_EQ(none["states_explored"], 2);
  EXPECT_EQ(none["max_depth"], 6);
}

}  // namespace
}  // namespace oqc
