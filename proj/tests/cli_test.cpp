// Copyright 2026 The NSM Authors.
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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "nsm/generator.hpp"
#include "test_util.hpp"

using namespace nsm;

namespace {

struct Run {
  int code = -1;
  std::string output;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(NSM_CLI_PATH) + " " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool contains(const std::string& text, const std::string& needle) { return text.find(needle) != std::string::npos; }

}  // namespace

TEST_CASE("help documents every subcommand and flag") {
  const auto top = run("--help");
  CHECK(top.code == 0);
  for (const char* s : {"simulate", "detect", "fit", "predict", "evaluate", "jester-ingest", "--seed", "--threads",
                        "--missing-token", "--header", "--quiet"})
    CHECK(contains(top.output, s));
  const auto ev = run("evaluate --help");
  for (const char* s : {"--scheme", "--fraction", "--cv", "--folds", "--range", "--report", "--truth-rows",
                        "--truth-cols", "--nmi", "--iterations"})
    CHECK(contains(ev.output, s));
  const auto det = run("detect --help");
  for (const char* s : {"--warm-rows", "--trace", "--max-cycles", "--explain"}) CHECK(contains(det.output, s));
  CHECK(contains(run("--version").output, "0.1.0"));
}

TEST_CASE("exit codes") {
  testing::TempDir dir("cli_codes");
  CHECK(run("--no-such-flag").code == 2);
  CHECK(run("detect " + dir.file("missing.csv")).code == 2);
  CHECK(run("evaluate --scheme sideways " + dir.file("missing.csv")).code == 2);
  std::ofstream(dir.file("ragged.csv")) << "1,2,3\n4,5\n";
  const auto bad = run("detect " + dir.file("ragged.csv") + " -o " + dir.file("out"));
  CHECK(bad.code == 1);
  CHECK(contains(bad.output, "error:"));
  std::ofstream(dir.file("text.csv")) << "1,2\nx,4\n";
  CHECK(run("detect " + dir.file("text.csv") + " -o " + dir.file("out")).code == 1);
}

TEST_CASE("pipeline smoke") {
  testing::TempDir dir("cli_pipeline");
  GeneratorConfig cfg;
  cfg.row_sizes = {8, 9};
  cfg.col_sizes = {7, 8};
  const auto hs = hypothesis_set();
  cfg.blocks = {BlockSpec{0, 10, hs[0], 0.1}, BlockSpec{0, 10, hs[7], 0.1}, BlockSpec{0, 10, hs[8], 0.1},
                BlockSpec{0, 10, hs[1], 0.1}};
  std::ofstream(dir.file("config.json")) << cfg.to_json().dump();
  const std::string sim = dir.file("sim"), det = dir.file("det"), fit = dir.file("fit");

  auto r = run("simulate --config " + dir.file("config.json") + " --missing 0.2 --export-mask -o " + sim);
  REQUIRE(r.code == 0);
  for (const char* f : {"matrix.csv", "complete.csv", "truth_rows.csv", "truth_cols.csv", "manifest.json"})
    CHECK(std::filesystem::exists(sim + "/" + f));

  r = run("detect " + sim + "/matrix.csv --trace " + dir.file("trace.jsonl") + " --explain -o " + det);
  REQUIRE(r.code == 0);
  CHECK(std::filesystem::exists(det + "/rows.csv"));
  const auto measure = nlohmann::json::parse(slurp(det + "/measure.json"));
  CHECK(measure.contains("total"));

  r = run("fit " + sim + "/matrix.csv --labels " + det + " --iterations 3 -o " + fit);
  REQUIRE(r.code == 0);
  CHECK(std::filesystem::exists(fit + "/model.json"));
  CHECK(std::filesystem::exists(fit + "/completed.csv"));

  r = run("predict " + fit + "/model.json --query " + sim + "/complete.csv -o " + dir.file("pred"));
  REQUIRE(r.code == 0);
  CHECK(std::filesystem::exists(dir.file("pred") + "/predictions.csv"));

  r = run("--seed 5 evaluate " + sim + "/matrix.csv --scheme edges --fraction 0.2 --iterations 2 --truth-rows " + sim +
          "/truth_rows.csv --truth-cols " + sim + "/truth_cols.csv -o " + dir.file("ev"));
  REQUIRE(r.code == 0);
  const auto report = nlohmann::json::parse(slurp(dir.file("ev") + "/report.json"));
  CHECK(report.at("metrics").contains("mse"));
  CHECK(report.at("metrics").contains("nmi_rows"));
  const auto manifest = nlohmann::json::parse(slurp(dir.file("ev") + "/manifest.json"));
  CHECK(manifest.at("subcommand") == "evaluate");
  CHECK(manifest.at("config").at("seed") == "5");
  CHECK(manifest.at("inputs").size() >= 1);
}
