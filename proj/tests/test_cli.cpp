/*
 * Copyright (c) 2026 the survgp authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <catch2/catch.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "survgp/evalharness.hpp"
#include "survgp/io.hpp"

using namespace survgp;
namespace fs = std::filesystem;

namespace {

const std::string cli = SURVGP_CLI_PATH;

struct CliDir {
  fs::path path;
  CliDir() {
    path = fs::temp_directory_path() / ("survgp_cli_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~CliDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

int run(const std::string& args) {
  const int status = std::system((cli + " " + args + " >/dev/null 2>&1").c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("simulate is byte-identical under a repeated seed") {
  CliDir dir;
  REQUIRE(run("simulate --out " + dir.file("a") + " --n 6 --signals 2 --r-shared 1 --covariates 1 --seed 7") == 0);
  REQUIRE(run("simulate --out " + dir.file("b") + " --n 6 --signals 2 --r-shared 1 --covariates 1 --seed 7") == 0);
  for (const char* name : {"observations.csv", "covariates.csv", "events.csv", "truth_events.csv"}) {
    CHECK(slurp(dir.file("a") + "/" + name) == slurp(dir.file("b") + "/" + name));
  }
  REQUIRE(run("simulate --out " + dir.file("c") + " --n 6 --signals 2 --r-shared 1 --covariates 1 --seed 8") == 0);
  CHECK(slurp(dir.file("a") + "/observations.csv") != slurp(dir.file("c") + "/observations.csv"));
}

TEST_CASE("train on an empty dataset exits with the validation code") {
  CliDir dir;
  fs::create_directories(dir.file("empty"));
  {
    std::ofstream(dir.file("empty") + "/observations.csv") << "individual_id,signal_id,time_min,value\n";
    std::ofstream(dir.file("empty") + "/covariates.csv") << "individual_id,time_min,name,value\n";
    std::ofstream(dir.file("empty") + "/events.csv") << "individual_id,kind,t_event,t_left,t_right\n";
  }
  CHECK(run("train --data " + dir.file("empty") + " --out " + dir.file("m.ckpt")) == 2);
  // missing directory is also a validation failure
  CHECK(run("train --data " + dir.file("nowhere") + " --out " + dir.file("m.ckpt")) == 2);
  // malformed config file
  std::ofstream(dir.file("bad.cfg")) << "not_a_key=1\n";
  CHECK(run("simulate --config " + dir.file("bad.cfg") + " --out " + dir.file("x")) == 2);
}

TEST_CASE("the full pipeline is deterministic and the CLI matches the library bit for bit") {
  CliDir dir;
  const std::string data = dir.file("data");
  REQUIRE(run("simulate --out " + data + " --n 6 --signals 2 --r-shared 1 --seed 11") == 0);
  const std::string train_flags =
      " --max-global-iters 8 --minibatch 2 --local-max-iters 50 --m-inducing 6 --r-shared 1 --seed 11 --threads 2";
  REQUIRE(run("train --data " + data + " --out " + dir.file("m1.ckpt") + train_flags) == 0);
  REQUIRE(run("train --data " + data + " --out " + dir.file("m2.ckpt") + train_flags) == 0);
  CHECK(slurp(dir.file("m1.ckpt")) == slurp(dir.file("m2.ckpt")));

  REQUIRE(run("predict --checkpoint " + dir.file("m1.ckpt") + " --data " + data + " --out " + dir.file("d1.csv") +
              " --threads 2 --seed 11") == 0);
  REQUIRE(run("predict --checkpoint " + dir.file("m1.ckpt") + " --data " + data + " --out " + dir.file("d2.csv") +
              " --threads 1 --seed 11") == 0);
  CHECK(slurp(dir.file("d1.csv")) == slurp(dir.file("d2.csv")));

  // library path must reproduce the CLI output exactly
  const auto ck = io::load_checkpoint(dir.file("m1.ckpt"));
  auto records = io::load_dataset(data + "/observations.csv", data + "/covariates.csv", data + "/events.csv");
  apply_standardization(records, ck.stats);
  inference::TrainConfig cfg;
  cfg.seed = 11;
  cfg.r_shared = ck.global.r_shared;
  const auto cli_rows = io::load_dists(dir.file("d1.csv"));
  std::size_t at = 0;
  for (const auto& rec : records) {
    const auto insts = evalharness::predict_schedule(ck.global, rec, ck.covariate_names, cfg, 720.0);
    for (const auto& inst : insts) {
      REQUIRE(at < cli_rows.size());
      CHECK(cli_rows[at].individual_id == rec.id);
      CHECK(cli_rows[at].time_min == inst.t);
      CHECK(cli_rows[at].dist.loc == inst.dist.loc);
      CHECK(cli_rows[at].dist.scale == inst.dist.scale);
      CHECK(cli_rows[at].dist.k == inst.dist.k);
      ++at;
    }
  }
  CHECK(at == cli_rows.size());

  REQUIRE(run("decide --dists " + dir.file("d1.csv") + " --out " + dir.file("dec.csv") +
              " --l1 1 --l2 0.4 --q 0.9") == 0);
  REQUIRE(run("evaluate --decisions " + dir.file("dec.csv") + " --data " + data + " --truth " + data +
              "/truth_events.csv --out " + dir.file("metrics.csv")) == 0);
  const auto metrics = slurp(dir.file("metrics.csv"));
  CHECK(metrics.find("mode,L1,L2,q,tpr,fpr,ppv,decision_rate,n_excluded") == 0);

  // idempotency: repeating decide+evaluate reproduces the files
  REQUIRE(run("decide --dists " + dir.file("d1.csv") + " --out " + dir.file("dec2.csv") +
              " --l1 1 --l2 0.4 --q 0.9") == 0);
  CHECK(slurp(dir.file("dec.csv")) == slurp(dir.file("dec2.csv")));
}

TEST_CASE("decisions honor the recorded thresholds when re-checked") {
  CliDir dir;
  const std::string data = dir.file("data");
  REQUIRE(run("simulate --out " + data + " --n 5 --signals 2 --r-shared 1 --seed 19") == 0);
  REQUIRE(run("train --data " + data + " --out " + dir.file("m.ckpt") +
              " --max-global-iters 5 --minibatch 2 --local-max-iters 40 --m-inducing 6 --r-shared 1 --seed 19 "
              "--threads 2") == 0);
  REQUIRE(run("predict --checkpoint " + dir.file("m.ckpt") + " --data " + data + " --out " + dir.file("d.csv") +
              " --threads 2") == 0);
  REQUIRE(run("decide --dists " + dir.file("d.csv") + " --out " + dir.file("dec.csv") +
              " --l1 1.5 --l2 0.3 --q 0.8") == 0);
  for (const auto& row : io::load_decisions(dir.file("dec.csv"))) {
    if (row.decision.verdict == policy::Verdict::negative) CHECK(row.decision.h_hi <= row.decision.tau_lo);
    if (row.decision.verdict == policy::Verdict::positive) CHECK(row.decision.h_hi >= row.decision.tau_hi);
    if (row.decision.verdict == policy::Verdict::abstain) {
      CHECK(row.decision.h_hi > row.decision.tau_lo);
      CHECK(row.decision.h_hi < row.decision.tau_hi);
    }
  }
}
