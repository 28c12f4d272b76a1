// Copyright 2026 The loglab Authors
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

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "loglab/errors.hpp"
#include "loglab/pipeline.hpp"

using namespace loglab;
namespace fs = std::filesystem;

namespace {

RunConfig tiny_synthetic_config(const std::string& out_dir) {
  RunConfig config;
  config.dataset = "synthetic";
  config.synthetic_messages = 1200;
  config.synthetic_failures = 8;
  config.delta_ms = 5000;
  config.max_len = 12;
  config.embed_dim = 16;
  config.ff_hidden_dim = 32;
  config.batch_size = 128;
  config.epochs = 2;
  config.learning_rate = 1e-3;
  config.seed = 21;
  config.out_dir = out_dir;
  return config;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// training_log.tsv without its wall-time column (timing differs run to run)
std::string log_without_wall(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string out, line;
  while (std::getline(in, line)) {
    out += line.substr(0, line.rfind('\t'));
    out += '\n';
  }
  return out;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("config file parsing") {
  const fs::path path = fs::temp_directory_path() / "loglab_cfg_test.cfg";
  {
    std::ofstream out(path);
    out << "# comment\n"
        << "dataset = synthetic\n"
        << "delta_ms = 2500\n"
        << "epochs = 3\n"
        << "learning_rate = 5e-4\n"
        << "\n"
        << "out_dir = /tmp/somewhere\n";
  }
  const RunConfig config = parse_config_file(path.string());
  CHECK(config.dataset == "synthetic");
  CHECK(config.delta_ms == 2500);
  CHECK(config.epochs == 3);
  CHECK(config.learning_rate == doctest::Approx(5e-4));
  CHECK(config.out_dir == "/tmp/somewhere");
  fs::remove(path);
}

TEST_CASE("unknown and malformed keys name themselves") {
  RunConfig config;
  CHECK_THROWS_WITH_AS(apply_override(config, "no_such_key", "1"),
                       doctest::Contains("no_such_key"), ConfigError);
  CHECK_THROWS_WITH_AS(apply_override(config, "epochs", "three"),
                       doctest::Contains("epochs"), ConfigError);
  CHECK_THROWS_WITH_AS(apply_override(config, "delta_ms", "12x"),
                       doctest::Contains("delta_ms"), ConfigError);
}

TEST_CASE("validation names the offending key") {
  RunConfig config;  // dataset missing
  CHECK_THROWS_WITH_AS(validate(config), doctest::Contains("dataset"),
                       ConfigError);

  config.dataset = "synthetic";
  config.delta_ms = -1;
  CHECK_THROWS_WITH_AS(validate(config), doctest::Contains("delta_ms"),
                       ConfigError);

  config.delta_ms = 1000;
  config.format = "emerald";  // irrelevant for synthetic input
  CHECK_NOTHROW(validate(config));

  config.dataset = "some.log";
  CHECK_THROWS_WITH_AS(validate(config), doctest::Contains("format"),
                       ConfigError);

  config = tiny_synthetic_config("x");
  config.threshold = -0.5;
  CHECK_THROWS_WITH_AS(validate(config), doctest::Contains("threshold"),
                       ConfigError);

  config = tiny_synthetic_config("x");
  config.embed_dim = 30;
  config.n_heads = 4;
  CHECK_THROWS_WITH_AS(validate(config), doctest::Contains("embed_dim"),
                       ConfigError);
}

TEST_CASE("max_len defaults follow the format") {
  RunConfig config;
  config.dataset = "whatever.log";
  config.format = "bgl";
  CHECK(resolved_max_len(config) == 12);
  config.format = "spirit";
  CHECK(resolved_max_len(config) == 16);
  config.format = "thunderbird";
  CHECK(resolved_max_len(config) == 20);
  config.max_len = 31;
  CHECK(resolved_max_len(config) == 31);
  config = RunConfig{};
  config.dataset = "synthetic";
  CHECK(resolved_max_len(config) == 12);
}

TEST_CASE("prepare_data on the synthetic corpus") {
  const RunConfig config = tiny_synthetic_config("unused");
  const PreparedData data = prepare_data(config);
  CHECK(data.weak.records.size() == config.synthetic_messages);
  CHECK(data.weak.n_positive + data.weak.n_unlabeled ==
        config.synthetic_messages);
  CHECK(data.weak.n_unlabeled >= config.synthetic_failures);
  CHECK(data.vocab.size() > kNumReservedIds);
  CHECK(data.max_len == 12);
  const double q = data.weak.q();
  CHECK(q > 0.0);
  CHECK(q < 1.0);
}

TEST_CASE("run-all equals the composed stages and is reproducible") {
  const fs::path base = fs::temp_directory_path() / "loglab_pipeline_test";
  fs::remove_all(base);
  const RunConfig staged = tiny_synthetic_config((base / "staged").string());
  const RunConfig all = tiny_synthetic_config((base / "all").string());

  cmd_prepare(staged);
  cmd_train(staged);
  cmd_label(staged, checkpoint_path(staged));
  const EvalReport staged_report =
      cmd_evaluate(staged, labeled_path(staged));

  const EvalReport all_report = cmd_run_all(all);

  CHECK(staged_report.f1 == all_report.f1);
  CHECK(staged_report.tp == all_report.tp);
  CHECK(staged_report.threshold == all_report.threshold);

  for (const char* name :
       {"normalized.tsv", "weak_labels.tsv", "vocab.tsv", "labeled.tsv",
        "report.kv", "report.txt"}) {
    CAPTURE(name);
    CHECK(slurp(base / "staged" / name) == slurp(base / "all" / name));
  }
  CHECK(slurp(base / "staged" / "checkpoint.bin") ==
        slurp(base / "all" / "checkpoint.bin"));
  CHECK(log_without_wall(base / "staged" / "training_log.tsv") ==
        log_without_wall(base / "all" / "training_log.tsv"));

  // a second identical run-all reproduces every artifact
  const RunConfig again = tiny_synthetic_config((base / "again").string());
  cmd_run_all(again);
  CHECK(slurp(base / "again" / "checkpoint.bin") ==
        slurp(base / "all" / "checkpoint.bin"));
  CHECK(slurp(base / "again" / "labeled.tsv") ==
        slurp(base / "all" / "labeled.tsv"));
  fs::remove_all(base);
}

TEST_CASE("label rejects checkpoints from another vocabulary") {
  const fs::path base = fs::temp_directory_path() / "loglab_pipeline_mismatch";
  fs::remove_all(base);
  RunConfig config = tiny_synthetic_config((base / "a").string());
  cmd_train(config);

  RunConfig other = config;
  other.synthetic_templates = 12;  // different corpus, different vocabulary
  other.synthetic_anomaly_templates = 1;
  other.out_dir = (base / "b").string();
  CHECK_THROWS_AS(cmd_label(other, checkpoint_path(config)), VersionMismatch);
  fs::remove_all(base);
}

TEST_CASE("bundled synthetic run config is self-consistent") {
  const RunConfig config = default_synthetic_run_config();
  CHECK_NOTHROW(validate(config));
  CHECK(config.dataset == "synthetic");
  CHECK(config.synthetic_messages == 50000);
  CHECK(config.synthetic_templates == 20);
  CHECK(config.synthetic_anomaly_templates == 2);
  CHECK(config.synthetic_failures == 50);
  CHECK(config.delta_ms == 5000);
}

}  // TEST_SUITE
