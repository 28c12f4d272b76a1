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

#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>

#include "loglab/errors.hpp"
#include "loglab/pipeline.hpp"

namespace {

// Flags that can override their config-file keys.
struct Overrides {
  std::optional<std::string> dataset, format, out_dir;
  std::optional<std::int64_t> delta_ms;
  std::optional<std::size_t> max_len, limit;
  std::optional<std::uint64_t> seed;
  std::optional<double> threshold;
};

void add_common_options(CLI::App* cmd, std::string& config_path,
                        Overrides& ov) {
  cmd->add_option("--config", config_path, "key = value run configuration");
  cmd->add_option("--dataset", ov.dataset,
                  "log file path, or 'synthetic' for the built-in corpus");
  cmd->add_option("--format", ov.format,
                  "dataset format: bgl | thunderbird | spirit | generic");
  cmd->add_option("--delta-ms", ov.delta_ms,
                  "failure window half-width in milliseconds");
  cmd->add_option("--max-len", ov.max_len,
                  "fixed token sequence length (0 = per-format default)");
  cmd->add_option("--seed", ov.seed, "master seed for the whole run");
  cmd->add_option("--threshold", ov.threshold,
                  "labeling threshold (0 = q^(2/3))");
  cmd->add_option("--out-dir", ov.out_dir, "output directory");
  cmd->add_option("--limit", ov.limit, "read at most this many records");
}

loglab::RunConfig resolve_config(const std::string& config_path,
                                 const Overrides& ov) {
  loglab::RunConfig config;
  if (!config_path.empty()) {
    config = loglab::parse_config_file(config_path);
  }
  if (ov.dataset) config.dataset = *ov.dataset;
  if (ov.format) config.format = *ov.format;
  if (ov.delta_ms) config.delta_ms = *ov.delta_ms;
  if (ov.max_len) config.max_len = *ov.max_len;
  if (ov.seed) config.seed = *ov.seed;
  if (ov.threshold) config.threshold = *ov.threshold;
  if (ov.out_dir) config.out_dir = *ov.out_dir;
  if (ov.limit) config.limit = *ov.limit;
  loglab::validate(config);
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Weakly supervised anomaly labeling for large log files: partitions "
      "messages by failure time windows, trains an attention-based scorer "
      "with a PU objective and emits per-message labels."};
  app.require_subcommand(1);

  std::string config_path;
  Overrides ov;
  std::string ckpt_override, labeled_override;

  CLI::App* prepare = app.add_subcommand(
      "prepare", "Parse the dataset, build the weak partition and vocabulary");
  CLI::App* train =
      app.add_subcommand("train", "Train the scorer, write a checkpoint");
  CLI::App* label =
      app.add_subcommand("label", "Score every message and assign labels");
  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "Compare labeled output against ground truth");
  CLI::App* run_all =
      app.add_subcommand("run-all", "prepare + train + label + evaluate");

  for (CLI::App* cmd : {prepare, train, label, evaluate, run_all}) {
    add_common_options(cmd, config_path, ov);
  }
  label->add_option("--checkpoint", ckpt_override,
                    "checkpoint file (default: <out-dir>/checkpoint.bin)");
  evaluate->add_option("--labeled", labeled_override,
                       "labeled file (default: <out-dir>/labeled.tsv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // usage problems exit 1
  }

  try {
    const loglab::RunConfig config = resolve_config(config_path, ov);
    if (prepare->parsed()) {
      loglab::cmd_prepare(config);
    } else if (train->parsed()) {
      loglab::cmd_train(config);
    } else if (label->parsed()) {
      loglab::cmd_label(config, ckpt_override.empty()
                                    ? loglab::checkpoint_path(config)
                                    : ckpt_override);
    } else if (evaluate->parsed()) {
      loglab::cmd_evaluate(config, labeled_override.empty()
                                       ? loglab::labeled_path(config)
                                       : labeled_override);
    } else if (run_all->parsed()) {
      loglab::cmd_run_all(config);
    }
  } catch (const loglab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
