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

#include "loglab/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>

#include "loglab/errors.hpp"
#include "loglab/objective.hpp"

namespace loglab {
namespace {

namespace fs = std::filesystem;

std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return std::string(s.substr(begin, end - begin + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  if constexpr (std::is_floating_point_v<T>) {
    try {
      std::size_t used = 0;
      out = static_cast<T>(std::stod(value, &used));
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      throw ConfigError("invalid value '" + value + "' for key '" + key + "'");
    }
  } else {
    const auto [ptr, ec] =
        std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
      throw ConfigError("invalid value '" + value + "' for key '" + key + "'");
    }
  }
  return out;
}

}  // namespace

void apply_override(RunConfig& config, const std::string& key,
                    const std::string& value) {
  using Setter = std::function<void(RunConfig&, const std::string&)>;
  static const std::map<std::string, Setter> setters = {
      {"dataset", [](RunConfig& c, const std::string& v) { c.dataset = v; }},
      {"format", [](RunConfig& c, const std::string& v) { c.format = v; }},
      {"limit",
       [](RunConfig& c, const std::string& v) {
         c.limit = parse_number<std::size_t>("limit", v);
       }},
      {"synthetic_messages",
       [](RunConfig& c, const std::string& v) {
         c.synthetic_messages = parse_number<std::size_t>("synthetic_messages", v);
       }},
      {"synthetic_templates",
       [](RunConfig& c, const std::string& v) {
         c.synthetic_templates = parse_number<std::size_t>("synthetic_templates", v);
       }},
      {"synthetic_anomaly_templates",
       [](RunConfig& c, const std::string& v) {
         c.synthetic_anomaly_templates =
             parse_number<std::size_t>("synthetic_anomaly_templates", v);
       }},
      {"synthetic_failures",
       [](RunConfig& c, const std::string& v) {
         c.synthetic_failures = parse_number<std::size_t>("synthetic_failures", v);
       }},
      {"synthetic_rate_per_s",
       [](RunConfig& c, const std::string& v) {
         c.synthetic_rate_per_s = parse_number<double>("synthetic_rate_per_s", v);
       }},
      {"delta_ms",
       [](RunConfig& c, const std::string& v) {
         c.delta_ms = parse_number<std::int64_t>("delta_ms", v);
       }},
      {"max_len",
       [](RunConfig& c, const std::string& v) {
         c.max_len = parse_number<std::size_t>("max_len", v);
       }},
      {"min_token_freq",
       [](RunConfig& c, const std::string& v) {
         c.min_token_freq = parse_number<std::size_t>("min_token_freq", v);
       }},
      {"embed_dim",
       [](RunConfig& c, const std::string& v) {
         c.embed_dim = parse_number<std::size_t>("embed_dim", v);
       }},
      {"ff_hidden_dim",
       [](RunConfig& c, const std::string& v) {
         c.ff_hidden_dim = parse_number<std::size_t>("ff_hidden_dim", v);
       }},
      {"n_layers",
       [](RunConfig& c, const std::string& v) {
         c.n_layers = parse_number<std::size_t>("n_layers", v);
       }},
      {"n_heads",
       [](RunConfig& c, const std::string& v) {
         c.n_heads = parse_number<std::size_t>("n_heads", v);
       }},
      {"dropout",
       [](RunConfig& c, const std::string& v) {
         c.dropout = parse_number<double>("dropout", v);
       }},
      {"batch_size",
       [](RunConfig& c, const std::string& v) {
         c.batch_size = parse_number<std::size_t>("batch_size", v);
       }},
      {"epochs",
       [](RunConfig& c, const std::string& v) {
         c.epochs = parse_number<std::size_t>("epochs", v);
       }},
      {"learning_rate",
       [](RunConfig& c, const std::string& v) {
         c.learning_rate = parse_number<double>("learning_rate", v);
       }},
      {"weight_decay",
       [](RunConfig& c, const std::string& v) {
         c.weight_decay = parse_number<double>("weight_decay", v);
       }},
      {"threshold",
       [](RunConfig& c, const std::string& v) {
         c.threshold = parse_number<double>("threshold", v);
       }},
      {"seed",
       [](RunConfig& c, const std::string& v) {
         c.seed = parse_number<std::uint64_t>("seed", v);
       }},
      {"out_dir", [](RunConfig& c, const std::string& v) { c.out_dir = v; }},
  };

  const auto it = setters.find(key);
  if (it == setters.end()) {
    throw ConfigError("unknown config key '" + key + "'");
  }
  it->second(config, value);
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  RunConfig config;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + " of '" + path +
                        "' is not key = value");
    }
    apply_override(config, trim(stripped.substr(0, eq)),
                   trim(stripped.substr(eq + 1)));
  }
  return config;
}

void validate(const RunConfig& config) {
  const auto fail = [](const std::string& key, const std::string& why) {
    throw ConfigError("config key '" + key + "': " + why);
  };
  if (config.dataset.empty()) {
    fail("dataset", "required (a log file path, or 'synthetic')");
  }
  if (config.dataset == "synthetic") {
    if (config.synthetic_messages == 0) {
      fail("synthetic_messages", "must be >= 1");
    }
    if (config.synthetic_failures > config.synthetic_messages) {
      fail("synthetic_failures", "must not exceed synthetic_messages");
    }
    if (config.synthetic_templates == 0) fail("synthetic_templates", "must be >= 1");
    if (config.synthetic_anomaly_templates > config.synthetic_templates) {
      fail("synthetic_anomaly_templates", "must not exceed synthetic_templates");
    }
    if (!(config.synthetic_rate_per_s > 0.0)) {
      fail("synthetic_rate_per_s", "must be > 0");
    }
  } else {
    try {
      dataset_format_preset(config.format);
    } catch (const InvalidConfig&) {
      fail("format", "unknown format '" + config.format + "'");
    }
  }
  if (config.delta_ms < 0) fail("delta_ms", "must be >= 0");
  if (config.max_len == 1) fail("max_len", "must be 0 (auto) or >= 2");
  if (config.min_token_freq == 0) fail("min_token_freq", "must be >= 1");
  if (config.embed_dim == 0 || config.n_heads == 0 ||
      config.embed_dim % config.n_heads != 0) {
    fail("embed_dim", "must be a positive multiple of n_heads");
  }
  if (config.ff_hidden_dim == 0) fail("ff_hidden_dim", "must be >= 1");
  if (config.n_layers == 0) fail("n_layers", "must be >= 1");
  if (!(config.dropout >= 0.0) || config.dropout >= 1.0) {
    fail("dropout", "must lie in [0,1)");
  }
  if (config.batch_size == 0) fail("batch_size", "must be >= 1");
  if (config.epochs == 0) fail("epochs", "must be >= 1");
  if (!(config.learning_rate > 0.0)) fail("learning_rate", "must be > 0");
  if (config.weight_decay < 0.0) fail("weight_decay", "must be >= 0");
  if (config.threshold < 0.0) fail("threshold", "must be >= 0 (0 = auto)");
  if (config.out_dir.empty()) fail("out_dir", "must not be empty");
}

RunConfig default_synthetic_run_config() {
  RunConfig config;
  config.dataset = "synthetic";
  config.delta_ms = 5000;
  config.max_len = 12;
  // A 50k-message corpus sees few optimizer steps and roughly one
  // anomaly per thousand messages, so the desk-scale run uses a smaller
  // batch, a faster learning rate and no weight decay: decay erodes the
  // slowly accumulating anomaly signal faster than fifty sightings per
  // epoch can rebuild it. Full-dataset runs keep the standard settings.
  config.batch_size = 256;
  config.learning_rate = 1e-3;
  config.weight_decay = 0.0;
  config.seed = 1337;
  config.out_dir = "out/synthetic";
  return config;
}

std::size_t resolved_max_len(const RunConfig& config) {
  if (config.max_len != 0) return config.max_len;
  if (config.dataset == "synthetic") return 12;
  return default_max_len(config.format);
}

ModelConfig model_config_from(const RunConfig& config,
                              std::size_t vocab_size) {
  ModelConfig model;
  model.embed_dim = config.embed_dim;
  model.ff_hidden_dim = config.ff_hidden_dim;
  model.n_layers = config.n_layers;
  model.n_heads = config.n_heads;
  model.dropout = config.dropout;
  model.max_len = resolved_max_len(config);
  model.vocab_size = vocab_size;
  model.seed = config.seed;
  return model;
}

TrainingConfig training_config_from(const RunConfig& config) {
  TrainingConfig training;
  training.batch_size = config.batch_size;
  training.epochs = config.epochs;
  training.learning_rate = config.learning_rate;
  training.weight_decay = config.weight_decay;
  training.shuffle_seed = config.seed;
  return training;
}

PreparedData prepare_data(const RunConfig& config) {
  validate(config);
  PreparedData data;
  data.max_len = resolved_max_len(config);

  if (config.dataset == "synthetic") {
    SyntheticSpec spec;
    spec.n_messages = config.synthetic_messages;
    spec.templates = pick_templates(config.synthetic_templates,
                                    config.synthetic_anomaly_templates);
    spec.n_failures = config.synthetic_failures;
    spec.mean_rate_per_s = config.synthetic_rate_per_s;
    spec.seed = config.seed;
    SyntheticCorpus corpus = generate_synthetic(spec);
    data.weak = assign_weak_labels(std::move(corpus.records),
                                   std::move(corpus.failure_times_ms),
                                   config.delta_ms);
  } else {
    const DatasetFormat format = dataset_format_preset(config.format);
    LoadResult loaded = load_dataset(
        config.dataset, format,
        config.limit > 0 ? std::optional<std::size_t>(config.limit)
                         : std::nullopt);
    data.malformed_lines = loaded.malformed_lines;
    data.weak = build_eval_partition(std::move(loaded.records),
                                     config.delta_ms);
  }

  VocabularyBuilder builder;
  for (const auto& record : data.weak.records) {
    builder.add(tokenize(record.content));
  }
  data.vocab = builder.build(config.min_token_freq);
  return data;
}

std::string checkpoint_path(const RunConfig& config) {
  return (fs::path(config.out_dir) / "checkpoint.bin").string();
}

std::string labeled_path(const RunConfig& config) {
  return (fs::path(config.out_dir) / "labeled.tsv").string();
}

namespace {

void ensure_out_dir(const RunConfig& config) {
  std::error_code ec;
  fs::create_directories(config.out_dir, ec);
  if (ec) {
    throw IoError("cannot create output directory '" + config.out_dir + "'");
  }
}

double resolve_threshold(const RunConfig& config, double q) {
  return config.threshold > 0.0 ? config.threshold : decision_threshold(q);
}

std::string dataset_tag(const RunConfig& config) {
  return config.dataset == "synthetic" ? "synthetic" : config.format;
}

}  // namespace

void cmd_prepare(const RunConfig& config) {
  ensure_out_dir(config);
  const PreparedData data = prepare_data(config);
  const fs::path out(config.out_dir);

  write_normalized(data.weak.records, (out / "normalized.tsv").string());
  write_weak_labels(data.weak, (out / "weak_labels.tsv").string());
  data.vocab.save((out / "vocab.tsv").string());

  std::cout << "records: " << data.weak.records.size()
            << " (malformed skipped: " << data.malformed_lines << ")\n"
            << "|P|: " << data.weak.n_positive
            << "  |U|: " << data.weak.n_unlabeled << "  q: " << data.weak.q()
            << "\n"
            << "vocabulary: " << data.vocab.size() << " tokens\n"
            << "wrote " << (out / "normalized.tsv").string() << ", "
            << (out / "weak_labels.tsv").string() << ", "
            << (out / "vocab.tsv").string() << "\n";
}

void cmd_train(const RunConfig& config) {
  ensure_out_dir(config);
  const PreparedData data = prepare_data(config);
  const ModelConfig model_config = model_config_from(config, data.vocab.size());
  const TrainingConfig training_config = training_config_from(config);

  TrainResult result =
      train(data.weak, data.vocab, model_config, training_config,
            [](const EpochStats& e) {
              std::cout << "epoch " << e.epoch << "  loss " << e.mean_loss
                        << "  P-term " << e.mean_p_term << "  U-term "
                        << e.mean_u_term << "  (" << e.wall_seconds << "s)\n";
            });

  const fs::path out(config.out_dir);
  save_checkpoint(checkpoint_path(config), model_config, result.params);
  result.log.save((out / "training_log.tsv").string());
  std::cout << "wrote " << checkpoint_path(config) << "\n";
}

void cmd_label(const RunConfig& config, const std::string& ckpt_path) {
  ensure_out_dir(config);
  const PreparedData data = prepare_data(config);
  const Checkpoint ckpt = load_checkpoint(ckpt_path, data.vocab.size());

  const EncodedDataset encoded =
      encode_all(data.weak.records, data.vocab, ckpt.config.max_len);
  const std::vector<double> scores =
      score_dataset_norms(encoded, ckpt.params, ckpt.config);

  const double threshold = resolve_threshold(config, data.weak.q());
  const std::vector<std::uint8_t> predicted =
      apply_threshold(scores, threshold);
  write_labeled(labeled_path(config), data.weak.records,
                data.weak.weak_labels, scores, predicted);

  const std::size_t flagged = static_cast<std::size_t>(
      std::count(predicted.begin(), predicted.end(), std::uint8_t{1}));
  std::cout << "threshold " << threshold << ", flagged " << flagged << " of "
            << predicted.size() << " messages\n"
            << "wrote " << labeled_path(config) << "\n";
}

EvalReport cmd_evaluate(const RunConfig& config,
                        const std::string& labeled_file) {
  ensure_out_dir(config);
  const LabeledFile labeled = read_labeled(labeled_file);

  std::vector<std::uint8_t> predicted, truth;
  std::vector<double> scores;
  for (std::size_t i = 0; i < labeled.ids.size(); ++i) {
    if (!labeled.truth_known[i]) continue;
    predicted.push_back(labeled.predicted[i]);
    truth.push_back(labeled.truth[i]);
    scores.push_back(labeled.scores[i]);
  }
  if (truth.empty()) {
    throw EmptyDataset("labeled file has no rows with ground truth");
  }

  // q is recoverable from the weak-label column, so the default threshold
  // does not require re-deriving the partition.
  const std::size_t n_u = static_cast<std::size_t>(
      std::count(labeled.weak.begin(), labeled.weak.end(), kWeakUnlabeled));
  double threshold = config.threshold;
  if (threshold == 0.0) {
    threshold = decision_threshold(compute_q(labeled.weak.size() - n_u, n_u));
  }

  EvalReport report = evaluate(predicted, truth);
  report.threshold = threshold;
  report.delta_ms = config.delta_ms;
  report.dataset = dataset_tag(config);

  std::vector<double> sweep_points = {0.25, 0.5, 1.0, threshold};
  std::sort(sweep_points.begin(), sweep_points.end());
  sweep_points.erase(
      std::unique(sweep_points.begin(), sweep_points.end()),
      sweep_points.end());
  const ThresholdSweep sweep = sweep_report(scores, truth, sweep_points);

  const fs::path out(config.out_dir);
  {
    std::ofstream kv((out / "report.kv").string());
    if (!kv) throw IoError("cannot write report.kv");
    kv << format_report_kv(report);
    kv << "best_sweep_f1=" << sweep.best_f1 << '\n'
       << "best_sweep_threshold=" << sweep.best_threshold << '\n';
  }
  {
    std::ofstream table((out / "report.txt").string());
    if (!table) throw IoError("cannot write report.txt");
    table << format_report_table(sweep.reports);
  }

  std::cout << format_report_kv(report);
  return report;
}

EvalReport cmd_run_all(const RunConfig& config) {
  cmd_prepare(config);
  cmd_train(config);
  cmd_label(config, checkpoint_path(config));
  return cmd_evaluate(config, labeled_path(config));
}

}  // namespace loglab
