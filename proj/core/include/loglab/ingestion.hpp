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

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace loglab {

// One parsed log line. id is the 0-based position among the accepted
// records of a file, strictly increasing in file order.
struct LogRecord {
  std::size_t id = 0;
  std::int64_t timestamp_ms = 0;
  std::string content;
  std::optional<bool> true_label;  // true = abnormal, absent = unlabeled

  bool is_abnormal() const { return true_label.value_or(false); }
};

// Field layout of a whitespace-delimited log line. The label field holds
// "-" for normal lines and anything else for abnormal ones; the content is
// everything from content_start_field to the end of the line.
struct DatasetFormat {
  enum class TimestampUnit { kSeconds, kMilliseconds };

  std::string name = "generic";
  std::size_t label_field = 0;
  std::size_t timestamp_field = 1;
  TimestampUnit timestamp_unit = TimestampUnit::kSeconds;
  std::size_t content_start_field = 5;

  // Throws InvalidConfig unless the indices are distinct and the content
  // starts after both header fields.
  void validate() const;
};

// Named presets: "bgl", "thunderbird", "spirit", "generic". All use the
// supercomputer log layout (label, epoch seconds, then header fields,
// message text from field 5). Throws InvalidConfig for unknown names.
DatasetFormat dataset_format_preset(const std::string& name);

// Conventional fixed sequence length for a known dataset (bgl: 12,
// spirit: 16, thunderbird: 20); 12 for anything else.
std::size_t default_max_len(const std::string& format_name);

// Parses one line. Throws MalformedLine on too few fields, an unparsable
// or negative timestamp, or empty content.
LogRecord parse_log_line(std::string_view line, const DatasetFormat& format,
                         std::size_t id);

struct LoadResult {
  std::vector<LogRecord> records;
  std::size_t malformed_lines = 0;
};

// Reads a log file in file order, skipping (and counting) malformed lines.
// At most `limit` records are returned when given. Throws IoError if the
// file cannot be read and EmptyDataset if no valid record is found.
LoadResult load_dataset(const std::string& path, const DatasetFormat& format,
                        std::optional<std::size_t> limit = std::nullopt);

// Message template for the synthetic corpus generator. `text` may contain
// the markers {num} (random integer >= 10), {digit} (random 0..9) and
// {hex} (random 0x-prefixed value), filled at emission time.
struct MessageTemplate {
  std::string text;
  bool abnormal = false;
};

struct SyntheticSpec {
  std::size_t n_messages = 50000;
  std::vector<MessageTemplate> templates;
  std::size_t n_failures = 50;
  double mean_rate_per_s = 5.0;
  std::uint64_t seed = 1337;
  std::int64_t base_timestamp_ms = 1600000000000;

  // Throws InvalidSpec on inconsistent fields (no templates, no abnormal
  // template while n_failures > 0, n_failures > n_messages, rate <= 0).
  void validate() const;
};

// The built-in bank of 20 supercomputer-style templates, the last two
// abnormal. pick_templates trims it to the first `n_normal` normal plus
// `n_abnormal` abnormal entries.
std::vector<MessageTemplate> default_template_bank();
std::vector<MessageTemplate> pick_templates(std::size_t n_total,
                                            std::size_t n_abnormal);

// The bundled desk-scale corpus: 50k messages, 20 templates (2 abnormal),
// 50 failures, 5 msg/s, seed 1337.
SyntheticSpec make_default_synthetic_spec();

struct SyntheticCorpus {
  std::vector<LogRecord> records;
  std::vector<std::int64_t> failure_times_ms;  // sorted, one per failure
};

// Deterministic given spec.seed. Normal messages form an exponential
// inter-arrival stream at mean_rate_per_s; each failure places exactly one
// abnormal-template message, and the returned failure times are those
// messages' timestamps.
SyntheticCorpus generate_synthetic(const SyntheticSpec& spec);

// Normalized dump, one record per line:
//   id <TAB> timestamp_ms <TAB> normal|abnormal|unknown <TAB> content
void write_normalized(const std::vector<LogRecord>& records,
                      const std::string& path);

}  // namespace loglab
