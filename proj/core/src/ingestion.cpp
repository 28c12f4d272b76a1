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

#include "loglab/ingestion.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>

#include "loglab/errors.hpp"
#include "loglab/rng.hpp"

namespace loglab {
namespace {

bool is_field_sep(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f';
}

// Whitespace-delimited fields of one line, as views into it.
std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  const std::size_t n = line.size();
  while (i < n) {
    while (i < n && is_field_sep(line[i])) ++i;
    const std::size_t begin = i;
    while (i < n && !is_field_sep(line[i])) ++i;
    if (i > begin) fields.push_back(line.substr(begin, i - begin));
  }
  return fields;
}

std::int64_t parse_timestamp(std::string_view field) {
  std::int64_t value = 0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size() || value < 0) {
    throw MalformedLine("unparsable timestamp field '" + std::string(field) +
                        "'");
  }
  return value;
}

}  // namespace

void DatasetFormat::validate() const {
  if (label_field == timestamp_field) {
    throw InvalidConfig("label and timestamp field indices must differ");
  }
  if (content_start_field <= std::max(label_field, timestamp_field)) {
    throw InvalidConfig(
        "content_start_field must come after the label and timestamp fields");
  }
}

DatasetFormat dataset_format_preset(const std::string& name) {
  // The three supercomputer datasets share one public line layout:
  // alert tag, epoch seconds, date, node, time, node-repeat, message.
  if (name == "bgl" || name == "thunderbird" || name == "spirit" ||
      name == "generic") {
    DatasetFormat format;
    format.name = name;
    return format;
  }
  throw InvalidConfig("unknown dataset format '" + name + "'");
}

std::size_t default_max_len(const std::string& format_name) {
  if (format_name == "thunderbird") return 20;
  if (format_name == "spirit") return 16;
  return 12;
}

LogRecord parse_log_line(std::string_view line, const DatasetFormat& format,
                         std::size_t id) {
  const auto fields = split_fields(line);
  if (fields.size() <= format.content_start_field) {
    throw MalformedLine("expected more than " +
                        std::to_string(format.content_start_field) +
                        " fields, got " + std::to_string(fields.size()));
  }

  LogRecord record;
  record.id = id;
  record.true_label = fields[format.label_field] != "-";

  std::int64_t ts = parse_timestamp(fields[format.timestamp_field]);
  if (format.timestamp_unit == DatasetFormat::TimestampUnit::kSeconds) {
    ts *= 1000;
  }
  record.timestamp_ms = ts;

  std::size_t total = 0;
  for (std::size_t i = format.content_start_field; i < fields.size(); ++i) {
    total += fields[i].size() + 1;
  }
  record.content.reserve(total);
  for (std::size_t i = format.content_start_field; i < fields.size(); ++i) {
    if (i > format.content_start_field) record.content.push_back(' ');
    record.content.append(fields[i]);
  }
  return record;
}

LoadResult load_dataset(const std::string& path, const DatasetFormat& format,
                        std::optional<std::size_t> limit) {
  format.validate();
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset file '" + path + "'");

  LoadResult result;
  std::string line;
  while ((!limit || result.records.size() < *limit) && std::getline(in, line)) {
    try {
      result.records.push_back(
          parse_log_line(line, format, result.records.size()));
    } catch (const MalformedLine&) {
      ++result.malformed_lines;
    }
  }
  if (in.bad()) throw IoError("read error on '" + path + "'");
  if (result.records.empty()) {
    throw EmptyDataset("no valid records in '" + path + "'");
  }
  return result;
}

void SyntheticSpec::validate() const {
  if (templates.empty()) throw InvalidSpec("no templates given");
  if (n_messages == 0) throw InvalidSpec("n_messages must be positive");
  if (n_failures > n_messages) {
    throw InvalidSpec("n_failures exceeds n_messages");
  }
  if (!(mean_rate_per_s > 0.0)) {
    throw InvalidSpec("mean_rate_per_s must be positive");
  }
  const bool has_abnormal =
      std::any_of(templates.begin(), templates.end(),
                  [](const MessageTemplate& t) { return t.abnormal; });
  const bool has_normal =
      std::any_of(templates.begin(), templates.end(),
                  [](const MessageTemplate& t) { return !t.abnormal; });
  if (n_failures > 0 && !has_abnormal) {
    throw InvalidSpec("n_failures > 0 but no abnormal template");
  }
  if (n_messages > n_failures && !has_normal) {
    throw InvalidSpec("normal messages requested but no normal template");
  }
}

std::vector<MessageTemplate> default_template_bank() {
  return {
      {"instruction cache parity error corrected", false},
      {"generating core.{num}", false},
      {"ciod: LOGIN chdir /p/gb{digit}/apps/run failed: No such file or "
       "directory",
       false},
      {"{num} double-hummer alignment exceptions", false},
      {"CE sym {digit}, at {hex}, mask {hex}", false},
      {"total of {num} ddr error(s) detected and corrected", false},
      {"MidplaneSwitchController performing bit sparing on bit {digit}",
       false},
      {"NFS mount failed on fs {digit}, slept {num} seconds, retrying", false},
      {"ciod: Message code {num} is not {num} or {num}", false},
      {"mounted filesystem /p/gb{digit} with daemons {num}", false},
      {"network interface eth{digit} link up at {num} Mbps", false},
      {"job {num} scheduled on {num} nodes by user svc{digit}", false},
      {"node heartbeat queue depth {num} latency {num} us", false},
      {"temperature sensor {digit} reads {num} C within nominal range", false},
      {"fan tray {digit} speed {num} rpm", false},
      {"packet checksum {hex} verified on channel {digit}", false},
      {"memory scrub cycle {num} completed pages {num}", false},
      {"lustre ost{digit} commit {num} blocks in {num} ms", false},
      {"kernel panic - not syncing: machine check interrupt at {hex}", true},
      {"rts panic! - stopping execution: critical input interrupt fault "
       "{hex}",
       true},
  };
}

std::vector<MessageTemplate> pick_templates(std::size_t n_total,
                                            std::size_t n_abnormal) {
  const auto bank = default_template_bank();
  if (n_abnormal > n_total) {
    throw InvalidSpec("more abnormal templates than templates");
  }
  std::vector<MessageTemplate> normal, abnormal;
  for (const auto& t : bank) (t.abnormal ? abnormal : normal).push_back(t);
  const std::size_t n_normal = n_total - n_abnormal;
  if (n_normal > normal.size() || n_abnormal > abnormal.size()) {
    throw InvalidSpec("template bank has only " +
                      std::to_string(normal.size()) + " normal and " +
                      std::to_string(abnormal.size()) + " abnormal templates");
  }
  std::vector<MessageTemplate> picked(normal.begin(),
                                      normal.begin() + n_normal);
  picked.insert(picked.end(), abnormal.begin(), abnormal.begin() + n_abnormal);
  return picked;
}

SyntheticSpec make_default_synthetic_spec() {
  SyntheticSpec spec;
  spec.templates = pick_templates(20, 2);
  return spec;
}

namespace {

std::string hex_digits(Rng& rng, std::size_t count) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out = "0x";
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(kHex[rng.below(16)]);
  }
  return out;
}

std::string fill_template(const std::string& text, Rng& rng) {
  std::string out;
  out.reserve(text.size() + 16);
  std::size_t i = 0;
  while (i < text.size()) {
    if (text.compare(i, 5, "{num}") == 0) {
      out += std::to_string(10 + rng.below(99990));
      i += 5;
    } else if (text.compare(i, 7, "{digit}") == 0) {
      out += std::to_string(rng.below(10));
      i += 7;
    } else if (text.compare(i, 5, "{hex}") == 0) {
      out += hex_digits(rng, 8);
      i += 5;
    } else {
      out.push_back(text[i++]);
    }
  }
  return out;
}

}  // namespace

SyntheticCorpus generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);

  std::vector<std::size_t> normal_ids, abnormal_ids;
  for (std::size_t i = 0; i < spec.templates.size(); ++i) {
    (spec.templates[i].abnormal ? abnormal_ids : normal_ids).push_back(i);
  }

  struct Pending {
    std::int64_t timestamp_ms;
    std::string content;
    bool abnormal;
  };

  const std::size_t n_normal = spec.n_messages - spec.n_failures;
  std::vector<Pending> normal;
  normal.reserve(n_normal);
  std::int64_t t = spec.base_timestamp_ms;
  for (std::size_t i = 0; i < n_normal; ++i) {
    t += std::llround(rng.exponential(spec.mean_rate_per_s) * 1000.0);
    const auto& tpl = spec.templates[normal_ids[rng.below(normal_ids.size())]];
    normal.push_back({t, fill_template(tpl.text, rng), false});
  }
  const std::int64_t t_end = normal.empty() ? spec.base_timestamp_ms : t;

  std::vector<Pending> abnormal;
  abnormal.reserve(spec.n_failures);
  for (std::size_t i = 0; i < spec.n_failures; ++i) {
    const std::int64_t tf =
        spec.base_timestamp_ms +
        static_cast<std::int64_t>(
            rng.below(static_cast<std::uint64_t>(t_end - spec.base_timestamp_ms) + 1));
    const auto& tpl =
        spec.templates[abnormal_ids[rng.below(abnormal_ids.size())]];
    abnormal.push_back({tf, fill_template(tpl.text, rng), true});
  }
  std::sort(abnormal.begin(), abnormal.end(),
            [](const Pending& a, const Pending& b) {
              return a.timestamp_ms < b.timestamp_ms;
            });

  SyntheticCorpus corpus;
  corpus.records.reserve(spec.n_messages);
  corpus.failure_times_ms.reserve(spec.n_failures);

  // Merge the two sorted streams; normal messages win timestamp ties so
  // failures land after the context they interrupt.
  std::size_t a = 0, b = 0;
  while (a < normal.size() || b < abnormal.size()) {
    const bool take_normal =
        b == abnormal.size() ||
        (a < normal.size() &&
         normal[a].timestamp_ms <= abnormal[b].timestamp_ms);
    Pending& src = take_normal ? normal[a++] : abnormal[b++];
    LogRecord record;
    record.id = corpus.records.size();
    record.timestamp_ms = src.timestamp_ms;
    record.content = std::move(src.content);
    record.true_label = src.abnormal;
    if (src.abnormal) corpus.failure_times_ms.push_back(src.timestamp_ms);
    corpus.records.push_back(std::move(record));
  }
  return corpus;
}

void write_normalized(const std::vector<LogRecord>& records,
                      const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (const auto& r : records) {
    out << r.id << '\t' << r.timestamp_ms << '\t';
    if (!r.true_label.has_value()) {
      out << "unknown";
    } else {
      out << (*r.true_label ? "abnormal" : "normal");
    }
    out << '\t' << r.content << '\n';
  }
  if (!out) throw IoError("write error on '" + path + "'");
}

}  // namespace loglab
