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

#include "loglab/weak_supervision.hpp"

#include <algorithm>
#include <fstream>

#include "loglab/errors.hpp"

namespace loglab {

double WeakDataset::q() const { return compute_q(n_positive, n_unlabeled); }

double compute_q(std::size_t n_p, std::size_t n_u) {
  if (n_p == 0 || n_u == 0) {
    throw DegeneratePartition("q needs both classes, got |P|=" +
                              std::to_string(n_p) +
                              " |U|=" + std::to_string(n_u));
  }
  return static_cast<double>(n_p) / static_cast<double>(n_p + n_u);
}

WeakDataset assign_weak_labels(std::vector<LogRecord> records,
                               std::vector<std::int64_t> failure_times_ms,
                               std::int64_t delta_ms) {
  if (delta_ms < 0) throw InvalidConfig("delta_ms must be >= 0");
  std::sort(failure_times_ms.begin(), failure_times_ms.end());

  WeakDataset dataset;
  dataset.delta_ms = delta_ms;
  dataset.weak_labels.resize(records.size(), kWeakPositive);

  for (std::size_t i = 0; i < records.size(); ++i) {
    const std::int64_t t = records[i].timestamp_ms;
    // Closed window: the nearest failure time at or above t - delta decides.
    const auto it = std::lower_bound(failure_times_ms.begin(),
                                     failure_times_ms.end(), t - delta_ms);
    if (it != failure_times_ms.end() && *it <= t + delta_ms) {
      dataset.weak_labels[i] = kWeakUnlabeled;
      ++dataset.n_unlabeled;
    } else {
      ++dataset.n_positive;
    }
  }
  dataset.records = std::move(records);
  return dataset;
}

WeakDataset build_eval_partition(std::vector<LogRecord> records,
                                 std::int64_t delta_ms) {
  std::vector<std::int64_t> failure_times;
  for (const auto& r : records) {
    if (!r.true_label.has_value()) {
      throw InvalidConfig("record " + std::to_string(r.id) +
                          " lacks a ground-truth label");
    }
    if (*r.true_label) failure_times.push_back(r.timestamp_ms);
  }
  if (failure_times.empty()) {
    throw DegeneratePartition("no abnormal records to derive failure times");
  }
  return assign_weak_labels(std::move(records), std::move(failure_times),
                            delta_ms);
}

void write_weak_labels(const WeakDataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (std::size_t i = 0; i < dataset.records.size(); ++i) {
    out << dataset.records[i].id << '\t'
        << (dataset.weak_labels[i] == kWeakUnlabeled ? 'U' : 'P') << '\n';
  }
  if (!out) throw IoError("write error on '" + path + "'");
}

std::vector<std::uint8_t> read_weak_labels(const std::string& path,
                                           std::size_t expected_count) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::vector<std::uint8_t> labels(expected_count, kWeakPositive);
  std::size_t seen = 0;
  std::size_t id = 0;
  char tab = 0, cls = 0;
  while (in >> id >> std::noskipws >> tab >> cls >> std::skipws) {
    if (tab != '\t' || (cls != 'P' && cls != 'U') || id >= expected_count) {
      throw IoError("malformed weak-label line in '" + path + "'");
    }
    labels[id] = (cls == 'U') ? kWeakUnlabeled : kWeakPositive;
    ++seen;
  }
  if (seen != expected_count) {
    throw IoError("expected " + std::to_string(expected_count) +
                  " weak labels in '" + path + "', got " +
                  std::to_string(seen));
  }
  return labels;
}

}  // namespace loglab
