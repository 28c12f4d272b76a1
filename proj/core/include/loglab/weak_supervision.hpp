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
#include <string>
#include <vector>

#include "loglab/ingestion.hpp"

namespace loglab {

inline constexpr std::uint8_t kWeakPositive = 0;   // class P, trusted-normal
inline constexpr std::uint8_t kWeakUnlabeled = 1;  // class U, in-window

// Records plus their window-derived weak labels. Every record carries
// exactly one label: U if it falls inside any failure window, P otherwise.
struct WeakDataset {
  std::vector<LogRecord> records;
  std::vector<std::uint8_t> weak_labels;  // kWeakPositive / kWeakUnlabeled
  std::int64_t delta_ms = 0;
  std::size_t n_positive = 0;
  std::size_t n_unlabeled = 0;

  // |P| / (|P| + |U|), strictly inside (0, 1). Throws DegeneratePartition
  // when either class is empty.
  double q() const;
};

// |P| / (|P| + |U|); throws DegeneratePartition when n_p or n_u is zero.
double compute_q(std::size_t n_p, std::size_t n_u);

// Marks record i as U iff some failure time lies within the closed window
// [t_i - delta_ms, t_i + delta_ms]. An empty failure list is legal and
// yields an all-P partition. delta_ms must be >= 0.
WeakDataset assign_weak_labels(std::vector<LogRecord> records,
                               std::vector<std::int64_t> failure_times_ms,
                               std::int64_t delta_ms);

// Evaluation-setup partition: failure times are the timestamps of every
// ground-truth abnormal record, so all abnormal records end up in U.
// Throws DegeneratePartition when the data has no abnormal record and
// InvalidConfig when some record lacks a ground-truth label.
WeakDataset build_eval_partition(std::vector<LogRecord> records,
                                 std::int64_t delta_ms);

// Partition dump, "id <TAB> P|U" per line. read_weak_labels reproduces the
// identical label vector (records are matched by dense id).
void write_weak_labels(const WeakDataset& dataset, const std::string& path);
std::vector<std::uint8_t> read_weak_labels(const std::string& path,
                                           std::size_t expected_count);

}  // namespace loglab
