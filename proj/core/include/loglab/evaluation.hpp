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

#include "loglab/model.hpp"
#include "loglab/weak_supervision.hpp"

namespace loglab {

// Confusion counts and derived metrics, abnormal as the positive class.
// Zero-denominator metrics are defined as 0.
struct EvalReport {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double threshold = 0.0;
  std::int64_t delta_ms = 0;
  std::string dataset;
};

// 1 = abnormal. A score exactly equal to the threshold counts as abnormal.
// threshold must be > 0.
std::vector<std::uint8_t> apply_threshold(const std::vector<double>& scores,
                                          double threshold);
std::vector<std::uint8_t> apply_threshold(
    const std::vector<ScoredMessage>& scores, double threshold);

// Throws LengthMismatch unless the sequences align.
EvalReport evaluate(const std::vector<std::uint8_t>& predicted,
                    const std::vector<std::uint8_t>& truth);

struct ThresholdSweep {
  std::vector<EvalReport> reports;  // one per threshold, same order
  double best_f1 = 0.0;
  double best_threshold = 0.0;
};

// thresholds must be positive and sorted ascending.
ThresholdSweep sweep_report(const std::vector<double>& scores,
                            const std::vector<std::uint8_t>& truth,
                            const std::vector<double>& thresholds);

// Machine-readable key=value lines.
std::string format_report_kv(const EvalReport& report);

// Human-readable fixed-width table, one row per report.
std::string format_report_table(const std::vector<EvalReport>& reports);

// Labeled output, one record per line:
//   id TAB timestamp_ms TAB P|U TAB score TAB predicted TAB truth
// with predicted/truth as normal|abnormal (truth may be unknown).
void write_labeled(const std::string& path,
                   const std::vector<LogRecord>& records,
                   const std::vector<std::uint8_t>& weak_labels,
                   const std::vector<double>& scores,
                   const std::vector<std::uint8_t>& predicted);

// Reads back the columns of a labeled file needed for evaluation. All
// vectors have one entry per row; truth is meaningful where truth_known.
struct LabeledFile {
  std::vector<std::size_t> ids;
  std::vector<std::uint8_t> weak;  // kWeakPositive / kWeakUnlabeled
  std::vector<double> scores;
  std::vector<std::uint8_t> predicted;
  std::vector<std::uint8_t> truth;
  std::vector<std::uint8_t> truth_known;
};

LabeledFile read_labeled(const std::string& path);

}  // namespace loglab
