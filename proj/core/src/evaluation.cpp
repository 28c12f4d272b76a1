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

#include "loglab/evaluation.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "loglab/errors.hpp"

namespace loglab {

std::vector<std::uint8_t> apply_threshold(const std::vector<double>& scores,
                                          double threshold) {
  if (!(threshold > 0.0)) {
    throw InvalidConfig("threshold must be > 0, got " +
                        std::to_string(threshold));
  }
  std::vector<std::uint8_t> predicted(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    predicted[i] = scores[i] >= threshold ? 1 : 0;  // closed boundary
  }
  return predicted;
}

std::vector<std::uint8_t> apply_threshold(
    const std::vector<ScoredMessage>& scores, double threshold) {
  std::vector<double> plain(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) plain[i] = scores[i].score;
  return apply_threshold(plain, threshold);
}

EvalReport evaluate(const std::vector<std::uint8_t>& predicted,
                    const std::vector<std::uint8_t>& truth) {
  if (predicted.size() != truth.size()) {
    throw LengthMismatch("predicted has " + std::to_string(predicted.size()) +
                         " labels, truth has " + std::to_string(truth.size()));
  }
  EvalReport report;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] && truth[i]) {
      ++report.tp;
    } else if (predicted[i] && !truth[i]) {
      ++report.fp;
    } else if (!predicted[i] && truth[i]) {
      ++report.fn;
    } else {
      ++report.tn;
    }
  }
  report.precision = report.tp + report.fp
                         ? static_cast<double>(report.tp) /
                               static_cast<double>(report.tp + report.fp)
                         : 0.0;
  report.recall = report.tp + report.fn
                      ? static_cast<double>(report.tp) /
                            static_cast<double>(report.tp + report.fn)
                      : 0.0;
  report.f1 = report.precision + report.recall > 0.0
                  ? 2.0 * report.precision * report.recall /
                        (report.precision + report.recall)
                  : 0.0;
  return report;
}

ThresholdSweep sweep_report(const std::vector<double>& scores,
                            const std::vector<std::uint8_t>& truth,
                            const std::vector<double>& thresholds) {
  if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
    throw InvalidConfig("thresholds must be sorted ascending");
  }
  ThresholdSweep sweep;
  for (double t : thresholds) {
    EvalReport report = evaluate(apply_threshold(scores, t), truth);
    report.threshold = t;
    if (report.f1 > sweep.best_f1) {
      sweep.best_f1 = report.f1;
      sweep.best_threshold = t;
    }
    sweep.reports.push_back(std::move(report));
  }
  return sweep;
}

std::string format_report_kv(const EvalReport& report) {
  std::ostringstream out;
  out.precision(6);
  out << std::fixed;
  out << "dataset=" << report.dataset << '\n'
      << "delta_ms=" << report.delta_ms << '\n'
      << "threshold=" << report.threshold << '\n'
      << "tp=" << report.tp << '\n'
      << "fp=" << report.fp << '\n'
      << "tn=" << report.tn << '\n'
      << "fn=" << report.fn << '\n'
      << "precision=" << report.precision << '\n'
      << "recall=" << report.recall << '\n'
      << "f1=" << report.f1 << '\n';
  return out.str();
}

std::string format_report_table(const std::vector<EvalReport>& reports) {
  std::ostringstream out;
  out << "threshold   precision   recall      f1          tp       fp       "
         "fn\n";
  out.precision(4);
  out << std::fixed;
  for (const auto& r : reports) {
    out.width(9);
    out << r.threshold << "   ";
    out.width(9);
    out << r.precision << "   ";
    out.width(6);
    out << r.recall << "   ";
    out.width(6);
    out << r.f1 << "   ";
    out.width(6);
    out << r.tp << "   ";
    out.width(6);
    out << r.fp << "   ";
    out.width(6);
    out << r.fn << '\n';
  }
  return out.str();
}

void write_labeled(const std::string& path,
                   const std::vector<LogRecord>& records,
                   const std::vector<std::uint8_t>& weak_labels,
                   const std::vector<double>& scores,
                   const std::vector<std::uint8_t>& predicted) {
  if (records.size() != weak_labels.size() || records.size() != scores.size() ||
      records.size() != predicted.size()) {
    throw LengthMismatch("labeled-output columns disagree in length");
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.precision(17);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    out << r.id << '\t' << r.timestamp_ms << '\t'
        << (weak_labels[i] == kWeakUnlabeled ? 'U' : 'P') << '\t' << scores[i]
        << '\t' << (predicted[i] ? "abnormal" : "normal") << '\t';
    if (!r.true_label.has_value()) {
      out << "unknown";
    } else {
      out << (*r.true_label ? "abnormal" : "normal");
    }
    out << '\n';
  }
  if (!out) throw IoError("write error on '" + path + "'");
}

LabeledFile read_labeled(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  LabeledFile file;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::size_t id = 0;
    std::int64_t ts = 0;
    char weak = 0;
    double score = 0.0;
    std::string pred, truth;
    if (!(row >> id >> ts >> weak >> score >> pred >> truth)) {
      throw IoError("malformed labeled line '" + line + "'");
    }
    if (weak != 'P' && weak != 'U') {
      throw IoError("bad weak label in line '" + line + "'");
    }
    file.ids.push_back(id);
    file.weak.push_back(weak == 'U' ? kWeakUnlabeled : kWeakPositive);
    file.scores.push_back(score);
    file.predicted.push_back(pred == "abnormal" ? 1 : 0);
    file.truth_known.push_back(truth != "unknown" ? 1 : 0);
    file.truth.push_back(truth == "abnormal" ? 1 : 0);
  }
  if (file.ids.empty()) throw EmptyDataset("labeled file '" + path + "' is empty");
  return file;
}

}  // namespace loglab
