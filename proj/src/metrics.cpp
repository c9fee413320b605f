// Copyright 2026 The hiertext Authors.
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

#include "hiertext/metrics.h"

#include <cmath>
#include <cstdio>

#include "hiertext/error.h"

namespace hiertext {

std::int64_t ConfusionMatrix::total() const {
  std::int64_t sum = 0;
  for (std::int64_t c : counts_) sum += c;
  return sum;
}

std::int64_t ConfusionMatrix::diagonal_total() const {
  std::int64_t sum = 0;
  for (std::size_t c = 0; c < num_classes_; ++c) sum += at(c, c);
  return sum;
}

EvalReport report_from_confusion(const ConfusionMatrix& confusion, MetricsOptions options) {
  const std::size_t num_classes = confusion.num_classes();
  EvalReport report;
  report.confusion = confusion;
  report.per_class.resize(num_classes);

  double sum_p = 0.0, sum_r = 0.0, sum_f1 = 0.0;
  std::size_t averaged = 0;
  for (std::size_t c = 0; c < num_classes; ++c) {
    std::int64_t tp = confusion.at(c, c);
    std::int64_t row = 0, col = 0;
    for (std::size_t j = 0; j < num_classes; ++j) {
      row += confusion.at(c, j);
      col += confusion.at(j, c);
    }
    const std::int64_t fp = col - tp;
    const std::int64_t fn = row - tp;
    const double precision = (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    const double recall = (tp + fn) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    const double f1 = (precision + recall) > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    report.per_class[c] = {precision * 100.0, recall * 100.0, f1 * 100.0};

    if (options.macro_over_present_only && row == 0 && col == 0) continue;
    sum_p += precision;
    sum_r += recall;
    sum_f1 += f1;
    ++averaged;
  }
  if (averaged > 0) {
    report.macro_precision = sum_p / static_cast<double>(averaged) * 100.0;
    report.macro_recall = sum_r / static_cast<double>(averaged) * 100.0;
    report.macro_f1 = sum_f1 / static_cast<double>(averaged) * 100.0;
  }
  const std::int64_t total = confusion.total();
  report.micro_accuracy =
      total > 0 ? static_cast<double>(confusion.diagonal_total()) / static_cast<double>(total) * 100.0
                : 0.0;
  return report;
}

EvalReport evaluate(const std::vector<int>& truths, const std::vector<int>& predictions,
                    std::size_t num_classes, MetricsOptions options) {
  if (truths.size() != predictions.size()) {
    throw LengthMismatch("truths has " + std::to_string(truths.size()) + " entries, predictions " +
                         std::to_string(predictions.size()));
  }
  if (truths.empty()) throw EmptyInput("nothing to evaluate");
  ConfusionMatrix confusion(num_classes);
  for (std::size_t i = 0; i < truths.size(); ++i) {
    for (int v : {truths[i], predictions[i]}) {
      if (v < 0 || static_cast<std::size_t>(v) >= num_classes) {
        throw UnknownLeaf("class index " + std::to_string(v) + " out of range at example " +
                          std::to_string(i));
      }
    }
    confusion.add(static_cast<std::size_t>(truths[i]), static_cast<std::size_t>(predictions[i]));
  }
  return report_from_confusion(confusion, options);
}

ConfusionMatrix not_harmonic_mean_witness() {
  // Unbalanced two-class errors: per-class F1s average to something visibly
  // different from the harmonic mean of the macro averages.
  ConfusionMatrix witness(2);
  witness.add(0, 0, 9);
  witness.add(0, 1, 1);
  witness.add(1, 0, 5);
  witness.add(1, 1, 5);

  const EvalReport report = report_from_confusion(witness);
  const double harmonic =
      2.0 * report.macro_precision * report.macro_recall /
      (report.macro_precision + report.macro_recall);
  const double gap = std::abs(report.macro_f1 - harmonic);
  if (gap <= 0.01) throw Error("witness construction failed; gap " + std::to_string(gap));
  return witness;
}

std::string report_record_json(const EvalReport& report) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "{\"macro_f1\": %.3f, \"macro_precision\": %.3f, \"macro_recall\": %.3f, "
                "\"micro_accuracy\": %.3f}",
                report.macro_f1, report.macro_precision, report.macro_recall,
                report.micro_accuracy);
  return buf;
}

}  // namespace hiertext
