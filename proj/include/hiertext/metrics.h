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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hiertext {

/// Rows are true classes, columns are predicted classes; class order is the
/// taxonomy leaf order.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t num_classes)
      : num_classes_(num_classes), counts_(num_classes * num_classes, 0) {}

  std::size_t num_classes() const { return num_classes_; }
  std::int64_t at(std::size_t truth, std::size_t predicted) const {
    return counts_[truth * num_classes_ + predicted];
  }
  void add(std::size_t truth, std::size_t predicted, std::int64_t count = 1) {
    counts_[truth * num_classes_ + predicted] += count;
  }

  std::int64_t total() const;
  std::int64_t diagonal_total() const;

 private:
  std::size_t num_classes_;
  std::vector<std::int64_t> counts_;
};

struct ClassMetrics {
  double precision = 0.0;  // percent
  double recall = 0.0;
  double f1 = 0.0;
};

/// All values are percentages in [0, 100]. Per-class precision, recall, and
/// F1 use the zero-denominator-is-zero convention; macro values are the
/// unweighted mean over classes.
struct EvalReport {
  double macro_f1 = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double micro_accuracy = 0.0;
  std::vector<ClassMetrics> per_class;
  ConfusionMatrix confusion{0};
};

struct MetricsOptions {
  /// When true, macros average only over classes that appear in the truths or
  /// predictions of the evaluated sample; the default averages over all
  /// taxonomy classes.
  bool macro_over_present_only = false;
};

EvalReport report_from_confusion(const ConfusionMatrix& confusion, MetricsOptions options = {});

/// truths/predictions are leaf class indices in taxonomy leaf order.
EvalReport evaluate(const std::vector<int>& truths, const std::vector<int>& predictions,
                    std::size_t num_classes, MetricsOptions options = {});

/// A confusion matrix whose macro-F1 differs from the harmonic mean of its
/// macro-precision and macro-recall by more than 0.01 percentage points
/// (verified before returning).
ConfusionMatrix not_harmonic_mean_witness();

/// Machine-readable record of the four headline metrics (3-decimal percents).
std::string report_record_json(const EvalReport& report);

}  // namespace hiertext
