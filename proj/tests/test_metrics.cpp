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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "hiertext/error.h"
#include "hiertext/rng.h"

using namespace hiertext;

namespace {

// Metrics written directly from the definitions, kept deliberately naive so
// they cannot share a bug with the library implementation.
struct BruteForce {
  double macro_p = 0.0, macro_r = 0.0, macro_f1 = 0.0, micro = 0.0;

  explicit BruteForce(const ConfusionMatrix& m) {
    const std::size_t classes = m.num_classes();
    double total = 0.0, correct = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
      double tp = 0.0, predicted_c = 0.0, true_c = 0.0;
      for (std::size_t t = 0; t < classes; ++t) {
        for (std::size_t p = 0; p < classes; ++p) {
          const double count = static_cast<double>(m.at(t, p));
          if (c == 0) {
            total += count;
            if (t == p) correct += count;
          }
          if (t == c && p == c) tp += count;
          if (p == c) predicted_c += count;
          if (t == c) true_c += count;
        }
      }
      const double precision = predicted_c > 0.0 ? tp / predicted_c : 0.0;
      const double recall = true_c > 0.0 ? tp / true_c : 0.0;
      const double f1 =
          precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
      macro_p += precision;
      macro_r += recall;
      macro_f1 += f1;
    }
    macro_p = macro_p / static_cast<double>(classes) * 100.0;
    macro_r = macro_r / static_cast<double>(classes) * 100.0;
    macro_f1 = macro_f1 / static_cast<double>(classes) * 100.0;
    micro = total > 0.0 ? correct / total * 100.0 : 0.0;
  }
};

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("a perfect classifier scores 100 on every metric") {
  const std::vector<int> truths = {0, 1, 2, 1, 0, 2};
  const EvalReport report = evaluate(truths, truths, 3);
  CHECK(report.macro_f1 == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(report.macro_precision == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(report.macro_recall == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(report.micro_accuracy == doctest::Approx(100.0).epsilon(1e-12));
}

TEST_CASE("a symmetric two-class confusion gives two thirds everywhere") {
  ConfusionMatrix confusion(2);
  confusion.add(0, 0, 2);
  confusion.add(0, 1, 1);
  confusion.add(1, 0, 1);
  confusion.add(1, 1, 2);
  const EvalReport report = report_from_confusion(confusion);
  const double two_thirds = 200.0 / 3.0;
  for (const ClassMetrics& c : report.per_class) {
    CHECK(c.precision == doctest::Approx(two_thirds).epsilon(1e-12));
    CHECK(c.recall == doctest::Approx(two_thirds).epsilon(1e-12));
    CHECK(c.f1 == doctest::Approx(two_thirds).epsilon(1e-12));
  }
  CHECK(report.macro_f1 == doctest::Approx(two_thirds).epsilon(1e-12));
  CHECK(report.macro_precision == doctest::Approx(two_thirds).epsilon(1e-12));
  CHECK(report.macro_recall == doctest::Approx(two_thirds).epsilon(1e-12));
  CHECK(report.micro_accuracy == doctest::Approx(two_thirds).epsilon(1e-12));
}

TEST_CASE("macro-F1 averages per-class F1s, not the macro P/R harmonic mean") {
  // [[9,1],[5,5]]: P = (9/14, 5/6), R = (0.9, 0.5), F1 = (0.75, 0.625).
  ConfusionMatrix confusion(2);
  confusion.add(0, 0, 9);
  confusion.add(0, 1, 1);
  confusion.add(1, 0, 5);
  confusion.add(1, 1, 5);
  const EvalReport report = report_from_confusion(confusion);
  CHECK(report.macro_f1 == doctest::Approx(68.75).epsilon(1e-12));
  CHECK(report.macro_precision == doctest::Approx(100.0 * 31.0 / 42.0).epsilon(1e-12));
  CHECK(report.macro_recall == doctest::Approx(70.0).epsilon(1e-12));

  const double harmonic = 2.0 * report.macro_precision * report.macro_recall /
                          (report.macro_precision + report.macro_recall);
  CHECK(harmonic == doctest::Approx(100.0 * 217.0 / 302.0).epsilon(1e-12));
  CHECK(std::abs(report.macro_f1 - harmonic) > 3.0);
}

TEST_CASE("the shipped witness matrix shows the same separation") {
  const ConfusionMatrix witness = not_harmonic_mean_witness();
  const EvalReport report = report_from_confusion(witness);
  const double harmonic = 2.0 * report.macro_precision * report.macro_recall /
                          (report.macro_precision + report.macro_recall);
  CHECK(std::abs(report.macro_f1 - harmonic) > 0.01);
}

TEST_CASE("an absent class contributes zeros to the default macro average") {
  // Class 2 never appears in truths or predictions.
  const std::vector<int> truths = {0, 1, 0, 1};
  const std::vector<int> predictions = {0, 1, 1, 1};
  const EvalReport all = evaluate(truths, predictions, 3);
  REQUIRE(all.per_class.size() == 3);
  CHECK(all.per_class[2].precision == 0.0);
  CHECK(all.per_class[2].recall == 0.0);
  CHECK(all.per_class[2].f1 == 0.0);

  const EvalReport present =
      evaluate(truths, predictions, 3, MetricsOptions{.macro_over_present_only = true});
  // Dropping the structurally-zero class raises the average by exactly 3/2.
  CHECK(present.macro_f1 == doctest::Approx(all.macro_f1 * 3.0 / 2.0).epsilon(1e-12));
  CHECK(present.micro_accuracy == all.micro_accuracy);
}

TEST_CASE("zero denominators never divide") {
  // Everything is predicted as class 0: class 1 has no predictions (P = 0 by
  // convention) while class 0 takes false positives.
  const std::vector<int> truths = {0, 0, 1, 1};
  const std::vector<int> predictions = {0, 0, 0, 0};
  const EvalReport report = evaluate(truths, predictions, 2);
  CHECK(report.per_class[0].precision == doctest::Approx(50.0).epsilon(1e-12));
  CHECK(report.per_class[0].recall == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(report.per_class[1].precision == 0.0);
  CHECK(report.per_class[1].recall == 0.0);
  CHECK(report.per_class[1].f1 == 0.0);
  CHECK(std::isfinite(report.macro_f1));
}

TEST_CASE("evaluation rejects malformed inputs") {
  CHECK_THROWS_AS(evaluate({0, 1}, {0}, 2), LengthMismatch);
  CHECK_THROWS_AS(evaluate({}, {}, 2), EmptyInput);
  CHECK_THROWS_AS(evaluate({0, 2}, {0, 0}, 2), UnknownLeaf);
  CHECK_THROWS_AS(evaluate({0, 0}, {0, -1}, 2), UnknownLeaf);
}

TEST_CASE("metrics are invariant under example reordering") {
  RngStream rng(50, "perm");
  std::vector<int> truths, predictions;
  for (int i = 0; i < 60; ++i) {
    truths.push_back(static_cast<int>(rng.next_index(4)));
    predictions.push_back(static_cast<int>(rng.next_index(4)));
  }
  const EvalReport base = evaluate(truths, predictions, 4);

  std::vector<std::size_t> order(truths.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  std::vector<int> shuffled_truths, shuffled_predictions;
  for (std::size_t i : order) {
    shuffled_truths.push_back(truths[i]);
    shuffled_predictions.push_back(predictions[i]);
  }
  const EvalReport shuffled = evaluate(shuffled_truths, shuffled_predictions, 4);
  CHECK(base.macro_f1 == shuffled.macro_f1);
  CHECK(base.macro_precision == shuffled.macro_precision);
  CHECK(base.macro_recall == shuffled.macro_recall);
  CHECK(base.micro_accuracy == shuffled.micro_accuracy);
}

TEST_CASE("library metrics match the brute-force oracle on random matrices") {
  RngStream rng(51, "matrices");
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t classes = 2 + rng.next_index(9);
    ConfusionMatrix confusion(classes);
    for (std::size_t t = 0; t < classes; ++t) {
      for (std::size_t p = 0; p < classes; ++p) {
        confusion.add(t, p, static_cast<std::int64_t>(rng.next_index(21)));
      }
    }
    const EvalReport report = report_from_confusion(confusion);
    const BruteForce oracle(confusion);
    CHECK(std::abs(report.macro_f1 - oracle.macro_f1) <= 1e-9);
    CHECK(std::abs(report.macro_precision - oracle.macro_p) <= 1e-9);
    CHECK(std::abs(report.macro_recall - oracle.macro_r) <= 1e-9);
    CHECK(std::abs(report.micro_accuracy - oracle.micro) <= 1e-9);

    // Structural properties hold for any matrix.
    CHECK(report.micro_accuracy ==
          doctest::Approx(confusion.total() > 0
                              ? 100.0 * static_cast<double>(confusion.diagonal_total()) /
                                    static_cast<double>(confusion.total())
                              : 0.0)
              .epsilon(1e-12));
    double max_f1 = 0.0;
    for (const ClassMetrics& c : report.per_class) max_f1 = std::max(max_f1, c.f1);
    CHECK(report.macro_f1 <= max_f1 + 1e-12);
    for (const double v : {report.macro_f1, report.macro_precision, report.macro_recall,
                           report.micro_accuracy}) {
      CHECK(v >= 0.0);
      CHECK(v <= 100.0);
    }
  }
}

TEST_CASE("confusion totals add up") {
  ConfusionMatrix confusion(3);
  confusion.add(0, 1, 4);
  confusion.add(1, 1, 5);
  confusion.add(2, 0, 1);
  CHECK(confusion.total() == 10);
  CHECK(confusion.diagonal_total() == 5);
  CHECK(confusion.at(0, 1) == 4);
  CHECK(confusion.at(1, 0) == 0);
}

TEST_CASE("the json record rounds to three decimals") {
  ConfusionMatrix confusion(2);
  confusion.add(0, 0, 9);
  confusion.add(0, 1, 1);
  confusion.add(1, 0, 5);
  confusion.add(1, 1, 5);
  const std::string record = report_record_json(report_from_confusion(confusion));
  CHECK(record.find("\"macro_f1\": 68.750") != std::string::npos);
  CHECK(record.find("\"macro_recall\": 70.000") != std::string::npos);
  CHECK(record.find("\"micro_accuracy\": 70.000") != std::string::npos);
}

}  // TEST_SUITE
