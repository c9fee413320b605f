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
#include <span>
#include <string>
#include <vector>

#include "hiertext/data.h"
#include "hiertext/matrix.h"
#include "hiertext/metrics.h"
#include "hiertext/model.h"

namespace hiertext {

struct AdamConfig {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// First/second moment buffers mirroring a fixed list of parameter views.
class AdamState {
 public:
  AdamState() = default;
  AdamState(const std::vector<std::span<const double>>& params, AdamConfig config);

  /// One update: t += 1; m, v updated; params -= lr * m_hat / (sqrt(v_hat) +
  /// epsilon), with bias-corrected m_hat, v_hat.
  void step(const std::vector<std::span<double>>& params,
            const std::vector<std::span<const double>>& grads);

  std::uint64_t t() const { return t_; }
  const AdamConfig& config() const { return config_; }

 private:
  AdamConfig config_;
  std::vector<Vector> m_, v_;
  std::uint64_t t_ = 0;
};

struct TrainConfig {
  double lr = 0.001;
  std::size_t batch_size = 10;
  double dropout = 0.5;
  std::size_t k_folds = 4;
  std::size_t max_epochs = 50;
  std::size_t patience = 3;
  std::uint64_t seed = 1;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_macro_f1 = 0.0;
  double val_macro_precision = 0.0;
  double val_macro_recall = 0.0;
  double val_micro_accuracy = 0.0;
  double seconds = 0.0;  // wall clock; excluded from determinism guarantees
};

struct TrainResult {
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;  // 1-based; 0 when history is empty
  double best_val_macro_f1 = 0.0;
};

/// One line-delimited record per epoch (seconds included).
std::string epoch_record_json(const EpochRecord& record);

/// Predicts every example and scores against its label (class indices are
/// the model tree's leaf order).
EvalReport evaluate_model(const TextClassifier& model, const std::vector<Example>& examples);

/// Mini-batch Adam with per-epoch reshuffling and early stopping on
/// validation macro-F1. Gradients are averaged over each batch; the final
/// partial batch is trained on. Stops after `patience` epochs without
/// improvement or at max_epochs, then restores the best-epoch parameters.
/// All randomness derives from config.seed ("shuffle" per epoch, "dropout"
/// per example slot), so identical seeds give bit-identical histories.
TrainResult train(TextClassifier& model, const std::vector<Example>& train_set,
                  const std::vector<Example>& val_set, const TrainConfig& config);

/// Deterministic fold ids (0..k-1) for each train example: stratified by
/// leaf class when the class has at least k examples, pooled random
/// otherwise.
std::vector<std::size_t> assign_folds(const std::vector<Example>& train_set,
                                      const TaxonomyTree& taxonomy, std::size_t k_folds,
                                      std::uint64_t seed);

struct CvCandidate {
  ModelConfig model;
  std::vector<double> fold_macro_f1;
  double mean_macro_f1 = 0.0;
};

struct CvResult {
  std::vector<CvCandidate> candidates;
  std::size_t selected = 0;  // index into candidates
};

/// Trains every candidate on every fold (same folds for all candidates) and
/// selects the best mean validation macro-F1; ties break to the smaller
/// h_dim, then to non-bidirectional.
CvResult cross_validate(const std::vector<Example>& train_set, const TaxonomyTree& taxonomy,
                        const EmbeddingTable& embeddings, const std::vector<ModelConfig>& grid,
                        const TrainConfig& config);

}  // namespace hiertext
