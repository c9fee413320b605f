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

#include "hiertext/optim.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <unordered_map>
#include <utility>

#include "hiertext/error.h"
#include "hiertext/rng.h"

namespace hiertext {
namespace {

std::vector<Vector> snapshot(const std::vector<std::span<const double>>& views) {
  std::vector<Vector> copy;
  copy.reserve(views.size());
  for (std::span<const double> view : views) copy.emplace_back(view.begin(), view.end());
  return copy;
}

void restore(const std::vector<Vector>& copy, const std::vector<std::span<double>>& views) {
  for (std::size_t i = 0; i < views.size(); ++i)
    std::copy(copy[i].begin(), copy[i].end(), views[i].begin());
}

}  // namespace

EvalReport evaluate_model(const TextClassifier& model, const std::vector<Example>& examples) {
  const TaxonomyTree& tree = model.tree();
  std::vector<int> truths, predictions;
  truths.reserve(examples.size());
  predictions.reserve(examples.size());
  for (const Example& example : examples) {
    truths.push_back(tree.leaf_index(model.leaf_for_label(example.label)));
    predictions.push_back(tree.leaf_index(model.predict(example.tokens)));
  }
  return evaluate(truths, predictions, tree.num_leaves());
}

AdamState::AdamState(const std::vector<std::span<const double>>& params, AdamConfig config)
    : config_(config) {
  m_.reserve(params.size());
  v_.reserve(params.size());
  for (std::span<const double> view : params) {
    m_.emplace_back(view.size(), 0.0);
    v_.emplace_back(view.size(), 0.0);
  }
}

void AdamState::step(const std::vector<std::span<double>>& params,
                     const std::vector<std::span<const double>>& grads) {
  if (params.size() != m_.size() || grads.size() != m_.size())
    throw ShapeMismatch("adam buffers track " + std::to_string(m_.size()) + " views, got " +
                        std::to_string(params.size()) + " params / " +
                        std::to_string(grads.size()) + " grads");
  ++t_;
  const double bias1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double bias2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < m_.size(); ++i) {
    if (params[i].size() != m_[i].size() || grads[i].size() != m_[i].size())
      throw ShapeMismatch("adam view " + std::to_string(i) + " expects " +
                          std::to_string(m_[i].size()) + " entries");
    for (std::size_t j = 0; j < m_[i].size(); ++j) {
      const double g = grads[i][j];
      m_[i][j] = config_.beta1 * m_[i][j] + (1.0 - config_.beta1) * g;
      v_[i][j] = config_.beta2 * v_[i][j] + (1.0 - config_.beta2) * g * g;
      const double m_hat = m_[i][j] / bias1;
      const double v_hat = v_[i][j] / bias2;
      params[i][j] -= config_.lr * m_hat / (std::sqrt(v_hat) + config_.epsilon);
    }
  }
}

std::string epoch_record_json(const EpochRecord& record) {
  char buf[320];
  std::snprintf(buf, sizeof(buf),
                "{\"epoch\": %zu, \"train_loss\": %.9f, \"val_macro_f1\": %.3f, "
                "\"val_macro_precision\": %.3f, \"val_macro_recall\": %.3f, "
                "\"val_micro_accuracy\": %.3f, \"seconds\": %.3f}",
                record.epoch, record.train_loss, record.val_macro_f1,
                record.val_macro_precision, record.val_macro_recall, record.val_micro_accuracy,
                record.seconds);
  return buf;
}

TrainResult train(TextClassifier& model, const std::vector<Example>& train_set,
                  const std::vector<Example>& val_set, const TrainConfig& config) {
  if (train_set.empty()) throw EmptyDataset("training set is empty");
  TrainResult result;
  if (config.max_epochs == 0) return result;
  if (val_set.empty()) throw EmptyDataset("validation set is empty");

  std::vector<NodeId> targets;
  targets.reserve(train_set.size());
  for (const Example& example : train_set) targets.push_back(model.leaf_for_label(example.label));
  for (const Example& example : val_set) model.leaf_for_label(example.label);

  AdamConfig adam_config;
  adam_config.lr = config.lr;
  AdamState adam(std::as_const(model).trainable_views(), adam_config);
  ModelGradients grads = model.make_gradients();

  std::vector<std::size_t> order(train_set.size());
  double best_f1 = -std::numeric_limits<double>::infinity();
  std::vector<Vector> best_params;
  std::size_t epochs_since_improvement = 0;

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    std::iota(order.begin(), order.end(), 0);
    RngStream shuffle_rng(derive_seed(config.seed, "shuffle", epoch));
    shuffle_rng.shuffle(order);

    double loss_sum = 0.0;
    std::size_t cursor = 0;
    while (cursor < order.size()) {
      const std::size_t batch = std::min(config.batch_size, order.size() - cursor);
      grads.zero();
      for (std::size_t b = 0; b < batch; ++b) {
        const std::size_t slot = cursor + b;
        const std::size_t i = order[slot];
        RngStream dropout_rng(derive_seed(config.seed, "dropout", epoch, slot));
        loss_sum += model.forward_backward(train_set[i].tokens, targets[i], config.dropout,
                                           &dropout_rng, grads);
      }
      grads.scale(1.0 / static_cast<double>(batch));
      adam.step(model.trainable_views(), std::as_const(grads).views());
      cursor += batch;
    }

    const EvalReport report = evaluate_model(model, val_set);
    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = loss_sum / static_cast<double>(train_set.size());
    record.val_macro_f1 = report.macro_f1;
    record.val_macro_precision = report.macro_precision;
    record.val_macro_recall = report.macro_recall;
    record.val_micro_accuracy = report.micro_accuracy;
    record.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    result.history.push_back(record);

    if (report.macro_f1 > best_f1) {
      best_f1 = report.macro_f1;
      best_params = snapshot(std::as_const(model).trainable_views());
      result.best_epoch = epoch;
      result.best_val_macro_f1 = best_f1;
      epochs_since_improvement = 0;
    } else if (++epochs_since_improvement >= config.patience) {
      break;
    }
  }

  restore(best_params, model.trainable_views());
  return result;
}

std::vector<std::size_t> assign_folds(const std::vector<Example>& train_set,
                                      const TaxonomyTree& taxonomy, std::size_t k_folds,
                                      std::uint64_t seed) {
  if (k_folds < 2) throw ConfigError("k_folds must be at least 2");
  if (train_set.size() < k_folds)
    throw TooFewExamples(std::to_string(train_set.size()) + " examples for " +
                         std::to_string(k_folds) + " folds");

  std::unordered_map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < train_set.size(); ++i) {
    const auto node = taxonomy.find(train_set[i].label);
    if (!node || !taxonomy.is_leaf(*node))
      throw UnknownLabel("not a taxonomy leaf: " + train_set[i].label);
    by_class[taxonomy.leaf_index(*node)].push_back(i);
  }

  RngStream rng(derive_seed(seed, "folds"));
  std::vector<std::size_t> fold_of(train_set.size());
  std::vector<std::size_t> pooled;
  std::size_t counter = 0;
  // Classes in leaf order so the assignment doesn't depend on map iteration.
  for (std::size_t c = 0; c < taxonomy.num_leaves(); ++c) {
    const auto it = by_class.find(static_cast<int>(c));
    if (it == by_class.end()) continue;
    if (it->second.size() < k_folds) {
      pooled.insert(pooled.end(), it->second.begin(), it->second.end());
      continue;
    }
    rng.shuffle(it->second);
    for (std::size_t i : it->second) fold_of[i] = counter++ % k_folds;
  }
  rng.shuffle(pooled);
  for (std::size_t i : pooled) fold_of[i] = counter++ % k_folds;
  return fold_of;
}

CvResult cross_validate(const std::vector<Example>& train_set, const TaxonomyTree& taxonomy,
                        const EmbeddingTable& embeddings, const std::vector<ModelConfig>& grid,
                        const TrainConfig& config) {
  if (grid.empty()) throw ConfigError("empty configuration grid");
  const std::vector<std::size_t> fold_of =
      assign_folds(train_set, taxonomy, config.k_folds, config.seed);

  CvResult result;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    CvCandidate candidate;
    candidate.model = grid[g];
    for (std::size_t fold = 0; fold < config.k_folds; ++fold) {
      std::vector<Example> fold_train, fold_val;
      for (std::size_t i = 0; i < train_set.size(); ++i)
        (fold_of[i] == fold ? fold_val : fold_train).push_back(train_set[i]);

      TrainConfig fold_config = config;
      fold_config.seed = derive_seed(config.seed, "cv", g, fold);
      TextClassifier model(taxonomy, embeddings, grid[g], fold_config.seed);
      const TrainResult trained = train(model, fold_train, fold_val, fold_config);
      candidate.fold_macro_f1.push_back(trained.best_val_macro_f1);
    }
    candidate.mean_macro_f1 =
        std::accumulate(candidate.fold_macro_f1.begin(), candidate.fold_macro_f1.end(), 0.0) /
        static_cast<double>(candidate.fold_macro_f1.size());
    result.candidates.push_back(std::move(candidate));
  }

  result.selected = 0;
  for (std::size_t g = 1; g < result.candidates.size(); ++g) {
    const CvCandidate& challenger = result.candidates[g];
    const CvCandidate& incumbent = result.candidates[result.selected];
    const bool better =
        challenger.mean_macro_f1 > incumbent.mean_macro_f1 ||
        (challenger.mean_macro_f1 == incumbent.mean_macro_f1 &&
         (challenger.model.h_dim < incumbent.model.h_dim ||
          (challenger.model.h_dim == incumbent.model.h_dim &&
           !challenger.model.bidirectional && incumbent.model.bidirectional)));
    if (better) result.selected = g;
  }
  return result;
}

}  // namespace hiertext
