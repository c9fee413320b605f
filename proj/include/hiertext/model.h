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
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hiertext/encoder.h"
#include "hiertext/hsoftmax.h"
#include "hiertext/matrix.h"
#include "hiertext/rng.h"
#include "hiertext/taxonomy.h"

namespace hiertext {

struct ModelConfig {
  EncoderKind encoder = EncoderKind::kLstm;
  std::size_t h_dim = 100;  // per direction; ignored by mean pool
  bool bidirectional = false;
  bool train_embeddings = false;
};

/// Gradient accumulator shaped like a TextClassifier's trainable parameters.
/// d_output has one matrix per taxonomy parent slot (off-path slots stay
/// zero), so repeated examples accumulate by plain addition.
struct ModelGradients {
  std::vector<Matrix> d_output;
  EncoderGradients d_encoder;
  bool embeddings_trainable = false;

  void zero();
  void scale(double factor);
  /// Same order and shapes as TextClassifier::trainable_views.
  std::vector<std::span<double>> views();
  std::vector<std::span<const double>> views() const;
};

/// End-to-end classifier: embedding lookup, encoder, hierarchical softmax.
/// All randomness (parameter init, dropout) derives from the construction
/// seed via named substreams, so two models built with the same arguments are
/// bit-identical.
class TextClassifier {
 public:
  TextClassifier() = default;
  TextClassifier(TaxonomyTree tree, EmbeddingTable embeddings, ModelConfig config,
                 std::uint64_t seed);

  const TaxonomyTree& tree() const { return tree_; }
  const ModelConfig& config() const { return config_; }
  const EmbeddingTable& embeddings() const { return embeddings_; }
  EmbeddingTable& embeddings() { return embeddings_; }
  const Encoder& encoder() const { return encoder_; }
  Encoder& encoder() { return encoder_; }
  const HierSoftmaxParams& output() const { return output_; }
  HierSoftmaxParams& output() { return output_; }

  /// Encoder output length = hierarchical softmax input length.
  std::size_t h_dim_in() const { return encoder_.output_dim(); }
  /// Trainable scalar count (embeddings included only when trainable).
  std::size_t num_parameters() const;

  NodeId leaf_for_label(const std::string& label) const;
  std::vector<int> rows_for_tokens(const std::vector<std::string>& tokens) const;

  /// Inference-mode loss (no dropout).
  double example_loss(const std::vector<std::string>& tokens, NodeId target) const;

  /// Training-mode forward and backward for one example; gradients are added
  /// into `grads`. Returns the example loss under the sampled dropout mask.
  double forward_backward(const std::vector<std::string>& tokens, NodeId target,
                          double dropout_rate, RngStream* dropout_rng,
                          ModelGradients& grads) const;

  NodeId predict(const std::vector<std::string>& tokens) const;
  Vector leaf_log_probs_for(const std::vector<std::string>& tokens) const;

  ModelGradients make_gradients() const;
  /// Order: hierarchical softmax slots, encoder gates, embedding table (only
  /// when trainable). ModelGradients::views matches element for element.
  std::vector<std::span<double>> trainable_views();
  std::vector<std::span<const double>> trainable_views() const;

  void save(const std::string& path) const;
  static TextClassifier load(const std::string& path);
  void write(std::ostream& out) const;
  static TextClassifier read(std::istream& in);

 private:
  TaxonomyTree tree_;
  EmbeddingTable embeddings_;
  ModelConfig config_;
  Encoder encoder_;
  HierSoftmaxParams output_;
};

}  // namespace hiertext
