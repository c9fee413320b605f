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

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

#include "hiertext/matrix.h"
#include "hiertext/rng.h"

namespace hiertext {

/// Sequences are truncated to this many tokens before encoding.
inline constexpr std::size_t kMaxSequenceTokens = 400;

/// Token embeddings. Unknown tokens map to a single UNK row.
struct EmbeddingTable {
  std::vector<std::string> tokens;             // row -> token
  std::unordered_map<std::string, int> vocab;  // token -> row
  Matrix table;                                // V x dim
  int unk_row = -1;
  bool trainable = false;

  std::size_t dim() const { return table.cols(); }
  std::size_t size() const { return table.rows(); }

  int row_for(const std::string& token) const {
    auto it = vocab.find(token);
    return it == vocab.end() ? unk_row : it->second;
  }

  /// Zero rows for every vocab token (the state before pretrained vectors are
  /// copied in). The UNK row stays zero either way.
  static EmbeddingTable zeros(const std::vector<std::string>& vocab_tokens, std::size_t dim,
                              const std::string& unk_token);

  /// Rows uniform in [-a, a] with a = sqrt(1 / dim); the UNK row is zero.
  static EmbeddingTable random_init(const std::vector<std::string>& vocab_tokens, std::size_t dim,
                                    const std::string& unk_token, RngStream& rng,
                                    bool trainable = true);
};

/// Gate parameters for one LSTM direction. Each weight maps the concatenated
/// [x_t; h_{t-1}] of length d_emb + h_dim to h_dim.
struct LstmGates {
  Matrix w_in, w_forget, w_out, w_cell;
  Vector b_in, b_forget, b_out, b_cell;

  void resize(std::size_t d_emb, std::size_t h_dim);
  /// Weights uniform [-a, a] with a = sqrt(1 / h_dim); forget bias 1, others 0.
  void init(std::size_t d_emb, std::size_t h_dim, RngStream& rng);
};

struct RecurrentParams {
  std::size_t d_emb = 0;
  std::size_t h_dim = 0;
  bool bidirectional = false;
  LstmGates fwd;
  LstmGates bwd;  // unused unless bidirectional
};

/// Per-step activations kept for backpropagation through time.
struct LstmTrace {
  std::vector<Vector> input;  // z_t = [x_t; h_{t-1}]
  std::vector<Vector> gate_in, gate_forget, gate_out, gate_cell;
  std::vector<Vector> cell, cell_tanh, hidden;
};

struct EncoderOutput {
  Vector h;                // what the classifier consumes (dropout already applied)
  std::vector<int> rows;   // embedding rows, post truncation
  Vector dropout_scale;    // per-component factor on h; empty when rate was 0 or inference
  LstmTrace fwd_trace, bwd_trace;
  bool cached = false;
};

enum class EncoderKind { kMeanPool, kLstm };

struct EncoderGradients {
  LstmGates d_fwd, d_bwd;
  Matrix d_embedding;  // V x d_emb, allocated only when embeddings are trainable
  void zero();
};

/// Produces the hidden state h from a token-row sequence and backpropagates
/// d_hidden into its own parameters and (optionally) the embedding table.
///
/// Mean pool: h is the elementwise mean of the token rows (output_dim =
/// d_emb). LSTM: h is the final hidden state, or the concatenation of the
/// two directions' final states when bidirectional (output_dim = h_dim or
/// 2 * h_dim). During training, inverted dropout scales surviving components
/// of h by 1/(1-rate); inference applies none.
class Encoder {
 public:
  Encoder() = default;
  Encoder(EncoderKind kind, std::size_t d_emb, std::size_t h_dim, bool bidirectional);

  void init_params(RngStream& rng);

  EncoderKind kind() const { return kind_; }
  std::size_t d_emb() const { return params_.d_emb; }
  std::size_t h_dim() const { return params_.h_dim; }
  bool bidirectional() const { return params_.bidirectional; }
  std::size_t output_dim() const;

  /// dropout_rng may be null when rate is 0 or training is false.
  EncoderOutput encode(const EmbeddingTable& embeddings, const std::vector<int>& rows,
                       double dropout_rate, bool training, RngStream* dropout_rng) const;

  /// Reverse-mode gradients of (d_hidden . h) accumulated into `grads`. The
  /// forward pass's dropout mask is replayed. Requires the cached activations
  /// produced by encode.
  void backward(const EmbeddingTable& embeddings, const EncoderOutput& output,
                const Vector& d_hidden, EncoderGradients& grads) const;

  EncoderGradients make_gradients(const EmbeddingTable& embeddings) const;

  RecurrentParams& params() { return params_; }
  const RecurrentParams& params() const { return params_; }

  /// Trainable buffers in a fixed order (empty for mean pool).
  std::vector<std::span<double>> param_views();
  std::vector<std::span<const double>> param_views() const;

 private:
  EncoderKind kind_ = EncoderKind::kMeanPool;
  RecurrentParams params_;
};

std::vector<std::span<double>> gate_views(LstmGates& gates);
std::vector<std::span<const double>> gate_views(const LstmGates& gates);

}  // namespace hiertext
