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

#include "hiertext/model.h"

#include <fstream>
#include <sstream>

#include "hiertext/error.h"
#include "hiertext/serialize.h"

namespace hiertext {
namespace {

constexpr char kMagic[5] = "HTXM";
constexpr std::uint32_t kVersion = 1;

// Mirrors Encoder::param_views: gate blocks appear only when allocated.
template <typename Gradients, typename Span>
void append_encoder_views(Gradients& grads, std::vector<Span>& out) {
  for (auto* gates : {&grads.d_fwd, &grads.d_bwd}) {
    if (gates->w_in.flat().empty()) continue;
    auto views = gate_views(*gates);
    out.insert(out.end(), views.begin(), views.end());
  }
}

}  // namespace

void ModelGradients::zero() {
  for (Matrix& m : d_output) m.fill(0.0);
  d_encoder.zero();
}

void ModelGradients::scale(double factor) {
  for (std::span<double> view : views())
    for (double& v : view) v *= factor;
}

std::vector<std::span<double>> ModelGradients::views() {
  std::vector<std::span<double>> out;
  for (Matrix& m : d_output) out.push_back(m.flat());
  append_encoder_views(d_encoder, out);
  if (embeddings_trainable) out.push_back(d_encoder.d_embedding.flat());
  return out;
}

std::vector<std::span<const double>> ModelGradients::views() const {
  std::vector<std::span<const double>> out;
  for (const Matrix& m : d_output) out.push_back(m.flat());
  append_encoder_views(d_encoder, out);
  if (embeddings_trainable) out.push_back(d_encoder.d_embedding.flat());
  return out;
}

TextClassifier::TextClassifier(TaxonomyTree tree, EmbeddingTable embeddings, ModelConfig config,
                               std::uint64_t seed)
    : tree_(std::move(tree)), embeddings_(std::move(embeddings)), config_(config) {
  embeddings_.trainable = config_.train_embeddings;
  encoder_ = Encoder(config_.encoder, embeddings_.dim(), config_.h_dim, config_.bidirectional);
  RngStream encoder_rng(derive_seed(seed, "encoder_init"));
  encoder_.init_params(encoder_rng);
  RngStream output_rng(derive_seed(seed, "output_init"));
  output_ = HierSoftmaxParams::random_init(tree_, encoder_.output_dim(), output_rng);
}

std::size_t TextClassifier::num_parameters() const {
  std::size_t count = output_.num_parameters();
  for (std::span<const double> view : encoder_.param_views()) count += view.size();
  if (embeddings_.trainable) count += embeddings_.table.flat().size();
  return count;
}

NodeId TextClassifier::leaf_for_label(const std::string& label) const {
  const auto node = tree_.find(label);
  if (!node || !tree_.is_leaf(*node)) throw UnknownLabel("not a taxonomy leaf: " + label);
  return *node;
}

std::vector<int> TextClassifier::rows_for_tokens(const std::vector<std::string>& tokens) const {
  std::vector<int> rows;
  rows.reserve(tokens.size());
  for (const std::string& token : tokens) rows.push_back(embeddings_.row_for(token));
  return rows;
}

double TextClassifier::example_loss(const std::vector<std::string>& tokens, NodeId target) const {
  const EncoderOutput out =
      encoder_.encode(embeddings_, rows_for_tokens(tokens), 0.0, false, nullptr);
  return loss(output_, tree_, out.h, target);
}

double TextClassifier::forward_backward(const std::vector<std::string>& tokens, NodeId target,
                                        double dropout_rate, RngStream* dropout_rng,
                                        ModelGradients& grads) const {
  const EncoderOutput out =
      encoder_.encode(embeddings_, rows_for_tokens(tokens), dropout_rate, true, dropout_rng);
  const double value = loss(output_, tree_, out.h, target);
  const PathGradients path = loss_gradients(output_, tree_, out.h, target);
  for (const auto& [parent, d_w] : path.d_weights) {
    Matrix& slot = grads.d_output[tree_.parent_slot(parent)];
    axpy(1.0, d_w.flat(), slot.flat());
  }
  encoder_.backward(embeddings_, out, path.d_hidden, grads.d_encoder);
  return value;
}

NodeId TextClassifier::predict(const std::vector<std::string>& tokens) const {
  const EncoderOutput out =
      encoder_.encode(embeddings_, rows_for_tokens(tokens), 0.0, false, nullptr);
  return hiertext::predict(output_, tree_, out.h);
}

Vector TextClassifier::leaf_log_probs_for(const std::vector<std::string>& tokens) const {
  const EncoderOutput out =
      encoder_.encode(embeddings_, rows_for_tokens(tokens), 0.0, false, nullptr);
  return leaf_log_probs(output_, tree_, out.h);
}

ModelGradients TextClassifier::make_gradients() const {
  ModelGradients grads;
  grads.d_output.reserve(tree_.num_parents());
  for (NodeId parent : tree_.parents())
    grads.d_output.emplace_back(tree_.fan_out(parent), h_dim_in() + 1);
  grads.d_encoder = encoder_.make_gradients(embeddings_);
  grads.embeddings_trainable = embeddings_.trainable;
  return grads;
}

std::vector<std::span<double>> TextClassifier::trainable_views() {
  std::vector<std::span<double>> out = output_.param_views();
  for (std::span<double> view : encoder_.param_views()) out.push_back(view);
  if (embeddings_.trainable) out.push_back(embeddings_.table.flat());
  return out;
}

std::vector<std::span<const double>> TextClassifier::trainable_views() const {
  std::vector<std::span<const double>> out = output_.param_views();
  for (std::span<const double> view : encoder_.param_views()) out.push_back(view);
  if (embeddings_.trainable) out.push_back(embeddings_.table.flat());
  return out;
}

void TextClassifier::write(std::ostream& out) const {
  io::write_magic(out, kMagic);
  io::write_u32(out, kVersion);
  io::write_u32(out, static_cast<std::uint32_t>(config_.encoder));
  io::write_u64(out, config_.h_dim);
  io::write_u32(out, config_.bidirectional ? 1 : 0);
  io::write_u32(out, config_.train_embeddings ? 1 : 0);

  const auto& edges = tree_.edges();
  io::write_u64(out, edges.size());
  for (const auto& [parent, child] : edges) {
    io::write_string(out, parent);
    io::write_string(out, child);
  }

  io::write_u64(out, embeddings_.tokens.size());
  for (const std::string& token : embeddings_.tokens) io::write_string(out, token);
  io::write_matrix(out, embeddings_.table);
  io::write_u32(out, static_cast<std::uint32_t>(embeddings_.unk_row));

  const auto encoder_views = encoder_.param_views();
  io::write_u64(out, encoder_views.size());
  for (std::span<const double> view : encoder_views) {
    io::write_u64(out, view.size());
    for (double v : view) io::write_double(out, v);
  }

  io::write_u64(out, output_.num_matrices());
  for (std::size_t s = 0; s < output_.num_matrices(); ++s) io::write_matrix(out, output_.slot(s));
}

TextClassifier TextClassifier::read(std::istream& in) {
  io::read_magic(in, kMagic);
  const std::uint32_t version = io::read_u32(in);
  if (version != kVersion) throw BadCheckpoint("unsupported version " + std::to_string(version));

  ModelConfig config;
  config.encoder = static_cast<EncoderKind>(io::read_u32(in));
  config.h_dim = io::read_u64(in);
  config.bidirectional = io::read_u32(in) != 0;
  config.train_embeddings = io::read_u32(in) != 0;

  std::vector<std::pair<std::string, std::string>> edges(io::read_u64(in));
  for (auto& [parent, child] : edges) {
    parent = io::read_string(in);
    child = io::read_string(in);
  }

  EmbeddingTable embeddings;
  embeddings.tokens.resize(io::read_u64(in));
  for (std::size_t i = 0; i < embeddings.tokens.size(); ++i) {
    embeddings.tokens[i] = io::read_string(in);
    embeddings.vocab.emplace(embeddings.tokens[i], static_cast<int>(i));
  }
  embeddings.table = io::read_matrix(in);
  embeddings.unk_row = static_cast<int>(io::read_u32(in));
  embeddings.trainable = config.train_embeddings;
  if (embeddings.table.rows() != embeddings.tokens.size())
    throw BadCheckpoint("embedding row count does not match token count");

  TextClassifier model;
  model.tree_ = TaxonomyTree::build_from_edges(edges);
  model.config_ = config;
  model.embeddings_ = std::move(embeddings);
  model.encoder_ =
      Encoder(config.encoder, model.embeddings_.dim(), config.h_dim, config.bidirectional);

  const std::size_t num_views = io::read_u64(in);
  auto views = model.encoder_.param_views();
  if (num_views != views.size()) throw BadCheckpoint("encoder view count mismatch");
  for (std::span<double> view : views) {
    if (io::read_u64(in) != view.size()) throw BadCheckpoint("encoder view size mismatch");
    for (double& v : view) v = io::read_double(in);
  }

  model.output_ = HierSoftmaxParams(model.tree_, model.encoder_.output_dim());
  if (io::read_u64(in) != model.output_.num_matrices())
    throw BadCheckpoint("output matrix count mismatch");
  for (std::size_t s = 0; s < model.output_.num_matrices(); ++s) {
    Matrix m = io::read_matrix(in);
    if (m.rows() != model.output_.slot(s).rows() || m.cols() != model.output_.slot(s).cols())
      throw BadCheckpoint("output matrix shape mismatch at slot " + std::to_string(s));
    model.output_.slot(s) = std::move(m);
  }
  return model;
}

void TextClassifier::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MissingFile("cannot open for writing: " + path);
  write(out);
  if (!out) throw BadCheckpoint("short write: " + path);
}

TextClassifier TextClassifier::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFile(path);
  return read(in);
}

}  // namespace hiertext
