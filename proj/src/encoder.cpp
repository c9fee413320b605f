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

#include "hiertext/encoder.h"

#include <cmath>

#include "hiertext/error.h"

namespace hiertext {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// out = W z + b followed by the activation
Vector affine(const Matrix& w, const Vector& b, const Vector& z, double (*act)(double)) {
  Vector out(w.rows());
  for (std::size_t r = 0; r < w.rows(); ++r) out[r] = act(dot(w.row(r), z) + b[r]);
  return out;
}

}  // namespace

EmbeddingTable EmbeddingTable::zeros(const std::vector<std::string>& vocab_tokens,
                                     std::size_t dim, const std::string& unk_token) {
  EmbeddingTable emb;
  emb.tokens = vocab_tokens;
  emb.table = Matrix(vocab_tokens.size(), dim);
  for (std::size_t i = 0; i < vocab_tokens.size(); ++i) {
    emb.vocab.emplace(vocab_tokens[i], static_cast<int>(i));
    if (vocab_tokens[i] == unk_token) emb.unk_row = static_cast<int>(i);
  }
  if (emb.unk_row < 0) {
    emb.unk_row = static_cast<int>(emb.tokens.size());
    emb.tokens.push_back(unk_token);
    emb.vocab.emplace(unk_token, emb.unk_row);
    Matrix grown(emb.tokens.size(), dim);
    for (std::size_t r = 0; r + 1 < emb.tokens.size(); ++r) {
      auto src = emb.table.row(r);
      std::copy(src.begin(), src.end(), grown.row(r).begin());
    }
    emb.table = std::move(grown);
  }
  return emb;
}

EmbeddingTable EmbeddingTable::random_init(const std::vector<std::string>& vocab_tokens,
                                           std::size_t dim, const std::string& unk_token,
                                           RngStream& rng, bool trainable) {
  EmbeddingTable emb = zeros(vocab_tokens, dim, unk_token);
  emb.trainable = trainable;
  const double bound = std::sqrt(1.0 / static_cast<double>(dim));
  for (std::size_t r = 0; r < emb.size(); ++r) {
    if (static_cast<int>(r) == emb.unk_row) continue;
    for (double& v : emb.table.row(r)) v = rng.next_uniform(-bound, bound);
  }
  return emb;
}

void LstmGates::resize(std::size_t d_emb, std::size_t h_dim) {
  const std::size_t in_dim = d_emb + h_dim;
  w_in = Matrix(h_dim, in_dim);
  w_forget = Matrix(h_dim, in_dim);
  w_out = Matrix(h_dim, in_dim);
  w_cell = Matrix(h_dim, in_dim);
  b_in.assign(h_dim, 0.0);
  b_forget.assign(h_dim, 0.0);
  b_out.assign(h_dim, 0.0);
  b_cell.assign(h_dim, 0.0);
}

void LstmGates::init(std::size_t d_emb, std::size_t h_dim, RngStream& rng) {
  resize(d_emb, h_dim);
  const double bound = std::sqrt(1.0 / static_cast<double>(h_dim));
  for (Matrix* w : {&w_in, &w_forget, &w_out, &w_cell}) {
    for (double& v : w->flat()) v = rng.next_uniform(-bound, bound);
  }
  std::fill(b_forget.begin(), b_forget.end(), 1.0);
}

void EncoderGradients::zero() {
  for (LstmGates* g : {&d_fwd, &d_bwd}) {
    for (Matrix* w : {&g->w_in, &g->w_forget, &g->w_out, &g->w_cell}) w->fill(0.0);
    for (Vector* b : {&g->b_in, &g->b_forget, &g->b_out, &g->b_cell}) {
      std::fill(b->begin(), b->end(), 0.0);
    }
  }
  d_embedding.fill(0.0);
}

Encoder::Encoder(EncoderKind kind, std::size_t d_emb, std::size_t h_dim, bool bidirectional)
    : kind_(kind) {
  params_.d_emb = d_emb;
  params_.h_dim = h_dim;
  params_.bidirectional = bidirectional;
  if (kind_ == EncoderKind::kLstm) {
    params_.fwd.resize(d_emb, h_dim);
    if (bidirectional) params_.bwd.resize(d_emb, h_dim);
  }
}

void Encoder::init_params(RngStream& rng) {
  if (kind_ != EncoderKind::kLstm) return;
  params_.fwd.init(params_.d_emb, params_.h_dim, rng);
  if (params_.bidirectional) params_.bwd.init(params_.d_emb, params_.h_dim, rng);
}

std::size_t Encoder::output_dim() const {
  if (kind_ == EncoderKind::kMeanPool) return params_.d_emb;
  return params_.bidirectional ? 2 * params_.h_dim : params_.h_dim;
}

namespace {

// One direction of the LSTM over rows taken in the given order.
void run_direction(const LstmGates& gates, const EmbeddingTable& emb,
                   const std::vector<int>& rows, bool reversed, std::size_t h_dim,
                   LstmTrace& trace) {
  const std::size_t steps = rows.size();
  const std::size_t d_emb = emb.dim();
  trace.input.resize(steps);
  trace.gate_in.resize(steps);
  trace.gate_forget.resize(steps);
  trace.gate_out.resize(steps);
  trace.gate_cell.resize(steps);
  trace.cell.resize(steps);
  trace.cell_tanh.resize(steps);
  trace.hidden.resize(steps);

  Vector h_prev(h_dim, 0.0);
  Vector c_prev(h_dim, 0.0);
  for (std::size_t t = 0; t < steps; ++t) {
    const int row = rows[reversed ? steps - 1 - t : t];
    Vector z(d_emb + h_dim);
    auto x = emb.table.row(row);
    std::copy(x.begin(), x.end(), z.begin());
    std::copy(h_prev.begin(), h_prev.end(), z.begin() + static_cast<std::ptrdiff_t>(d_emb));

    Vector i = affine(gates.w_in, gates.b_in, z, sigmoid);
    Vector f = affine(gates.w_forget, gates.b_forget, z, sigmoid);
    Vector o = affine(gates.w_out, gates.b_out, z, sigmoid);
    Vector g = affine(gates.w_cell, gates.b_cell, z, std::tanh);

    Vector c(h_dim), tc(h_dim), h(h_dim);
    for (std::size_t k = 0; k < h_dim; ++k) {
      c[k] = f[k] * c_prev[k] + i[k] * g[k];
      tc[k] = std::tanh(c[k]);
      h[k] = o[k] * tc[k];
    }
    trace.input[t] = std::move(z);
    trace.gate_in[t] = std::move(i);
    trace.gate_forget[t] = std::move(f);
    trace.gate_out[t] = std::move(o);
    trace.gate_cell[t] = std::move(g);
    trace.cell[t] = c;
    trace.cell_tanh[t] = std::move(tc);
    trace.hidden[t] = h;
    h_prev = std::move(h);
    c_prev = std::move(c);
  }
}

// BPTT for one direction, seeded with the gradient of the final hidden state.
void backprop_direction(const LstmGates& gates, const LstmTrace& trace,
                        const std::vector<int>& rows, bool reversed, std::size_t d_emb,
                        std::size_t h_dim, const Vector& d_final, LstmGates& d_gates,
                        Matrix* d_embedding) {
  const std::size_t steps = trace.input.size();
  Vector dh = d_final;
  Vector dc(h_dim, 0.0);
  for (std::size_t t = steps; t-- > 0;) {
    const Vector& i = trace.gate_in[t];
    const Vector& f = trace.gate_forget[t];
    const Vector& o = trace.gate_out[t];
    const Vector& g = trace.gate_cell[t];
    const Vector& tc = trace.cell_tanh[t];
    const Vector& z = trace.input[t];
    const Vector* c_prev = t > 0 ? &trace.cell[t - 1] : nullptr;

    Vector da_in(h_dim), da_forget(h_dim), da_out(h_dim), da_cell(h_dim), dc_prev(h_dim);
    for (std::size_t k = 0; k < h_dim; ++k) {
      const double d_out_gate = dh[k] * tc[k];
      const double dck = dc[k] + dh[k] * o[k] * (1.0 - tc[k] * tc[k]);
      const double d_in_gate = dck * g[k];
      const double d_forget_gate = dck * (c_prev ? (*c_prev)[k] : 0.0);
      const double d_cell_cand = dck * i[k];
      dc_prev[k] = dck * f[k];
      da_in[k] = d_in_gate * i[k] * (1.0 - i[k]);
      da_forget[k] = d_forget_gate * f[k] * (1.0 - f[k]);
      da_out[k] = d_out_gate * o[k] * (1.0 - o[k]);
      da_cell[k] = d_cell_cand * (1.0 - g[k] * g[k]);
    }

    Vector dz(d_emb + h_dim, 0.0);
    struct GatePair {
      const Matrix* w;
      Matrix* dw;
      Vector* db;
      const Vector* da;
    };
    const GatePair pairs[] = {
        {&gates.w_in, &d_gates.w_in, &d_gates.b_in, &da_in},
        {&gates.w_forget, &d_gates.w_forget, &d_gates.b_forget, &da_forget},
        {&gates.w_out, &d_gates.w_out, &d_gates.b_out, &da_out},
        {&gates.w_cell, &d_gates.w_cell, &d_gates.b_cell, &da_cell},
    };
    for (const auto& [w, dw, db, da] : pairs) {
      for (std::size_t k = 0; k < h_dim; ++k) {
        const double a = (*da)[k];
        if (a == 0.0) continue;
        axpy(a, z, dw->row(k));
        (*db)[k] += a;
        axpy(a, w->row(k), dz);
      }
    }

    if (d_embedding != nullptr) {
      const int row = rows[reversed ? steps - 1 - t : t];
      axpy(1.0, std::span<const double>(dz).first(d_emb), d_embedding->row(row));
    }
    std::copy(dz.begin() + static_cast<std::ptrdiff_t>(d_emb), dz.end(), dh.begin());
    dc = std::move(dc_prev);
  }
}

}  // namespace

EncoderOutput Encoder::encode(const EmbeddingTable& embeddings, const std::vector<int>& rows,
                              double dropout_rate, bool training, RngStream* dropout_rng) const {
  if (rows.empty()) throw EmptySequence("cannot encode an empty token sequence");
  if (dropout_rate < 0.0 || dropout_rate >= 1.0) {
    throw InvalidDropoutRate("dropout rate must be in [0, 1), got " +
                             std::to_string(dropout_rate));
  }
  if (training && dropout_rate > 0.0 && dropout_rng == nullptr) {
    throw InvalidDropoutRate("training with dropout requires a dropout rng stream");
  }
  if (embeddings.dim() != params_.d_emb) {
    throw DimensionMismatch("embedding dim " + std::to_string(embeddings.dim()) +
                            " does not match encoder d_emb " + std::to_string(params_.d_emb));
  }

  EncoderOutput out;
  out.rows = rows;
  if (out.rows.size() > kMaxSequenceTokens) out.rows.resize(kMaxSequenceTokens);

  if (kind_ == EncoderKind::kMeanPool) {
    out.h.assign(params_.d_emb, 0.0);
    for (int row : out.rows) axpy(1.0, embeddings.table.row(row), out.h);
    const double inv = 1.0 / static_cast<double>(out.rows.size());
    for (double& v : out.h) v *= inv;
  } else {
    run_direction(params_.fwd, embeddings, out.rows, /*reversed=*/false, params_.h_dim,
                  out.fwd_trace);
    if (params_.bidirectional) {
      run_direction(params_.bwd, embeddings, out.rows, /*reversed=*/true, params_.h_dim,
                    out.bwd_trace);
      out.h.resize(2 * params_.h_dim);
      const Vector& hf = out.fwd_trace.hidden.back();
      const Vector& hb = out.bwd_trace.hidden.back();
      std::copy(hf.begin(), hf.end(), out.h.begin());
      std::copy(hb.begin(), hb.end(), out.h.begin() + static_cast<std::ptrdiff_t>(params_.h_dim));
    } else {
      out.h = out.fwd_trace.hidden.back();
    }
  }

  if (training && dropout_rate > 0.0) {
    const double keep_scale = 1.0 / (1.0 - dropout_rate);
    out.dropout_scale.resize(out.h.size());
    for (std::size_t k = 0; k < out.h.size(); ++k) {
      out.dropout_scale[k] = dropout_rng->next_bernoulli(dropout_rate) ? 0.0 : keep_scale;
      out.h[k] *= out.dropout_scale[k];
    }
  }
  out.cached = true;
  return out;
}

void Encoder::backward(const EmbeddingTable& embeddings, const EncoderOutput& output,
                       const Vector& d_hidden, EncoderGradients& grads) const {
  if (!output.cached) throw StaleCache("encoder output carries no cached activations");
  if (d_hidden.size() != output_dim()) {
    throw DimensionMismatch("d_hidden has length " + std::to_string(d_hidden.size()) +
                            ", encoder output dim is " + std::to_string(output_dim()));
  }
  Matrix* d_embedding = embeddings.trainable ? &grads.d_embedding : nullptr;

  Vector d_pre = d_hidden;
  if (!output.dropout_scale.empty()) {
    for (std::size_t k = 0; k < d_pre.size(); ++k) d_pre[k] *= output.dropout_scale[k];
  }

  if (kind_ == EncoderKind::kMeanPool) {
    if (d_embedding == nullptr) return;
    const double inv = 1.0 / static_cast<double>(output.rows.size());
    for (int row : output.rows) axpy(inv, d_pre, d_embedding->row(row));
    return;
  }

  if (params_.bidirectional) {
    Vector d_fwd(d_pre.begin(), d_pre.begin() + static_cast<std::ptrdiff_t>(params_.h_dim));
    Vector d_bwd(d_pre.begin() + static_cast<std::ptrdiff_t>(params_.h_dim), d_pre.end());
    backprop_direction(params_.fwd, output.fwd_trace, output.rows, false, params_.d_emb,
                       params_.h_dim, d_fwd, grads.d_fwd, d_embedding);
    backprop_direction(params_.bwd, output.bwd_trace, output.rows, true, params_.d_emb,
                       params_.h_dim, d_bwd, grads.d_bwd, d_embedding);
  } else {
    backprop_direction(params_.fwd, output.fwd_trace, output.rows, false, params_.d_emb,
                       params_.h_dim, d_pre, grads.d_fwd, d_embedding);
  }
}

EncoderGradients Encoder::make_gradients(const EmbeddingTable& embeddings) const {
  EncoderGradients grads;
  if (kind_ == EncoderKind::kLstm) {
    grads.d_fwd.resize(params_.d_emb, params_.h_dim);
    if (params_.bidirectional) grads.d_bwd.resize(params_.d_emb, params_.h_dim);
  }
  if (embeddings.trainable) grads.d_embedding = Matrix(embeddings.size(), embeddings.dim());
  return grads;
}

std::vector<std::span<double>> gate_views(LstmGates& gates) {
  return {gates.w_in.flat(),   gates.w_forget.flat(), gates.w_out.flat(), gates.w_cell.flat(),
          gates.b_in,          gates.b_forget,        gates.b_out,        gates.b_cell};
}

std::vector<std::span<const double>> gate_views(const LstmGates& gates) {
  return {gates.w_in.flat(),   gates.w_forget.flat(), gates.w_out.flat(), gates.w_cell.flat(),
          gates.b_in,          gates.b_forget,        gates.b_out,        gates.b_cell};
}

std::vector<std::span<double>> Encoder::param_views() {
  if (kind_ != EncoderKind::kLstm) return {};
  auto views = gate_views(params_.fwd);
  if (params_.bidirectional) {
    auto more = gate_views(params_.bwd);
    views.insert(views.end(), more.begin(), more.end());
  }
  return views;
}

std::vector<std::span<const double>> Encoder::param_views() const {
  if (kind_ != EncoderKind::kLstm) return {};
  auto views = gate_views(params_.fwd);
  if (params_.bidirectional) {
    auto more = gate_views(params_.bwd);
    views.insert(views.end(), more.begin(), more.end());
  }
  return views;
}

}  // namespace hiertext
