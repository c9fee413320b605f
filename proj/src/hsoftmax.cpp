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

#include "hiertext/hsoftmax.h"

#include <cmath>
#include <fstream>
#include <limits>

#include "hiertext/error.h"
#include "hiertext/serialize.h"

namespace hiertext {

namespace {

constexpr double kProbFloor = 1e-300;  // floor before log; unreachable in normal training

void check_binding(const HierSoftmaxParams& params, const TaxonomyTree& tree) {
  if (params.num_matrices() != tree.num_parents()) {
    throw DimensionMismatch("parameters hold " + std::to_string(params.num_matrices()) +
                            " matrices but the tree has " + std::to_string(tree.num_parents()) +
                            " parent nodes");
  }
}

void check_hidden(const HierSoftmaxParams& params, const Vector& h) {
  if (h.size() != params.h_dim_in()) {
    throw DimensionMismatch("hidden state has length " + std::to_string(h.size()) +
                            ", parameters expect " + std::to_string(params.h_dim_in()));
  }
}

// logits[j] = w_pj . [h; 1]
Vector logits_for(const Matrix& weights, const Vector& h) {
  Vector logits(weights.rows());
  for (std::size_t j = 0; j < weights.rows(); ++j) {
    auto row = weights.row(j);
    logits[j] = dot(row.first(h.size()), h) + row[h.size()];
  }
  return logits;
}

Vector softmax_stable(Vector logits) {
  double max_logit = -std::numeric_limits<double>::infinity();
  for (double l : logits) max_logit = std::max(max_logit, l);
  double sum = 0.0;
  for (double& l : logits) {
    l = std::exp(l - max_logit);
    sum += l;
  }
  for (double& l : logits) l /= sum;
  return logits;
}

NodeId require_leaf(const TaxonomyTree& tree, NodeId target) {
  if (target < 0 || target >= static_cast<NodeId>(tree.num_nodes()) || !tree.is_leaf(target)) {
    throw NotALeaf("target node " + std::to_string(target) + " is not a leaf");
  }
  return target;
}

}  // namespace

HierSoftmaxParams::HierSoftmaxParams(const TaxonomyTree& tree, std::size_t h_dim_in)
    : h_dim_in_(h_dim_in) {
  weights_.reserve(tree.num_parents());
  for (NodeId parent : tree.parents()) {
    weights_.emplace_back(tree.fan_out(parent), h_dim_in + 1);
  }
}

HierSoftmaxParams HierSoftmaxParams::random_init(const TaxonomyTree& tree, std::size_t h_dim_in,
                                                 RngStream& rng) {
  HierSoftmaxParams params(tree, h_dim_in);
  for (Matrix& w : params.weights_) {
    const double bound = std::sqrt(6.0 / static_cast<double>(h_dim_in + w.rows()));
    for (std::size_t j = 0; j < w.rows(); ++j) {
      for (std::size_t k = 0; k < h_dim_in; ++k) {
        w(j, k) = rng.next_uniform(-bound, bound);
      }
      // bias column stays zero
    }
  }
  return params;
}

std::size_t HierSoftmaxParams::num_parameters() const {
  std::size_t count = 0;
  for (const Matrix& w : weights_) count += w.size();
  return count;
}

std::vector<std::span<double>> HierSoftmaxParams::param_views() {
  std::vector<std::span<double>> views;
  views.reserve(weights_.size());
  for (Matrix& w : weights_) views.push_back(w.flat());
  return views;
}

std::vector<std::span<const double>> HierSoftmaxParams::param_views() const {
  std::vector<std::span<const double>> views;
  views.reserve(weights_.size());
  for (const Matrix& w : weights_) views.push_back(w.flat());
  return views;
}

Vector conditional_probs(const HierSoftmaxParams& params, const TaxonomyTree& tree,
                         NodeId parent, const Vector& h) {
  check_binding(params, tree);
  check_hidden(params, h);
  int slot = (parent >= 0 && parent < static_cast<NodeId>(tree.num_nodes()))
                 ? tree.parent_slot(parent)
                 : -1;
  if (slot < 0) {
    throw NotAParent("node " + std::to_string(parent) + " is not a parent node");
  }
  return softmax_stable(logits_for(params.slot(slot), h));
}

Vector leaf_log_probs(const HierSoftmaxParams& params, const TaxonomyTree& tree,
                      const Vector& h) {
  check_binding(params, tree);
  check_hidden(params, h);
  // One pass: accumulate log probabilities down the tree in leaf order.
  Vector node_log_prob(tree.num_nodes(), 0.0);
  Vector result(tree.num_leaves(), 0.0);
  std::vector<NodeId> stack = {tree.root()};
  while (!stack.empty()) {
    NodeId node = stack.back();
    stack.pop_back();
    if (tree.is_leaf(node)) {
      result[tree.leaf_index(node)] = node_log_prob[node];
      continue;
    }
    Vector probs = softmax_stable(logits_for(params.slot(tree.parent_slot(node)), h));
    const auto& children = tree.children_of(node);
    for (std::size_t j = 0; j < children.size(); ++j) {
      node_log_prob[children[j]] = node_log_prob[node] + std::log(std::max(probs[j], kProbFloor));
    }
    for (auto it = children.rbegin(); it != children.rend(); ++it) stack.push_back(*it);
  }
  return result;
}

double loss(const HierSoftmaxParams& params, const TaxonomyTree& tree, const Vector& h,
            NodeId target) {
  check_binding(params, tree);
  check_hidden(params, h);
  require_leaf(tree, target);
  double total = 0.0;
  for (const auto& [parent, child] : tree.path_from_root(target)) {
    Vector probs = softmax_stable(logits_for(params.slot(tree.parent_slot(parent)), h));
    const auto& children = tree.children_of(parent);
    std::size_t child_pos = 0;
    while (children[child_pos] != child) ++child_pos;
    total -= std::log(std::max(probs[child_pos], kProbFloor));
  }
  return total;
}

PathGradients loss_gradients(const HierSoftmaxParams& params, const TaxonomyTree& tree,
                             const Vector& h, NodeId target) {
  check_binding(params, tree);
  check_hidden(params, h);
  require_leaf(tree, target);
  const std::size_t dim = params.h_dim_in();

  PathGradients grads;
  grads.d_hidden.assign(dim, 0.0);
  for (const auto& [parent, child] : tree.path_from_root(target)) {
    const Matrix& w = params.slot(tree.parent_slot(parent));
    Vector probs = softmax_stable(logits_for(w, h));
    const auto& children = tree.children_of(parent);
    std::size_t correct = 0;
    while (children[correct] != child) ++correct;

    Matrix d_w(w.rows(), w.cols());
    for (std::size_t j = 0; j < w.rows(); ++j) {
      const double coeff = probs[j] - (j == correct ? 1.0 : 0.0);
      auto d_row = d_w.row(j);
      for (std::size_t k = 0; k < dim; ++k) d_row[k] = coeff * h[k];
      d_row[dim] = coeff;  // bias sees the appended 1
      axpy(coeff, w.row(j).first(dim), grads.d_hidden);
    }
    grads.d_weights.emplace_back(parent, std::move(d_w));
  }
  return grads;
}

std::vector<std::pair<NodeId, Matrix>> grad_weights(const HierSoftmaxParams& params,
                                                    const TaxonomyTree& tree, const Vector& h,
                                                    NodeId target) {
  return loss_gradients(params, tree, h, target).d_weights;
}

Vector grad_hidden(const HierSoftmaxParams& params, const TaxonomyTree& tree, const Vector& h,
                   NodeId target) {
  return loss_gradients(params, tree, h, target).d_hidden;
}

NodeId predict(const HierSoftmaxParams& params, const TaxonomyTree& tree, const Vector& h) {
  Vector log_probs = leaf_log_probs(params, tree, h);
  std::size_t best = 0;
  for (std::size_t i = 1; i < log_probs.size(); ++i) {
    if (log_probs[i] > log_probs[best]) best = i;
  }
  return tree.leaves()[best];
}

std::size_t num_parameters(const HierSoftmaxParams& params) { return params.num_parameters(); }

GradCheckReport gradient_check(const HierSoftmaxParams& params, const TaxonomyTree& tree,
                               const Vector& h, NodeId target, double step, double tolerance) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw InvalidStep("finite-difference step must be positive, got " + std::to_string(step));
  }
  check_binding(params, tree);
  check_hidden(params, h);
  require_leaf(tree, target);

  PathGradients analytic = loss_gradients(params, tree, h, target);
  // Dense analytic weight gradients (off-path parents are zero).
  std::vector<Matrix> dense(params.num_matrices());
  for (std::size_t slot = 0; slot < params.num_matrices(); ++slot) {
    dense[slot] = Matrix(params.slot(slot).rows(), params.slot(slot).cols());
  }
  for (const auto& [parent, d_w] : analytic.d_weights) dense[tree.parent_slot(parent)] = d_w;

  GradCheckReport report;
  auto record = [&](std::string name, double analytic_value, double numeric_value) {
    GradCheckEntry entry;
    entry.parameter = std::move(name);
    entry.analytic = analytic_value;
    entry.numeric = numeric_value;
    // Central differences resolve a gradient entry to roughly 1e-10 absolute
    // in double precision, so below tolerance/1e-10 scales a relative test
    // measures rounding in the loss, not the gradient. Entries under the
    // floor are judged absolutely against the same tolerance, which still
    // flags any sign flip or dropped term bigger than the tolerance itself.
    constexpr double kScaleFloor = 1e-4;
    const double scale = std::max(std::abs(analytic_value), std::abs(numeric_value));
    entry.error = scale < kScaleFloor ? std::abs(analytic_value - numeric_value)
                                      : std::abs(analytic_value - numeric_value) / scale;
    entry.failed = entry.error > tolerance;
    report.max_error = std::max(report.max_error, entry.error);
    if (entry.failed) ++report.failures;
    report.entries.push_back(std::move(entry));
  };

  HierSoftmaxParams probe = params;
  for (std::size_t slot = 0; slot < probe.num_matrices(); ++slot) {
    Matrix& w = probe.slot(slot);
    const std::string parent_name = tree.name(tree.parents()[slot]);
    for (std::size_t j = 0; j < w.rows(); ++j) {
      for (std::size_t k = 0; k < w.cols(); ++k) {
        const double saved = w(j, k);
        w(j, k) = saved + step;
        const double up = loss(probe, tree, h, target);
        w(j, k) = saved - step;
        const double down = loss(probe, tree, h, target);
        w(j, k) = saved;
        record("w[" + parent_name + "][" + std::to_string(j) + "][" + std::to_string(k) + "]",
               dense[slot](j, k), (up - down) / (2.0 * step));
      }
    }
  }
  Vector h_probe = h;
  for (std::size_t k = 0; k < h_probe.size(); ++k) {
    const double saved = h_probe[k];
    h_probe[k] = saved + step;
    const double up = loss(params, tree, h_probe, target);
    h_probe[k] = saved - step;
    const double down = loss(params, tree, h_probe, target);
    h_probe[k] = saved;
    record("h[" + std::to_string(k) + "]", analytic.d_hidden[k], (up - down) / (2.0 * step));
  }
  return report;
}

void write_checkpoint(std::ostream& out, const TaxonomyTree& tree,
                      const HierSoftmaxParams& params) {
  io::write_magic(out, "HSXP");
  io::write_u32(out, 1);  // version
  io::write_u64(out, tree.edges().size());
  for (const auto& [parent, child] : tree.edges()) {
    io::write_string(out, parent);
    io::write_string(out, child);
  }
  io::write_u64(out, params.h_dim_in());
  io::write_u64(out, params.num_matrices());
  for (std::size_t slot = 0; slot < params.num_matrices(); ++slot) {
    io::write_matrix(out, params.slot(slot));
  }
}

std::pair<TaxonomyTree, HierSoftmaxParams> read_checkpoint(std::istream& in) {
  io::read_magic(in, "HSXP");
  if (io::read_u32(in) != 1) throw BadCheckpoint("unsupported checkpoint version");
  std::vector<std::pair<std::string, std::string>> edges(io::read_u64(in));
  for (auto& [parent, child] : edges) {
    parent = io::read_string(in);
    child = io::read_string(in);
  }
  TaxonomyTree tree = TaxonomyTree::build_from_edges(edges);
  const std::size_t h_dim_in = io::read_u64(in);
  const std::size_t count = io::read_u64(in);
  HierSoftmaxParams params(tree, h_dim_in);
  if (count != params.num_matrices()) throw BadCheckpoint("matrix count does not match tree");
  for (std::size_t slot = 0; slot < count; ++slot) {
    Matrix w = io::read_matrix(in);
    if (w.rows() != params.slot(slot).rows() || w.cols() != params.slot(slot).cols()) {
      throw BadCheckpoint("matrix shape does not match tree fan-out");
    }
    params.slot(slot) = std::move(w);
  }
  return {std::move(tree), std::move(params)};
}

void save_checkpoint(const std::string& path, const TaxonomyTree& tree,
                     const HierSoftmaxParams& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MissingFile("cannot write checkpoint: " + path);
  write_checkpoint(out, tree, params);
}

std::pair<TaxonomyTree, HierSoftmaxParams> load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFile("cannot open checkpoint: " + path);
  return read_checkpoint(in);
}

}  // namespace hiertext
