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
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hiertext/matrix.h"
#include "hiertext/rng.h"
#include "hiertext/taxonomy.h"

namespace hiertext {

/// Hierarchical softmax output layer.
///
/// The probability of a leaf class is the product of per-node softmax
/// conditionals along the root-to-leaf path. Every parent node p carries one
/// weight matrix of shape J_p x (h_dim_in + 1): row j scores the j-th child
/// in tree order, and the last column is the bias. Callers pass the hidden
/// state h of length h_dim_in; the constant 1 that multiplies the bias is
/// appended internally and receives no gradient.

/// Per-parent weight matrices, indexed by the tree's parent slot order.
class HierSoftmaxParams {
 public:
  HierSoftmaxParams() = default;

  /// Zero-initialized parameters bound to the shape of `tree`.
  HierSoftmaxParams(const TaxonomyTree& tree, std::size_t h_dim_in);

  /// Weights uniform in [-a, a] with a = sqrt(6 / (h_dim_in + J_p)) per
  /// parent; biases zero.
  static HierSoftmaxParams random_init(const TaxonomyTree& tree, std::size_t h_dim_in,
                                       RngStream& rng);

  std::size_t h_dim_in() const { return h_dim_in_; }
  std::size_t num_matrices() const { return weights_.size(); }
  Matrix& slot(std::size_t parent_slot) { return weights_[parent_slot]; }
  const Matrix& slot(std::size_t parent_slot) const { return weights_[parent_slot]; }

  /// Total scalar parameter count: sum over parents of J_p * (h_dim_in + 1).
  std::size_t num_parameters() const;

  std::vector<std::span<double>> param_views();
  std::vector<std::span<const double>> param_views() const;

 private:
  std::size_t h_dim_in_ = 0;
  std::vector<Matrix> weights_;
};

/// Gradients of one example's cross-entropy loss. d_weights has one entry per
/// parent on the root-to-target path, in path order; gradients for off-path
/// parents are identically zero and therefore omitted. d_hidden has length
/// h_dim_in (the bias input receives no gradient).
struct PathGradients {
  std::vector<std::pair<NodeId, Matrix>> d_weights;
  Vector d_hidden;
};

/// Softmax over the children of `parent`, computed with max-logit
/// subtraction. Entries sum to 1.
Vector conditional_probs(const HierSoftmaxParams& params, const TaxonomyTree& tree,
                         NodeId parent, const Vector& h);

/// log P(leaf) for every leaf, in tree leaf order. Each entry is the sum of
/// log conditionals along the leaf's path; exp of the entries sums to 1.
Vector leaf_log_probs(const HierSoftmaxParams& params, const TaxonomyTree& tree,
                      const Vector& h);

/// Cross-entropy loss of one example: minus the log path probability of the
/// target leaf. Conditionals are floored at 1e-300 before the log, so the
/// result is always finite.
double loss(const HierSoftmaxParams& params, const TaxonomyTree& tree, const Vector& h,
            NodeId target);

/// Both gradient blocks in one pass over the target's path.
PathGradients loss_gradients(const HierSoftmaxParams& params, const TaxonomyTree& tree,
                             const Vector& h, NodeId target);

/// For each on-path parent p, row j of the entry is (P(j|p) - [j is the
/// correct child]) * [h; 1].
std::vector<std::pair<NodeId, Matrix>> grad_weights(const HierSoftmaxParams& params,
                                                    const TaxonomyTree& tree, const Vector& h,
                                                    NodeId target);

/// Sum over on-path parents q and their children j of
/// (P(j|q) - [j is the correct child]) * w_qj, bias column excluded.
Vector grad_hidden(const HierSoftmaxParams& params, const TaxonomyTree& tree, const Vector& h,
                   NodeId target);

/// Exact global argmax over leaf probabilities (not greedy top-down descent);
/// ties break toward the lowest leaf index.
NodeId predict(const HierSoftmaxParams& params, const TaxonomyTree& tree, const Vector& h);

std::size_t num_parameters(const HierSoftmaxParams& params);

struct GradCheckEntry {
  std::string parameter;  // e.g. "w[music][2][5]" or "h[3]"
  double analytic = 0.0;
  double numeric = 0.0;
  double error = 0.0;  // relative where the scale allows, absolute near zero
  bool failed = false;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double max_error = 0.0;
  std::size_t failures = 0;
  bool passed() const { return failures == 0; }
};

/// Central-difference check of grad_weights and grad_hidden over every weight
/// entry and hidden component. Uses relative error |a - n| / max(|a|, |n|)
/// when that scale is at least 1e-4, absolute error below it (smaller
/// entries sit at the finite-difference noise floor, where the absolute
/// test against the same tolerance is the meaningful one).
GradCheckReport gradient_check(const HierSoftmaxParams& params, const TaxonomyTree& tree,
                               const Vector& h, NodeId target, double step,
                               double tolerance = 1e-6);

/// Checkpoint container: tree name-edges, h_dim_in, and the per-parent
/// matrices in row-major child order. Round trips are bit-exact.
void save_checkpoint(const std::string& path, const TaxonomyTree& tree,
                     const HierSoftmaxParams& params);
std::pair<TaxonomyTree, HierSoftmaxParams> load_checkpoint(const std::string& path);
void write_checkpoint(std::ostream& out, const TaxonomyTree& tree,
                      const HierSoftmaxParams& params);
std::pair<TaxonomyTree, HierSoftmaxParams> read_checkpoint(std::istream& in);

}  // namespace hiertext
