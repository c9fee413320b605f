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
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace hiertext {

using NodeId = std::int32_t;

/// Rooted class taxonomy. Leaves are the target classes, internal nodes are
/// categories, and the set of parent nodes carries one softmax each in the
/// hierarchical output layer. Immutable after construction; safe to share
/// read-only across threads.
///
/// Node ids are contiguous 0..N-1 in first-appearance order of the source
/// edge list; names are unique, case-sensitive strings. Child lists keep the
/// edge order of the source, which fixes the softmax row <-> child binding
/// across runs.
class TaxonomyTree {
 public:
  TaxonomyTree() = default;

  /// Builds and validates a tree from (parent name, child name) edges.
  static TaxonomyTree build_from_edges(
      const std::vector<std::pair<std::string, std::string>>& edges);

  /// Reads the one-edge-per-line `parent<TAB>child` format. `#` comments and
  /// blank lines are ignored. The root is the unique parent that never
  /// appears as a child.
  static TaxonomyTree load(const std::string& path);
  static TaxonomyTree parse(std::istream& in, const std::string& origin = "<stream>");

  std::size_t num_nodes() const { return names_.size(); }
  NodeId root() const { return root_; }
  const std::string& name(NodeId node) const { return names_[node]; }
  std::optional<NodeId> find(const std::string& name) const;

  bool is_leaf(NodeId node) const { return children_[node].empty(); }
  bool is_parent(NodeId node) const { return !children_[node].empty(); }
  /// Parent of a non-root node; -1 for the root.
  NodeId parent_of(NodeId node) const { return parent_[node]; }
  const std::vector<NodeId>& children_of(NodeId node) const { return children_[node]; }
  /// J_p: number of children of a parent node.
  std::size_t fan_out(NodeId parent) const { return children_[parent].size(); }

  /// Leaves in depth-first order; positions here define the class index used
  /// by metrics and by leaf_log_probs.
  const std::vector<NodeId>& leaves() const { return leaves_; }
  /// Parent nodes in depth-first order (root first).
  const std::vector<NodeId>& parents() const { return parents_; }
  std::size_t num_leaves() const { return leaves_.size(); }    // C
  std::size_t num_parents() const { return parents_.size(); }  // P

  /// Position of a leaf in leaves(); -1 if the node is not a leaf.
  int leaf_index(NodeId node) const { return leaf_index_[node]; }
  /// Position of a parent in parents(); -1 if the node is a leaf.
  int parent_slot(NodeId node) const { return parent_slot_[node]; }

  /// Root-to-leaf path as (parent, child) pairs: the first parent is the
  /// root, each child is the next pair's parent, the last child is the leaf.
  std::vector<std::pair<NodeId, NodeId>> path_from_root(NodeId leaf) const;

  /// Depth-1 tree with the same root name and the same leaves in the same
  /// order. Idempotent.
  TaxonomyTree flat_view() const;

  /// The edges this tree was built from, in source order.
  const std::vector<std::pair<std::string, std::string>>& edges() const { return edges_; }

 private:
  std::vector<std::string> names_;
  std::vector<NodeId> parent_;
  std::vector<std::vector<NodeId>> children_;
  std::vector<NodeId> leaves_;
  std::vector<NodeId> parents_;
  std::vector<int> leaf_index_;
  std::vector<int> parent_slot_;
  std::unordered_map<std::string, NodeId> by_name_;
  std::vector<std::pair<std::string, std::string>> edges_;
  NodeId root_ = -1;
};

}  // namespace hiertext
