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

#include "hiertext/taxonomy.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "hiertext/error.h"

namespace hiertext {

TaxonomyTree TaxonomyTree::build_from_edges(
    const std::vector<std::pair<std::string, std::string>>& edges) {
  if (edges.empty()) throw EmptyInput("taxonomy edge list is empty");

  TaxonomyTree tree;
  tree.edges_ = edges;

  auto intern = [&tree](const std::string& name) -> NodeId {
    auto it = tree.by_name_.find(name);
    if (it != tree.by_name_.end()) return it->second;
    NodeId id = static_cast<NodeId>(tree.names_.size());
    tree.names_.push_back(name);
    tree.parent_.push_back(-1);
    tree.children_.emplace_back();
    tree.by_name_.emplace(name, id);
    return id;
  };

  for (const auto& [parent_name, child_name] : edges) {
    NodeId parent = intern(parent_name);
    NodeId child = intern(child_name);
    if (tree.parent_[child] != -1) {
      throw ChildHasTwoParents("node '" + child_name + "' has two parents: '" +
                               tree.names_[tree.parent_[child]] + "' and '" + parent_name + "'");
    }
    if (parent == child) {
      throw CycleDetected("node '" + child_name + "' is its own parent");
    }
    tree.parent_[child] = parent;
    tree.children_[parent].push_back(child);
  }

  // The root is the unique node that never appeared as a child.
  std::vector<NodeId> root_candidates;
  for (NodeId node = 0; node < static_cast<NodeId>(tree.names_.size()); ++node) {
    if (tree.parent_[node] == -1) root_candidates.push_back(node);
  }
  if (root_candidates.empty()) {
    throw CycleDetected("no root: every node has a parent (edge set contains a cycle through '" +
                        tree.names_[0] + "')");
  }
  if (root_candidates.size() > 1) {
    std::string msg = "multiple roots:";
    for (NodeId node : root_candidates) msg += " '" + tree.names_[node] + "'";
    throw MultipleRoots(msg);
  }
  tree.root_ = root_candidates[0];

  // Depth-first walk from the root fixes leaf order, parent order, and
  // proves reachability. Child order is edge order, so this is deterministic.
  tree.leaf_index_.assign(tree.names_.size(), -1);
  tree.parent_slot_.assign(tree.names_.size(), -1);
  std::vector<NodeId> stack = {tree.root_};
  std::size_t visited = 0;
  while (!stack.empty()) {
    NodeId node = stack.back();
    stack.pop_back();
    ++visited;
    if (tree.children_[node].empty()) {
      tree.leaf_index_[node] = static_cast<int>(tree.leaves_.size());
      tree.leaves_.push_back(node);
    } else {
      tree.parent_slot_[node] = static_cast<int>(tree.parents_.size());
      tree.parents_.push_back(node);
      const auto& children = tree.children_[node];
      for (auto it = children.rbegin(); it != children.rend(); ++it) stack.push_back(*it);
    }
  }
  if (visited != tree.names_.size()) {
    for (NodeId node = 0; node < static_cast<NodeId>(tree.names_.size()); ++node) {
      if (tree.leaf_index_[node] == -1 && tree.parent_slot_[node] == -1) {
        throw CycleDetected("node '" + tree.names_[node] +
                            "' is not reachable from root '" + tree.names_[tree.root_] + "'");
      }
    }
  }
  if (tree.leaves_.size() < 2) {
    throw TooFewLeaves("taxonomy has " + std::to_string(tree.leaves_.size()) +
                       " leaf class(es); at least 2 are required");
  }
  return tree;
}

TaxonomyTree TaxonomyTree::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingFile("cannot open taxonomy file: " + path);
  return parse(in, path);
}

TaxonomyTree TaxonomyTree::parse(std::istream& in, const std::string& origin) {
  std::vector<std::pair<std::string, std::string>> edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size()) {
      throw MalformedLine(origin + ":" + std::to_string(line_no) +
                          ": expected 'parent<TAB>child', got '" + line + "'");
    }
    edges.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return build_from_edges(edges);
}

std::optional<NodeId> TaxonomyTree::find(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::pair<NodeId, NodeId>> TaxonomyTree::path_from_root(NodeId leaf) const {
  if (leaf < 0 || leaf >= static_cast<NodeId>(names_.size()) || !is_leaf(leaf)) {
    throw NotALeaf("node " + (leaf >= 0 && leaf < static_cast<NodeId>(names_.size())
                                  ? "'" + names_[leaf] + "'"
                                  : std::to_string(leaf)) +
                   " is not a leaf");
  }
  std::vector<std::pair<NodeId, NodeId>> path;
  for (NodeId node = leaf; node != root_; node = parent_[node]) {
    path.emplace_back(parent_[node], node);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

TaxonomyTree TaxonomyTree::flat_view() const {
  std::vector<std::pair<std::string, std::string>> edges;
  edges.reserve(leaves_.size());
  for (NodeId leaf : leaves_) edges.emplace_back(names_[root_], names_[leaf]);
  return build_from_edges(edges);
}

}  // namespace hiertext
