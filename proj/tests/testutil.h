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

#include <unistd.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "hiertext/hsoftmax.h"
#include "hiertext/matrix.h"
#include "hiertext/rng.h"
#include "hiertext/taxonomy.h"

namespace testutil {

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::uint64_t counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("hiertext-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

/// Random tree, depth <= max_depth, fan-out 2..max_fanout. Internal nodes
/// below the root close with probability 1/2, so shapes vary per draw.
inline hiertext::TaxonomyTree random_tree(hiertext::RngStream& rng, std::size_t max_depth,
                                          std::size_t max_fanout) {
  std::vector<std::pair<std::string, std::string>> edges;
  int next_id = 1;
  struct Item {
    std::string name;
    std::size_t depth;
  };
  std::vector<Item> frontier{{"root", 0}};
  while (!frontier.empty()) {
    const Item item = frontier.back();
    frontier.pop_back();
    std::size_t fanout = 0;
    if (item.depth == 0) {
      fanout = 2 + rng.next_index(max_fanout - 1);
    } else if (item.depth < max_depth && rng.next_bernoulli(0.5)) {
      fanout = 2 + rng.next_index(max_fanout - 1);
    }
    for (std::size_t c = 0; c < fanout; ++c) {
      std::string child = "node" + std::to_string(next_id++);
      edges.emplace_back(item.name, child);
      frontier.push_back({std::move(child), item.depth + 1});
    }
  }
  return hiertext::TaxonomyTree::build_from_edges(edges);
}

/// Leaf probabilities by explicit path-product enumeration: for every leaf,
/// walk up via parent_of, multiply plain exp/sum softmax conditionals.
inline hiertext::Vector brute_force_leaf_probs(const hiertext::HierSoftmaxParams& params,
                                               const hiertext::TaxonomyTree& tree,
                                               const hiertext::Vector& h) {
  using namespace hiertext;
  Vector probs(tree.num_leaves(), 0.0);
  for (std::size_t i = 0; i < tree.num_leaves(); ++i) {
    double p = 1.0;
    NodeId node = tree.leaves()[i];
    while (node != tree.root()) {
      const NodeId parent = tree.parent_of(node);
      const Matrix& w = params.slot(tree.parent_slot(parent));
      const auto& children = tree.children_of(parent);
      std::vector<double> logits(children.size());
      for (std::size_t j = 0; j < children.size(); ++j) {
        double z = w(j, params.h_dim_in());  // bias
        for (std::size_t d = 0; d < params.h_dim_in(); ++d) z += w(j, d) * h[d];
        logits[j] = z;
      }
      double denom = 0.0;
      for (double z : logits) denom += std::exp(z);
      std::size_t row = 0;
      while (children[row] != node) ++row;
      p *= std::exp(logits[row]) / denom;
      node = parent;
    }
    probs[i] = p;
  }
  return probs;
}

/// Central finite difference of f at x with the given step.
template <typename F>
double central_difference(F&& f, double& x, double step) {
  const double saved = x;
  x = saved + step;
  const double up = f();
  x = saved - step;
  const double down = f();
  x = saved;
  return (up - down) / (2.0 * step);
}

/// Relative error above `floor` scale, absolute below it (small entries sit
/// at the finite-difference noise floor).
inline double grad_error(double analytic, double numeric, double floor = 1e-4) {
  const double scale = std::max(std::abs(analytic), std::abs(numeric));
  const double diff = std::abs(analytic - numeric);
  return scale >= floor ? diff / scale : diff;
}

}  // namespace testutil
