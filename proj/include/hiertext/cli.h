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
#include <string>
#include <vector>

#include "hiertext/optim.h"

namespace hiertext::cli {

/// Everything the subcommands consume. Flags override a config file, which
/// overrides the defaults below; the resolved values are echoed into the
/// output directory.
struct RunConfig {
  // Input files.
  std::string train_path;
  std::string test_path;
  std::string taxonomy_path;
  std::string embeddings_path;  // optional; random init when empty
  std::string model_path;       // eval: checkpoint to load

  std::string out_dir = "out";
  std::string mode = "hierarchical";  // flat | hierarchical | both
  std::string encoder = "lstm";       // mean | lstm

  std::vector<std::size_t> h_dims = {100};  // candidate grid; first = default
  bool bidirectional = false;
  bool train_embeddings = false;
  std::size_t emb_dim = 64;  // random-init dimension when no embeddings file

  TrainConfig train;
  std::size_t num_seeds = 1;  // compare: seeds seed, seed+1, ...
  bool skip_cv = false;

  // gradcheck
  std::size_t instances = 100;
  double tolerance = 1e-6;      // output-layer checks
  double e2e_tolerance = 1e-5;  // end-to-end checks through the LSTM
  bool inject_sign_flip = false;

  // synth
  std::size_t categories = 4;
  std::size_t classes_per_category = 3;
  std::size_t examples_per_class = 50;
  std::size_t vocab_per_class = 20;
  double noise = 0.1;
};

int cmd_gradcheck(const RunConfig& config);
int cmd_synth(const RunConfig& config);
int cmd_cv(const RunConfig& config);
int cmd_train(const RunConfig& config);
int cmd_eval(const RunConfig& config);
int cmd_compare(const RunConfig& config);

/// Parses arguments and dispatches; hiertext exceptions become an error
/// message on stderr and exit code 1.
int run(int argc, const char* const* argv);

}  // namespace hiertext::cli
