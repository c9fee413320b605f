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

#include "hiertext/encoder.h"
#include "hiertext/taxonomy.h"

namespace hiertext {

inline constexpr const char* kUnkToken = "<unk>";

/// Lowercases, splits punctuation characters into standalone tokens, then
/// splits on whitespace. Never returns empty tokens.
std::vector<std::string> tokenize(const std::string& text);

struct Example {
  std::vector<std::string> tokens;  // non-empty
  std::string label;                // taxonomy leaf name
};

struct Dataset {
  std::vector<Example> train;
  std::vector<Example> test;
  TaxonomyTree taxonomy;
  std::vector<std::string> vocab;  // from train only; kUnkToken first
};

/// Unique train tokens in first-appearance order, kUnkToken prepended.
std::vector<std::string> build_vocab(const std::vector<Example>& train);

/// Reads one `label<TAB>raw text` file (UTF-8, one example per line).
/// Labels must resolve to taxonomy leaves; documents must tokenize to at
/// least one token. Errors carry path and line number.
std::vector<Example> load_labeled_file(const std::string& path, const TaxonomyTree& taxonomy);

/// Reads train and test corpus files plus a `parent<TAB>child` taxonomy
/// file. Split sizes go to stderr.
Dataset load_corpus(const std::string& train_path, const std::string& test_path,
                    const std::string& taxonomy_path);

/// Reads word vectors in GloVe text format (`token v1 v2 ... vD`, space
/// separated). The dimension is fixed by the first line; a line with a
/// different value count raises DimensionMismatch. Lines whose numbers fail
/// to parse are skipped with a warning count. Rows for vocab tokens absent
/// from the file (including kUnkToken) stay zero; the coverage ratio goes to
/// stderr. The returned table is frozen; flip `trainable` to fine-tune.
EmbeddingTable load_embeddings(const std::string& path, const std::vector<std::string>& vocab);

/// Synthetic two-level corpus: each category owns a disjoint token pool,
/// each class a disjoint sub-pool of `vocab_per_class` tokens. Documents
/// draw each token from the global pool with probability `noise`, otherwise
/// from their class pool. Train gets `examples_per_class` documents per
/// class, test gets max(1, examples_per_class / 5). Same seed, same corpus.
Dataset synth_hierarchical(std::size_t categories, std::size_t classes_per_category,
                           std::size_t examples_per_class, std::size_t vocab_per_class,
                           double noise, std::uint64_t seed);

}  // namespace hiertext
