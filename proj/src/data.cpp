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

#include "hiertext/data.h"

#include <cctype>
#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_set>

#include "hiertext/error.h"
#include "hiertext/rng.h"

namespace hiertext {

std::vector<Example> load_labeled_file(const std::string& path, const TaxonomyTree& taxonomy) {
  std::ifstream in(path);
  if (!in) throw MissingFile(path);
  std::vector<Example> examples;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = path + ":" + std::to_string(line_no);
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) throw MalformedLine(where + ": expected label<TAB>text");
    Example example;
    example.label = line.substr(0, tab);
    const auto node = taxonomy.find(example.label);
    if (!node || !taxonomy.is_leaf(*node))
      throw UnknownLabel(where + ": " + example.label + " is not a taxonomy leaf");
    example.tokens = tokenize(line.substr(tab + 1));
    if (example.tokens.empty()) throw MalformedLine(where + ": document is empty");
    examples.push_back(std::move(example));
  }
  return examples;
}

std::vector<std::string> tokenize(const std::string& text) {
  std::string spaced;
  spaced.reserve(text.size() * 2);
  for (char raw : text) {
    const auto c = static_cast<unsigned char>(raw);
    if (std::ispunct(c)) {
      spaced += ' ';
      spaced += raw;
      spaced += ' ';
    } else {
      spaced += static_cast<char>(std::tolower(c));
    }
  }
  std::istringstream stream(spaced);
  std::vector<std::string> tokens;
  std::string token;
  while (stream >> token) tokens.push_back(token);
  return tokens;
}

std::vector<std::string> build_vocab(const std::vector<Example>& train) {
  std::vector<std::string> vocab{kUnkToken};
  std::unordered_set<std::string> seen{kUnkToken};
  for (const Example& example : train)
    for (const std::string& token : example.tokens)
      if (seen.insert(token).second) vocab.push_back(token);
  return vocab;
}

Dataset load_corpus(const std::string& train_path, const std::string& test_path,
                    const std::string& taxonomy_path) {
  Dataset dataset;
  dataset.taxonomy = TaxonomyTree::load(taxonomy_path);
  dataset.train = load_labeled_file(train_path, dataset.taxonomy);
  dataset.test = load_labeled_file(test_path, dataset.taxonomy);
  dataset.vocab = build_vocab(dataset.train);
  std::cerr << "loaded corpus: train " << dataset.train.size() << ", test " << dataset.test.size()
            << ", leaves " << dataset.taxonomy.num_leaves() << ", parents "
            << dataset.taxonomy.num_parents() << ", vocab " << dataset.vocab.size() << "\n";
  return dataset;
}

EmbeddingTable load_embeddings(const std::string& path, const std::vector<std::string>& vocab) {
  std::ifstream in(path);
  if (!in) throw MissingFile(path);

  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  std::size_t skipped = 0;
  std::size_t covered = 0;
  EmbeddingTable table;
  std::vector<bool> filled;

  std::vector<std::string> fields;
  while (std::getline(in, line)) {
    ++line_no;
    fields.clear();
    std::istringstream stream(line);
    std::string field;
    while (stream >> field) fields.push_back(std::move(field));
    if (fields.empty()) continue;
    if (dim == 0) {
      if (fields.size() < 2) throw DimensionMismatch(path + ":1: no vector components");
      dim = fields.size() - 1;
      table = EmbeddingTable::zeros(vocab, dim, kUnkToken);
      filled.assign(table.size(), false);
    }
    if (fields.size() - 1 != dim) {
      throw DimensionMismatch(path + ":" + std::to_string(line_no) + ": expected " +
                              std::to_string(dim) + " values, found " +
                              std::to_string(fields.size() - 1));
    }
    const auto it = table.vocab.find(fields[0]);
    if (it == table.vocab.end() || it->second == table.unk_row || filled[it->second]) continue;

    Vector row(dim);
    bool ok = true;
    for (std::size_t d = 0; d < dim && ok; ++d) {
      const std::string& v = fields[d + 1];
      const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), row[d]);
      ok = ec == std::errc() && end == v.data() + v.size();
    }
    if (!ok) {
      ++skipped;
      continue;
    }
    std::copy(row.begin(), row.end(), table.table.row(it->second).begin());
    filled[it->second] = true;
    ++covered;
  }
  if (dim == 0) throw DimensionMismatch(path + ": file has no vectors");
  if (skipped > 0) std::cerr << "warning: skipped " << skipped << " malformed embedding lines\n";
  const std::size_t in_vocab = vocab.size() - 1;  // UNK never counts
  std::cerr << "embedding coverage: " << covered << "/" << in_vocab << " vocab tokens ("
            << (in_vocab > 0 ? 100.0 * static_cast<double>(covered) / static_cast<double>(in_vocab)
                             : 0.0)
            << "%), dim " << dim << "\n";
  return table;
}

Dataset synth_hierarchical(std::size_t categories, std::size_t classes_per_category,
                           std::size_t examples_per_class, std::size_t vocab_per_class,
                           double noise, std::uint64_t seed) {
  if (!(noise >= 0.0 && noise < 1.0)) throw InvalidRate("noise must be in [0, 1)");
  if (categories < 1 || classes_per_category < 1 || examples_per_class < 1 || vocab_per_class < 1)
    throw ConfigError("synth_hierarchical counts must all be >= 1");

  std::vector<std::pair<std::string, std::string>> edges;
  std::vector<std::vector<std::string>> class_pool;  // per leaf, in leaf order
  std::vector<std::string> global_pool;
  std::vector<std::string> leaf_names;
  for (std::size_t c = 0; c < categories; ++c) {
    const std::string category = "cat" + std::to_string(c);
    edges.emplace_back("root", category);
    for (std::size_t k = 0; k < classes_per_category; ++k) {
      const std::string leaf = category + "cls" + std::to_string(k);
      edges.emplace_back(category, leaf);
      leaf_names.push_back(leaf);
      // Purely alphanumeric tokens survive a write/tokenize round trip.
      std::vector<std::string> pool;
      for (std::size_t w = 0; w < vocab_per_class; ++w) {
        pool.push_back(leaf + "t" + std::to_string(w));
        global_pool.push_back(pool.back());
      }
      class_pool.push_back(std::move(pool));
    }
  }

  Dataset dataset;
  dataset.taxonomy = TaxonomyTree::build_from_edges(edges);

  RngStream rng(derive_seed(seed, "synth"));
  constexpr std::size_t kMinLen = 10, kMaxLen = 30;
  auto make_doc = [&](std::size_t leaf) {
    Example example;
    example.label = leaf_names[leaf];
    const std::size_t len = kMinLen + rng.next_index(kMaxLen - kMinLen + 1);
    example.tokens.reserve(len);
    for (std::size_t t = 0; t < len; ++t) {
      const auto& pool = rng.next_bernoulli(noise) ? global_pool : class_pool[leaf];
      example.tokens.push_back(pool[rng.next_index(pool.size())]);
    }
    return example;
  };

  const std::size_t test_per_class = std::max<std::size_t>(1, examples_per_class / 5);
  for (std::size_t leaf = 0; leaf < leaf_names.size(); ++leaf)
    for (std::size_t i = 0; i < examples_per_class; ++i) dataset.train.push_back(make_doc(leaf));
  for (std::size_t leaf = 0; leaf < leaf_names.size(); ++leaf)
    for (std::size_t i = 0; i < test_per_class; ++i) dataset.test.push_back(make_doc(leaf));

  dataset.vocab = build_vocab(dataset.train);
  return dataset;
}

}  // namespace hiertext
