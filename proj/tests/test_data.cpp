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

#include <algorithm>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "hiertext/error.h"
#include "testutil.h"

using namespace hiertext;

namespace {

const char* kTaxonomy = "root\tpos\nroot\tneg\n";

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("data") {

TEST_CASE("tokenize lowercases and isolates punctuation") {
  CHECK(tokenize("Hello, World!") ==
        std::vector<std::string>{"hello", ",", "world", "!"});
  CHECK(tokenize("what's up?") == std::vector<std::string>{"what", "'", "s", "up", "?"});
  CHECK(tokenize("  spaced\tout\nlines ") == std::vector<std::string>{"spaced", "out", "lines"});
  CHECK(tokenize("U.S.A.") == std::vector<std::string>{"u", ".", "s", ".", "a", "."});
  CHECK(tokenize("").empty());
  CHECK(tokenize("   ").empty());
}

TEST_CASE("vocabulary keeps first-appearance order behind unk") {
  const std::vector<Example> train = {
      {{"b", "a"}, "pos"},
      {{"a", "c", "b"}, "neg"},
  };
  const std::vector<std::string> vocab = build_vocab(train);
  CHECK(vocab == std::vector<std::string>{kUnkToken, "b", "a", "c"});
}

TEST_CASE("labeled files parse into examples") {
  testutil::TempDir dir;
  const std::string tax_path = dir.file("tax.txt");
  testutil::write_file(tax_path, kTaxonomy);
  const TaxonomyTree taxonomy = TaxonomyTree::load(tax_path);

  const std::string path = dir.file("train.tsv");
  testutil::write_file(path, "pos\tGreat movie!\nneg\tterrible, avoid\n");
  const std::vector<Example> examples = load_labeled_file(path, taxonomy);
  REQUIRE(examples.size() == 2);
  CHECK(examples[0].label == "pos");
  CHECK(examples[0].tokens == std::vector<std::string>{"great", "movie", "!"});
  CHECK(examples[1].tokens == std::vector<std::string>{"terrible", ",", "avoid"});
}

TEST_CASE("labeled-file errors carry the path and line number") {
  testutil::TempDir dir;
  const std::string tax_path = dir.file("tax.txt");
  testutil::write_file(tax_path, kTaxonomy);
  const TaxonomyTree taxonomy = TaxonomyTree::load(tax_path);

  CHECK_THROWS_AS(load_labeled_file(dir.file("absent.tsv"), taxonomy), MissingFile);

  const std::string no_tab = dir.file("no_tab.tsv");
  testutil::write_file(no_tab, "pos\tfine text\nneg missing tab\n");
  CHECK_THROWS_AS(load_labeled_file(no_tab, taxonomy), MalformedLine);
  CHECK(message_of([&] { load_labeled_file(no_tab, taxonomy); })
            .find(no_tab + ":2") != std::string::npos);

  const std::string unknown = dir.file("unknown.tsv");
  testutil::write_file(unknown, "pos\tok\nneutral\thmm\n");
  CHECK_THROWS_AS(load_labeled_file(unknown, taxonomy), UnknownLabel);
  const std::string what = message_of([&] { load_labeled_file(unknown, taxonomy); });
  CHECK(what.find(":2") != std::string::npos);
  CHECK(what.find("neutral is not a taxonomy leaf") != std::string::npos);

  const std::string empty_doc = dir.file("empty_doc.tsv");
  testutil::write_file(empty_doc, "pos\t   \n");
  CHECK_THROWS_AS(load_labeled_file(empty_doc, taxonomy), MalformedLine);
  CHECK(message_of([&] { load_labeled_file(empty_doc, taxonomy); })
            .find("document is empty") != std::string::npos);

  // Internal nodes are not valid labels.
  const std::string internal = dir.file("internal.tsv");
  testutil::write_file(internal, "root\ttext here\n");
  CHECK_THROWS_AS(load_labeled_file(internal, taxonomy), UnknownLabel);
}

TEST_CASE("load_corpus wires taxonomy, splits, and vocabulary together") {
  testutil::TempDir dir;
  testutil::write_file(dir.file("tax.txt"), kTaxonomy);
  testutil::write_file(dir.file("train.tsv"), "pos\talpha beta\nneg\tgamma alpha\n");
  testutil::write_file(dir.file("test.tsv"), "neg\tdelta beta\n");
  const Dataset dataset =
      load_corpus(dir.file("train.tsv"), dir.file("test.tsv"), dir.file("tax.txt"));
  CHECK(dataset.train.size() == 2);
  CHECK(dataset.test.size() == 1);
  CHECK(dataset.taxonomy.num_leaves() == 2);
  // Vocab comes from train only: "delta" is test-only and excluded.
  CHECK(dataset.vocab == std::vector<std::string>{kUnkToken, "alpha", "beta", "gamma"});
}

TEST_CASE("embeddings load in glove text format") {
  testutil::TempDir dir;
  const std::string path = dir.file("vectors.txt");
  testutil::write_file(path,
                       "alpha 0.25 -1.5 3.0\n"
                       "gamma 1.0 2.0 4.5\n"
                       "extra 9.0 9.0 9.0\n");
  const std::vector<std::string> vocab = {kUnkToken, "alpha", "beta", "gamma"};
  const EmbeddingTable table = load_embeddings(path, vocab);
  CHECK(table.dim() == 3);
  CHECK(table.size() == 4);
  CHECK(!table.trainable);

  CHECK(table.table(table.row_for("alpha"), 0) == 0.25);
  CHECK(table.table(table.row_for("alpha"), 1) == -1.5);
  CHECK(table.table(table.row_for("gamma"), 2) == 4.5);
  // "beta" is uncovered and stays zero; "extra" is out of vocab and ignored.
  for (std::size_t d = 0; d < 3; ++d) CHECK(table.table(table.row_for("beta"), d) == 0.0);
  for (std::size_t d = 0; d < 3; ++d) CHECK(table.table(table.unk_row, d) == 0.0);
}

TEST_CASE("the first vector wins when a token repeats") {
  testutil::TempDir dir;
  const std::string path = dir.file("vectors.txt");
  testutil::write_file(path, "alpha 1.0 2.0\nalpha 9.0 9.0\n");
  const EmbeddingTable table = load_embeddings(path, {kUnkToken, "alpha"});
  CHECK(table.table(table.row_for("alpha"), 0) == 1.0);
  CHECK(table.table(table.row_for("alpha"), 1) == 2.0);
}

TEST_CASE("a wrong-width vector line names its location") {
  testutil::TempDir dir;
  const std::string path = dir.file("vectors.txt");
  testutil::write_file(path,
                       "alpha 1.0 2.0 3.0\n"
                       "beta 1.0 2.0\n");
  CHECK_THROWS_AS(load_embeddings(path, {kUnkToken, "alpha", "beta"}), DimensionMismatch);
  const std::string what =
      message_of([&] { load_embeddings(path, {kUnkToken, "alpha", "beta"}); });
  CHECK(what.find(path + ":2") != std::string::npos);
  CHECK(what.find("expected 3 values, found 2") != std::string::npos);
}

TEST_CASE("unparsable numbers skip the line instead of failing the load") {
  testutil::TempDir dir;
  const std::string path = dir.file("vectors.txt");
  testutil::write_file(path,
                       "alpha 1.0 2.0\n"
                       "beta 3.0 oops\n"
                       "gamma 5.0 6.0\n");
  const EmbeddingTable table = load_embeddings(path, {kUnkToken, "alpha", "beta", "gamma"});
  CHECK(table.table(table.row_for("beta"), 0) == 0.0);  // skipped, stays zero
  CHECK(table.table(table.row_for("gamma"), 1) == 6.0);
}

TEST_CASE("embedding loader rejects unusable files") {
  testutil::TempDir dir;
  CHECK_THROWS_AS(load_embeddings(dir.file("absent.txt"), {kUnkToken}), MissingFile);
  const std::string empty = dir.file("empty.txt");
  testutil::write_file(empty, "\n\n");
  CHECK_THROWS_AS(load_embeddings(empty, {kUnkToken}), DimensionMismatch);
  const std::string token_only = dir.file("token_only.txt");
  testutil::write_file(token_only, "alpha\n");
  CHECK_THROWS_AS(load_embeddings(token_only, {kUnkToken, "alpha"}), DimensionMismatch);
}

TEST_CASE("the synthetic corpus has the advertised shape") {
  const Dataset dataset = synth_hierarchical(4, 3, 50, 20, 0.1, 7);
  CHECK(dataset.taxonomy.num_leaves() == 12);   // C = 4 * 3
  CHECK(dataset.taxonomy.num_parents() == 5);   // root + 4 categories
  CHECK(dataset.train.size() == 600);           // 12 classes * 50
  CHECK(dataset.test.size() == 120);            // max(1, 50 / 5) per class

  std::set<std::string> labels;
  for (const Example& example : dataset.train) {
    labels.insert(example.label);
    CHECK(!example.tokens.empty());
    CHECK(example.tokens.size() >= 10);
    CHECK(example.tokens.size() <= 30);
    const auto node = dataset.taxonomy.find(example.label);
    REQUIRE(node.has_value());
    CHECK(dataset.taxonomy.is_leaf(*node));
  }
  CHECK(labels.size() == 12);
  CHECK(dataset.vocab.front() == kUnkToken);

  // Tiny per-class counts still produce at least one test document.
  const Dataset tiny = synth_hierarchical(2, 2, 3, 4, 0.0, 1);
  CHECK(tiny.train.size() == 12);
  CHECK(tiny.test.size() == 4);
}

TEST_CASE("the synthetic corpus is seed-deterministic") {
  const Dataset a = synth_hierarchical(2, 3, 5, 6, 0.2, 11);
  const Dataset b = synth_hierarchical(2, 3, 5, 6, 0.2, 11);
  REQUIRE(a.train.size() == b.train.size());
  for (std::size_t i = 0; i < a.train.size(); ++i) {
    CHECK(a.train[i].tokens == b.train[i].tokens);
    CHECK(a.train[i].label == b.train[i].label);
  }
  const Dataset c = synth_hierarchical(2, 3, 5, 6, 0.2, 12);
  bool any_difference = c.train.size() != a.train.size();
  for (std::size_t i = 0; !any_difference && i < a.train.size(); ++i) {
    any_difference = a.train[i].tokens != c.train[i].tokens;
  }
  CHECK(any_difference);
}

TEST_CASE("synthetic tokens survive a file round trip") {
  // Tokens must be purely alphanumeric or the tokenizer would split them.
  const Dataset dataset = synth_hierarchical(2, 2, 4, 5, 0.3, 13);
  for (const Example& example : dataset.train) {
    for (const std::string& token : example.tokens) {
      const std::vector<std::string> again = tokenize(token);
      REQUIRE(again.size() == 1);
      CHECK(again[0] == token);
    }
  }
}

TEST_CASE("zero noise keeps documents inside their class pool") {
  const Dataset dataset = synth_hierarchical(2, 2, 6, 5, 0.0, 14);
  for (const Example& example : dataset.train) {
    for (const std::string& token : example.tokens) {
      CHECK(token.rfind(example.label, 0) == 0);  // token starts with its class name
    }
  }
}

TEST_CASE("synthetic corpus validates its configuration") {
  CHECK_THROWS_AS(synth_hierarchical(0, 3, 5, 5, 0.1, 1), ConfigError);
  CHECK_THROWS_AS(synth_hierarchical(2, 0, 5, 5, 0.1, 1), ConfigError);
  CHECK_THROWS_AS(synth_hierarchical(2, 3, 0, 5, 0.1, 1), ConfigError);
  CHECK_THROWS_AS(synth_hierarchical(2, 3, 5, 0, 0.1, 1), ConfigError);
  CHECK_THROWS_AS(synth_hierarchical(2, 3, 5, 5, 1.0, 1), InvalidRate);
  CHECK_THROWS_AS(synth_hierarchical(2, 3, 5, 5, -0.1, 1), InvalidRate);
}

}  // TEST_SUITE
