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

#include "hiertext/model.h"

#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "doctest.h"
#include "hiertext/data.h"
#include "hiertext/error.h"
#include "hiertext/rng.h"
#include "testutil.h"

using namespace hiertext;

namespace {

TaxonomyTree small_tree() {
  return TaxonomyTree::build_from_edges(
      {{"root", "animals"}, {"root", "plants"},
       {"animals", "cat"}, {"animals", "dog"}, {"plants", "oak"}});
}

EmbeddingTable small_table(std::size_t dim, std::uint64_t seed, bool trainable = false) {
  std::vector<std::string> vocab = {kUnkToken};
  for (int i = 0; i < 7; ++i) vocab.push_back("tok" + std::to_string(i));
  RngStream rng(seed, "embedding_init");
  EmbeddingTable table = EmbeddingTable::random_init(vocab, dim, kUnkToken, rng);
  table.trainable = trainable;
  return table;
}

bool views_equal(const std::vector<std::span<const double>>& a,
                 const std::vector<std::span<const double>>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t v = 0; v < a.size(); ++v) {
    if (a[v].size() != b[v].size()) return false;
    for (std::size_t i = 0; i < a[v].size(); ++i) {
      if (a[v][i] != b[v][i]) return false;
    }
  }
  return true;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("same seed builds bit-identical models") {
  const ModelConfig config{EncoderKind::kLstm, 5, true, false};
  const TextClassifier a(small_tree(), small_table(4, 1), config, 42);
  const TextClassifier b(small_tree(), small_table(4, 1), config, 42);
  CHECK(views_equal(a.trainable_views(), b.trainable_views()));

  const TextClassifier c(small_tree(), small_table(4, 1), config, 43);
  CHECK(!views_equal(a.trainable_views(), c.trainable_views()));
}

TEST_CASE("output layer width follows the encoder") {
  const EmbeddingTable table = small_table(6, 2);
  const TextClassifier mean(small_tree(), table, {EncoderKind::kMeanPool, 0, false, false}, 1);
  CHECK(mean.h_dim_in() == 6);
  const TextClassifier uni(small_tree(), table, {EncoderKind::kLstm, 8, false, false}, 1);
  CHECK(uni.h_dim_in() == 8);
  const TextClassifier bi(small_tree(), table, {EncoderKind::kLstm, 8, true, false}, 1);
  CHECK(bi.h_dim_in() == 16);
}

TEST_CASE("num_parameters composes the trainable blocks") {
  const std::size_t dim = 4, h_dim = 3;
  const EmbeddingTable table = small_table(dim, 3);
  const TaxonomyTree tree = small_tree();

  const TextClassifier frozen(tree, table, {EncoderKind::kLstm, h_dim, false, false}, 1);
  // Four gates of h_dim x (dim + h_dim) plus four bias vectors.
  const std::size_t lstm = 4 * (h_dim * (dim + h_dim)) + 4 * h_dim;
  const std::size_t output = frozen.output().num_parameters();
  CHECK(frozen.num_parameters() == output + lstm);

  EmbeddingTable trainable_table = small_table(dim, 3, true);
  const TextClassifier tuned(tree, trainable_table, {EncoderKind::kLstm, h_dim, false, true}, 1);
  CHECK(tuned.num_parameters() ==
        tuned.output().num_parameters() + lstm + trainable_table.table.size());

  // The gradient accumulator mirrors the trainable views one for one.
  ModelGradients grads = tuned.make_gradients();
  const auto params = tuned.trainable_views();
  const auto grad_views = std::as_const(grads).views();
  REQUIRE(params.size() == grad_views.size());
  for (std::size_t v = 0; v < params.size(); ++v) {
    CHECK(params[v].size() == grad_views[v].size());
  }
}

TEST_CASE("labels resolve to leaves and unknown tokens hit the unk row") {
  const TextClassifier model(small_tree(), small_table(4, 4),
                             {EncoderKind::kMeanPool, 0, false, false}, 1);
  CHECK(model.tree().name(model.leaf_for_label("dog")) == "dog");
  CHECK_THROWS_AS(model.leaf_for_label("animals"), UnknownLabel);  // internal node
  CHECK_THROWS_AS(model.leaf_for_label("missing"), UnknownLabel);

  const std::vector<int> rows = model.rows_for_tokens({"tok0", "never", "tok3"});
  REQUIRE(rows.size() == 3);
  CHECK(rows[1] == model.embeddings().unk_row);
  CHECK(rows[0] != rows[1]);
}

TEST_CASE("predict agrees with the reported leaf log probabilities") {
  const TextClassifier model(small_tree(), small_table(4, 5),
                             {EncoderKind::kLstm, 4, false, false}, 7);
  const std::vector<std::string> tokens = {"tok1", "tok2", "tok0"};
  const Vector log_probs = model.leaf_log_probs_for(tokens);
  std::size_t best = 0;
  for (std::size_t i = 1; i < log_probs.size(); ++i) {
    if (log_probs[i] > log_probs[best]) best = i;
  }
  CHECK(model.predict(tokens) == model.tree().leaves()[best]);
  CHECK(model.example_loss(tokens, model.tree().leaves()[best]) ==
        doctest::Approx(-log_probs[best]).epsilon(1e-12));
}

TEST_CASE("forward_backward gradients match finite differences end to end") {
  RngStream rng(6, "cases");
  const double step = 3e-5;
  for (int trial = 0; trial < 8; ++trial) {
    const std::size_t dim = 2 + rng.next_index(3);
    const std::size_t h_dim = 2 + rng.next_index(3);
    const bool bidirectional = rng.next_bernoulli(0.5);
    const bool mean_pool = rng.next_bernoulli(0.25);
    const ModelConfig config{mean_pool ? EncoderKind::kMeanPool : EncoderKind::kLstm, h_dim,
                             bidirectional, true};
    TextClassifier model(small_tree(), small_table(dim, 60 + trial, true), config, 10 + trial);

    std::vector<std::string> tokens(1 + rng.next_index(4));
    for (auto& t : tokens) t = "tok" + std::to_string(rng.next_index(7));
    const NodeId target = model.tree().leaves()[rng.next_index(model.tree().num_leaves())];

    ModelGradients grads = model.make_gradients();
    grads.zero();
    model.forward_backward(tokens, target, 0.0, nullptr, grads);

    const auto params = model.trainable_views();
    const auto analytic = std::as_const(grads).views();
    REQUIRE(params.size() == analytic.size());
    for (std::size_t v = 0; v < params.size(); ++v) {
      for (std::size_t i = 0; i < params[v].size(); ++i) {
        const double numeric = testutil::central_difference(
            [&] { return model.example_loss(tokens, target); }, params[v][i], step);
        CHECK(testutil::grad_error(analytic[v][i], numeric) <= 1e-5);
      }
    }
  }
}

TEST_CASE("forward_backward accumulates rather than overwrites") {
  TextClassifier model(small_tree(), small_table(3, 7),
                       {EncoderKind::kMeanPool, 0, false, false}, 3);
  const std::vector<std::string> tokens = {"tok0", "tok1"};
  const NodeId target = model.tree().leaves()[0];

  ModelGradients once = model.make_gradients();
  once.zero();
  model.forward_backward(tokens, target, 0.0, nullptr, once);

  ModelGradients twice = model.make_gradients();
  twice.zero();
  model.forward_backward(tokens, target, 0.0, nullptr, twice);
  model.forward_backward(tokens, target, 0.0, nullptr, twice);

  const auto a = std::as_const(once).views();
  const auto b = std::as_const(twice).views();
  for (std::size_t v = 0; v < a.size(); ++v) {
    for (std::size_t i = 0; i < a[v].size(); ++i) {
      CHECK(b[v][i] == doctest::Approx(2.0 * a[v][i]).epsilon(1e-12));
    }
  }

  // scale(0.5) recovers the single-example gradient.
  twice.scale(0.5);
  const auto halved = std::as_const(twice).views();
  for (std::size_t v = 0; v < a.size(); ++v) {
    for (std::size_t i = 0; i < a[v].size(); ++i) {
      CHECK(halved[v][i] == doctest::Approx(a[v][i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("training dropout replays deterministically in the backward pass") {
  TextClassifier model(small_tree(), small_table(4, 8),
                       {EncoderKind::kLstm, 3, false, false}, 5);
  const std::vector<std::string> tokens = {"tok0", "tok4", "tok2"};
  const NodeId target = model.tree().leaves()[1];

  RngStream rng_a(5, "dropout", 0, 0);
  ModelGradients a = model.make_gradients();
  a.zero();
  const double loss_a = model.forward_backward(tokens, target, 0.5, &rng_a, a);

  RngStream rng_b(5, "dropout", 0, 0);
  ModelGradients b = model.make_gradients();
  b.zero();
  const double loss_b = model.forward_backward(tokens, target, 0.5, &rng_b, b);

  CHECK(loss_a == loss_b);
  CHECK(views_equal(std::as_const(a).views(), std::as_const(b).views()));
}

TEST_CASE("checkpoints restore the exact model") {
  testutil::TempDir dir;
  TextClassifier model(small_tree(), small_table(4, 9, true),
                       {EncoderKind::kLstm, 5, true, true}, 11);
  const std::string path = dir.file("model.bin");
  model.save(path);
  const TextClassifier loaded = TextClassifier::load(path);

  CHECK(views_equal(std::as_const(model).trainable_views(), loaded.trainable_views()));
  CHECK(loaded.config().h_dim == 5);
  CHECK(loaded.config().bidirectional);
  CHECK(loaded.config().train_embeddings);
  CHECK(loaded.tree().edges() == model.tree().edges());
  CHECK(loaded.embeddings().tokens == model.embeddings().tokens);

  const std::vector<std::string> tokens = {"tok3", "tok6", "unseen"};
  CHECK(loaded.predict(tokens) == model.predict(tokens));
  const Vector expect = model.leaf_log_probs_for(tokens);
  const Vector got = loaded.leaf_log_probs_for(tokens);
  for (std::size_t i = 0; i < expect.size(); ++i) CHECK(expect[i] == got[i]);
}

TEST_CASE("corrupt checkpoints are rejected") {
  testutil::TempDir dir;
  const std::string path = dir.file("bad.bin");
  testutil::write_file(path, "HSXPgarbage");
  CHECK_THROWS_AS(TextClassifier::load(path), BadCheckpoint);
  CHECK_THROWS_AS(TextClassifier::load(dir.file("absent.bin")), MissingFile);

  // Truncation after a valid prefix must not slip through.
  TextClassifier model(small_tree(), small_table(3, 10),
                       {EncoderKind::kMeanPool, 0, false, false}, 1);
  const std::string good = dir.file("good.bin");
  model.save(good);
  const std::string bytes = testutil::read_file(good);
  testutil::write_file(path, bytes.substr(0, bytes.size() / 2));
  CHECK_THROWS(TextClassifier::load(path));
}

}  // TEST_SUITE
