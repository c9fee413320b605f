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

#include "hiertext/cli.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <utility>

#include "CLI11.hpp"
#include "json.hpp"

#include "hiertext/data.h"
#include "hiertext/error.h"
#include "hiertext/hsoftmax.h"
#include "hiertext/model.h"
#include "hiertext/optim.h"

namespace hiertext::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MissingFile("cannot write " + path.string());
  out << content;
}

fs::path ensure_out_dir(const RunConfig& config) {
  fs::path dir(config.out_dir);
  fs::create_directories(dir);
  return dir;
}

EncoderKind encoder_kind(const RunConfig& config) {
  return config.encoder == "mean" ? EncoderKind::kMeanPool : EncoderKind::kLstm;
}

ModelConfig model_config(const RunConfig& config, std::size_t h_dim) {
  ModelConfig mc;
  mc.encoder = encoder_kind(config);
  mc.h_dim = h_dim;
  mc.bidirectional = config.bidirectional;
  mc.train_embeddings = config.train_embeddings;
  return mc;
}

std::vector<ModelConfig> candidate_grid(const RunConfig& config) {
  std::vector<ModelConfig> grid;
  for (std::size_t h : config.h_dims) grid.push_back(model_config(config, h));
  return grid;
}

EmbeddingTable build_embeddings(const RunConfig& config, const std::vector<std::string>& vocab) {
  if (!config.embeddings_path.empty()) {
    EmbeddingTable table = load_embeddings(config.embeddings_path, vocab);
    table.trainable = config.train_embeddings;
    return table;
  }
  RngStream rng(config.train.seed, "embedding_init");
  return EmbeddingTable::random_init(vocab, config.emb_dim, kUnkToken, rng,
                                     config.train_embeddings);
}

/// Like load_corpus, but the test split is optional.
Dataset load_dataset(const RunConfig& config) {
  Dataset dataset;
  dataset.taxonomy = TaxonomyTree::load(config.taxonomy_path);
  dataset.train = load_labeled_file(config.train_path, dataset.taxonomy);
  if (!config.test_path.empty())
    dataset.test = load_labeled_file(config.test_path, dataset.taxonomy);
  dataset.vocab = build_vocab(dataset.train);
  std::cerr << "loaded corpus: train " << dataset.train.size() << ", test "
            << dataset.test.size() << ", leaves " << dataset.taxonomy.num_leaves()
            << ", parents " << dataset.taxonomy.num_parents() << ", vocab "
            << dataset.vocab.size() << "\n";
  return dataset;
}

/// Validation holdout: fold 0 of the deterministic fold assignment.
std::pair<std::vector<Example>, std::vector<Example>> holdout_split(
    const std::vector<Example>& train_set, const TaxonomyTree& taxonomy, std::size_t k_folds,
    std::uint64_t seed) {
  const std::vector<std::size_t> fold_of = assign_folds(train_set, taxonomy, k_folds, seed);
  std::pair<std::vector<Example>, std::vector<Example>> split;
  for (std::size_t i = 0; i < train_set.size(); ++i)
    (fold_of[i] == 0 ? split.second : split.first).push_back(train_set[i]);
  return split;
}

ordered_json config_json(const RunConfig& c, const std::string& subcommand) {
  ordered_json j;
  j["subcommand"] = subcommand;
  j["train_path"] = c.train_path;
  j["test_path"] = c.test_path;
  j["taxonomy_path"] = c.taxonomy_path;
  j["embeddings_path"] = c.embeddings_path;
  j["model_path"] = c.model_path;
  j["out_dir"] = c.out_dir;
  j["mode"] = c.mode;
  j["encoder"] = c.encoder;
  j["h_dims"] = c.h_dims;
  j["bidirectional"] = c.bidirectional;
  j["train_embeddings"] = c.train_embeddings;
  j["emb_dim"] = c.emb_dim;
  j["lr"] = c.train.lr;
  j["batch_size"] = c.train.batch_size;
  j["dropout"] = c.train.dropout;
  j["k_folds"] = c.train.k_folds;
  j["max_epochs"] = c.train.max_epochs;
  j["patience"] = c.train.patience;
  j["seed"] = c.train.seed;
  j["num_seeds"] = c.num_seeds;
  j["skip_cv"] = c.skip_cv;
  return j;
}

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;
};

MeanSd mean_sd(const std::vector<double>& xs) {
  MeanSd r;
  if (xs.empty()) return r;
  for (double x : xs) r.mean += x;
  r.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - r.mean) * (x - r.mean);
    r.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return r;
}

constexpr const char* kMetricNames[4] = {"F1", "Precision", "Recall", "Accuracy"};

std::array<std::vector<double>, 4> metric_columns(const std::vector<EvalReport>& reports) {
  std::array<std::vector<double>, 4> cols;
  for (const EvalReport& r : reports) {
    cols[0].push_back(r.macro_f1);
    cols[1].push_back(r.macro_precision);
    cols[2].push_back(r.macro_recall);
    cols[3].push_back(r.micro_accuracy);
  }
  return cols;
}

std::string compare_table(const std::vector<EvalReport>& flat,
                          const std::vector<EvalReport>& hier) {
  const auto fcols = metric_columns(flat);
  const auto hcols = metric_columns(hier);
  std::string out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-10s  %-20s  %-20s\n", "Metric", "Flat", "Hierarchical");
  out += line;
  for (int m = 0; m < 4; ++m) {
    const MeanSd f = mean_sd(fcols[m]);
    const MeanSd h = mean_sd(hcols[m]);
    std::snprintf(line, sizeof(line), "%-10s  %8.3f +- %-8.3f  %8.3f +- %-8.3f\n",
                  kMetricNames[m], f.mean, f.sd, h.mean, h.sd);
    out += line;
  }
  return out;
}

std::string eval_table(const EvalReport& report) {
  std::string out;
  char line[96];
  std::snprintf(line, sizeof(line), "%-10s  %8s\n", "Metric", "Value");
  out += line;
  const double values[4] = {report.macro_f1, report.macro_precision, report.macro_recall,
                            report.micro_accuracy};
  for (int m = 0; m < 4; ++m) {
    std::snprintf(line, sizeof(line), "%-10s  %8.3f\n", kMetricNames[m], values[m]);
    out += line;
  }
  return out;
}

ordered_json report_json_fields(const EvalReport& r) {
  ordered_json j;
  j["macro_f1"] = r.macro_f1;
  j["macro_precision"] = r.macro_precision;
  j["macro_recall"] = r.macro_recall;
  j["micro_accuracy"] = r.micro_accuracy;
  return j;
}

ordered_json cv_json(const CvResult& cv) {
  ordered_json j;
  j["candidates"] = ordered_json::array();
  for (const CvCandidate& c : cv.candidates) {
    ordered_json cj;
    cj["encoder"] = c.model.encoder == EncoderKind::kMeanPool ? "mean" : "lstm";
    cj["h_dim"] = c.model.h_dim;
    cj["bidirectional"] = c.model.bidirectional;
    cj["fold_macro_f1"] = c.fold_macro_f1;
    cj["mean_macro_f1"] = c.mean_macro_f1;
    j["candidates"].push_back(cj);
  }
  j["selected_index"] = cv.selected;
  return j;
}

std::string history_jsonl(const std::vector<EpochRecord>& history) {
  std::string out;
  for (const EpochRecord& record : history) out += epoch_record_json(record) + "\n";
  return out;
}

// --- gradcheck ------------------------------------------------------------

TaxonomyTree random_tree(RngStream& rng, std::size_t max_depth, std::size_t max_fanout) {
  std::vector<std::pair<std::string, std::string>> edges;
  int next_id = 1;
  struct Item {
    std::string name;
    std::size_t depth;
  };
  std::vector<Item> frontier{{"n0", 0}};
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
      std::string child = "n" + std::to_string(next_id++);
      edges.emplace_back(item.name, child);
      frontier.push_back({std::move(child), item.depth + 1});
    }
  }
  return TaxonomyTree::build_from_edges(edges);
}

struct CheckStats {
  double max_error = 0.0;
  std::size_t failures = 0;
};

void e2e_instance(const RunConfig& config, std::size_t index, CheckStats& stats) {
  RngStream rng(config.train.seed, "gradcheck_e2e", index);
  const TaxonomyTree tree = random_tree(rng, 3, 4);
  const std::size_t d_emb = 2 + rng.next_index(3);
  const std::size_t h_dim = 2 + rng.next_index(3);

  std::vector<std::string> vocab{kUnkToken};
  for (int i = 0; i < 8; ++i) vocab.push_back("tok" + std::to_string(i));
  RngStream emb_rng(config.train.seed, "gradcheck_e2e_emb", index);
  EmbeddingTable embeddings = EmbeddingTable::random_init(vocab, d_emb, kUnkToken, emb_rng, true);

  ModelConfig mc;
  mc.encoder = EncoderKind::kLstm;
  mc.h_dim = h_dim;
  mc.bidirectional = rng.next_bernoulli(0.5);
  mc.train_embeddings = true;
  TextClassifier model(tree, std::move(embeddings), mc,
                       derive_seed(config.train.seed, "gradcheck_e2e_model", index));

  const std::size_t len = 1 + rng.next_index(4);
  std::vector<std::string> tokens;
  for (std::size_t t = 0; t < len; ++t) tokens.push_back("tok" + std::to_string(rng.next_index(8)));
  const NodeId target = tree.leaves()[rng.next_index(tree.num_leaves())];

  ModelGradients grads = model.make_gradients();
  model.forward_backward(tokens, target, 0.0, nullptr, grads);
  const auto analytic = grads.views();
  if (config.inject_sign_flip) {
    for (std::span<double> view : grads.views()) {
      auto it = std::find_if(view.begin(), view.end(), [](double g) { return std::abs(g) > 1e-4; });
      if (it != view.end()) {
        *it = -*it;
        break;
      }
    }
  }

  // Fourth-order symmetric stencil: truncation is negligible at this step,
  // and the step is large enough that the loss differences clear
  // double-precision cancellation noise.
  const double step = 2e-4;
  const auto params = model.trainable_views();
  for (std::size_t v = 0; v < params.size(); ++v) {
    for (std::size_t j = 0; j < params[v].size(); ++j) {
      const double saved = params[v][j];
      auto loss_at = [&](double value) {
        params[v][j] = value;
        return model.example_loss(tokens, target);
      };
      const double numeric = (-loss_at(saved + 2.0 * step) + 8.0 * loss_at(saved + step) -
                              8.0 * loss_at(saved - step) + loss_at(saved - 2.0 * step)) /
                             (12.0 * step);
      params[v][j] = saved;
      const double a = analytic[v][j];
      const double scale = std::max(std::abs(a), std::abs(numeric));
      // Same floor as the output-layer check: below it the entry sits at the
      // finite-difference noise floor and is judged absolutely.
      const double error = scale >= 1e-4 ? std::abs(a - numeric) / scale : std::abs(a - numeric);
      stats.max_error = std::max(stats.max_error, error);
      if (error > config.e2e_tolerance) ++stats.failures;
    }
  }
}

}  // namespace

int cmd_gradcheck(const RunConfig& config) {
  CheckStats output_stats;
  for (std::size_t i = 0; i < config.instances; ++i) {
    RngStream rng(config.train.seed, "gradcheck_output", i);
    const TaxonomyTree tree = random_tree(rng, 4, 6);
    const std::size_t h_dim = 1 + rng.next_index(8);
    HierSoftmaxParams params = HierSoftmaxParams::random_init(tree, h_dim, rng);
    Vector h(h_dim);
    for (double& v : h) v = rng.next_uniform(-2.0, 2.0);
    const NodeId target = tree.leaves()[rng.next_index(tree.num_leaves())];
    // 3e-5 balances truncation (h^2/6 * f''') against cancellation noise
    // (eps * loss / 2h); both land near 1e-11 absolute for typical losses.
    const GradCheckReport report =
        gradient_check(params, tree, h, target, 3e-5, config.tolerance);
    output_stats.max_error = std::max(output_stats.max_error, report.max_error);
    output_stats.failures += report.failures;
  }
  std::printf("output layer: %zu instances, max error %.3e, tolerance %.1e, failures %zu\n",
              config.instances, output_stats.max_error, config.tolerance, output_stats.failures);

  CheckStats e2e_stats;
  for (std::size_t i = 0; i < config.instances; ++i) e2e_instance(config, i, e2e_stats);
  std::printf("end to end:   %zu instances, max error %.3e, tolerance %.1e, failures %zu\n",
              config.instances, e2e_stats.max_error, config.e2e_tolerance, e2e_stats.failures);

  const bool ok = output_stats.failures == 0 && e2e_stats.failures == 0;
  std::printf("%s\n", ok ? "gradcheck passed" : "gradcheck FAILED");
  return ok ? 0 : 1;
}

int cmd_synth(const RunConfig& config) {
  const Dataset dataset =
      synth_hierarchical(config.categories, config.classes_per_category,
                         config.examples_per_class, config.vocab_per_class, config.noise,
                         config.train.seed);
  const fs::path dir = ensure_out_dir(config);

  std::string taxonomy_text;
  for (const auto& [parent, child] : dataset.taxonomy.edges())
    taxonomy_text += parent + "\t" + child + "\n";
  write_file(dir / "taxonomy.txt", taxonomy_text);

  auto corpus_text = [](const std::vector<Example>& examples) {
    std::string text;
    for (const Example& example : examples) {
      text += example.label + "\t";
      for (std::size_t t = 0; t < example.tokens.size(); ++t) {
        if (t > 0) text += ' ';
        text += example.tokens[t];
      }
      text += '\n';
    }
    return text;
  };
  write_file(dir / "train.tsv", corpus_text(dataset.train));
  write_file(dir / "test.tsv", corpus_text(dataset.test));

  std::printf("synth corpus: %zu train, %zu test, %zu leaves, %zu parents -> %s\n",
              dataset.train.size(), dataset.test.size(), dataset.taxonomy.num_leaves(),
              dataset.taxonomy.num_parents(), dir.string().c_str());
  return 0;
}

int cmd_cv(const RunConfig& config) {
  if (config.mode == "both") throw ConfigError("cv runs one mode; pass flat or hierarchical");
  const Dataset dataset = load_dataset(config);
  const TaxonomyTree tree =
      config.mode == "flat" ? dataset.taxonomy.flat_view() : dataset.taxonomy;
  const EmbeddingTable embeddings = build_embeddings(config, dataset.vocab);

  const CvResult cv = cross_validate(dataset.train, tree, embeddings, candidate_grid(config),
                                     config.train);
  for (const CvCandidate& c : cv.candidates) {
    std::printf("candidate h_dim=%zu bidirectional=%d folds:", c.model.h_dim,
                c.model.bidirectional ? 1 : 0);
    for (double f1 : c.fold_macro_f1) std::printf(" %.3f", f1);
    std::printf(" mean %.3f\n", c.mean_macro_f1);
  }
  const CvCandidate& selected = cv.candidates[cv.selected];
  std::printf("selected: h_dim=%zu bidirectional=%d mean macro-F1 %.3f\n", selected.model.h_dim,
              selected.model.bidirectional ? 1 : 0, selected.mean_macro_f1);

  const fs::path dir = ensure_out_dir(config);
  write_file(dir / "cv.json", cv_json(cv).dump(2) + "\n");
  write_file(dir / "resolved_config.json", config_json(config, "cv").dump(2) + "\n");
  return 0;
}

int cmd_train(const RunConfig& config) {
  if (config.mode == "both") throw ConfigError("train runs one mode; pass flat or hierarchical");
  const Dataset dataset = load_dataset(config);
  const TaxonomyTree tree =
      config.mode == "flat" ? dataset.taxonomy.flat_view() : dataset.taxonomy;
  const EmbeddingTable embeddings = build_embeddings(config, dataset.vocab);

  const auto [train_split, val_split] =
      holdout_split(dataset.train, tree, config.train.k_folds, config.train.seed);
  TextClassifier model(tree, embeddings, model_config(config, config.h_dims.front()),
                       config.train.seed);
  const TrainResult result = train(model, train_split, val_split, config.train);

  const fs::path dir = ensure_out_dir(config);
  model.save((dir / "model.bin").string());
  write_file(dir / "history.jsonl", history_jsonl(result.history));
  write_file(dir / "resolved_config.json", config_json(config, "train").dump(2) + "\n");

  ordered_json j;
  j["mode"] = config.mode;
  j["parameters"] = model.num_parameters();
  j["epochs_run"] = result.history.size();
  j["best_epoch"] = result.best_epoch;
  j["best_val_macro_f1"] = result.best_val_macro_f1;
  if (!config.test_path.empty()) {
    const EvalReport test_report = evaluate_model(model, dataset.test);
    j["test"] = report_json_fields(test_report);
    std::printf("test metrics\n%s", eval_table(test_report).c_str());
  }
  write_file(dir / "train_report.json", j.dump(2) + "\n");
  std::printf("trained %s model: %zu epochs, best epoch %zu, best val macro-F1 %.3f\n",
              config.mode.c_str(), result.history.size(), result.best_epoch,
              result.best_val_macro_f1);
  return 0;
}

int cmd_eval(const RunConfig& config) {
  if (config.model_path.empty() || config.test_path.empty())
    throw ConfigError("eval needs --model and --test");
  const TextClassifier model = TextClassifier::load(config.model_path);
  const std::vector<Example> test_set = load_labeled_file(config.test_path, model.tree());
  const EvalReport report = evaluate_model(model, test_set);
  std::printf("%s", eval_table(report).c_str());

  const fs::path dir = ensure_out_dir(config);
  ordered_json j = report_json_fields(report);
  j["examples"] = test_set.size();
  write_file(dir / "eval.json", j.dump(2) + "\n");
  return 0;
}

namespace {

struct ModeOutcome {
  std::string mode;
  ModelConfig selected;
  CvResult cv;
  bool cv_ran = false;
  std::size_t parameters = 0;
  std::size_t h_dim_in = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<EvalReport> reports;
};

ModeOutcome run_mode(const RunConfig& config, const Dataset& dataset,
                     const EmbeddingTable& embeddings, const std::string& mode,
                     const fs::path& dir) {
  ModeOutcome outcome;
  outcome.mode = mode;
  const TaxonomyTree tree = mode == "flat" ? dataset.taxonomy.flat_view() : dataset.taxonomy;

  const std::vector<ModelConfig> grid = candidate_grid(config);
  if (config.skip_cv) {
    outcome.selected = grid.front();
  } else {
    outcome.cv = cross_validate(dataset.train, tree, embeddings, grid, config.train);
    outcome.cv_ran = true;
    outcome.selected = outcome.cv.candidates[outcome.cv.selected].model;
  }

  for (std::size_t s = 0; s < config.num_seeds; ++s) {
    const std::uint64_t seed = config.train.seed + s;
    const auto [train_split, val_split] =
        holdout_split(dataset.train, tree, config.train.k_folds, seed);
    TrainConfig train_config = config.train;
    train_config.seed = seed;
    TextClassifier model(tree, embeddings, outcome.selected, seed);
    const TrainResult result = train(model, train_split, val_split, train_config);
    write_file(dir / ("history_" + mode + "_seed" + std::to_string(seed) + ".jsonl"),
               history_jsonl(result.history));
    outcome.seeds.push_back(seed);
    outcome.reports.push_back(evaluate_model(model, dataset.test));
    outcome.parameters = model.num_parameters();
    outcome.h_dim_in = model.h_dim_in();
  }
  return outcome;
}

ordered_json mode_json(const ModeOutcome& outcome) {
  ordered_json j;
  j["selected"] = {{"encoder",
                    outcome.selected.encoder == EncoderKind::kMeanPool ? "mean" : "lstm"},
                   {"h_dim", outcome.selected.h_dim},
                   {"bidirectional", outcome.selected.bidirectional}};
  if (outcome.cv_ran) j["cv"] = cv_json(outcome.cv);
  j["parameters"] = outcome.parameters;
  j["h_dim_in"] = outcome.h_dim_in;
  j["per_seed"] = ordered_json::array();
  for (std::size_t s = 0; s < outcome.seeds.size(); ++s) {
    ordered_json sj = report_json_fields(outcome.reports[s]);
    sj["seed"] = outcome.seeds[s];
    j["per_seed"].push_back(sj);
  }
  const auto cols = metric_columns(outcome.reports);
  const char* keys[4] = {"macro_f1", "macro_precision", "macro_recall", "micro_accuracy"};
  ordered_json mean, sd;
  for (int m = 0; m < 4; ++m) {
    const MeanSd stats = mean_sd(cols[m]);
    mean[keys[m]] = stats.mean;
    sd[keys[m]] = stats.sd;
  }
  j["mean"] = mean;
  j["sd"] = sd;
  return j;
}

}  // namespace

int cmd_compare(const RunConfig& config) {
  if (config.mode != "both") throw ConfigError("compare requires --mode both");
  const Dataset dataset = load_corpus(config.train_path, config.test_path, config.taxonomy_path);
  if (dataset.taxonomy.num_parents() < 2)
    throw ConfigError("mode both needs a hierarchy (this taxonomy has a single parent node)");
  const EmbeddingTable embeddings = build_embeddings(config, dataset.vocab);
  const fs::path dir = ensure_out_dir(config);

  const ModeOutcome flat = run_mode(config, dataset, embeddings, "flat", dir);
  const ModeOutcome hier = run_mode(config, dataset, embeddings, "hierarchical", dir);

  const std::size_t num_parents = dataset.taxonomy.num_parents();
  const long long increment = static_cast<long long>(hier.parameters) -
                              static_cast<long long>(flat.parameters);
  const long long formula =
      static_cast<long long>(num_parents - 1) * static_cast<long long>(hier.h_dim_in + 1);

  std::string text;
  char line[256];
  std::snprintf(line, sizeof(line),
                "flat vs hierarchical comparison\n"
                "train %zu, test %zu, leaves %zu, parents %zu\n",
                dataset.train.size(), dataset.test.size(), dataset.taxonomy.num_leaves(),
                num_parents);
  text += line;
  std::snprintf(line, sizeof(line), "seeds %llu..%llu, encoder %s, dropout %.2f, batch %zu\n\n",
                static_cast<unsigned long long>(config.train.seed),
                static_cast<unsigned long long>(config.train.seed + config.num_seeds - 1),
                config.encoder.c_str(), config.train.dropout, config.train.batch_size);
  text += line;
  for (const ModeOutcome* outcome : {&flat, &hier}) {
    std::snprintf(line, sizeof(line), "selected %-13s h_dim=%zu bidirectional=%d%s\n",
                  (outcome->mode + ":").c_str(), outcome->selected.h_dim,
                  outcome->selected.bidirectional ? 1 : 0,
                  outcome->cv_ran ? "" : " (cv skipped)");
    text += line;
  }
  text += "\n" + compare_table(flat.reports, hier.reports) + "\n";
  std::snprintf(line, sizeof(line), "parameters: flat %zu, hierarchical %zu\n", flat.parameters,
                hier.parameters);
  text += line;
  std::snprintf(line, sizeof(line),
                "increment (hierarchical - flat): %lld, (P-1)*(h_dim_in+1) = %zu*%zu = %lld\n",
                increment, num_parents - 1, hier.h_dim_in + 1, formula);
  text += line;

  write_file(dir / "report.txt", text);
  std::printf("%s", text.c_str());

  ordered_json j;
  j["dataset"] = {{"train", dataset.train.size()},
                  {"test", dataset.test.size()},
                  {"leaves", dataset.taxonomy.num_leaves()},
                  {"parents", num_parents}};
  j["flat"] = mode_json(flat);
  j["hierarchical"] = mode_json(hier);
  j["parameter_increment"] = {{"hierarchical_minus_flat", increment},
                              {"formula", formula},
                              {"matches_formula", increment == formula}};
  write_file(dir / "report.json", j.dump(2) + "\n");
  write_file(dir / "resolved_config.json", config_json(config, "compare").dump(2) + "\n");
  return 0;
}

int run(int argc, const char* const* argv) {
  RunConfig config;
  CLI::App app{"flat and hierarchical text classifiers over class taxonomies"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from an INI/TOML file (flags take precedence)");

  auto add_data_options = [&](CLI::App* cmd, bool need_test) {
    cmd->add_option("--train", config.train_path, "training corpus, label<TAB>text per line")
        ->required();
    auto* test = cmd->add_option("--test", config.test_path, "test corpus");
    if (need_test) test->required();
    cmd->add_option("--taxonomy", config.taxonomy_path, "taxonomy file, parent<TAB>child per line")
        ->required();
    cmd->add_option("--embeddings", config.embeddings_path,
                    "pretrained word vectors (GloVe text format); random init when omitted");
    cmd->add_option("--emb-dim", config.emb_dim, "random-init embedding dimension")
        ->capture_default_str();
  };
  auto add_model_options = [&](CLI::App* cmd) {
    cmd->add_option("--h-dim", config.h_dims,
                    "hidden units per direction; repeat for a cv grid")
        ->capture_default_str();
    cmd->add_flag("--bidirectional", config.bidirectional, "concatenate both directions");
    cmd->add_option("--encoder", config.encoder, "sequence encoder")
        ->check(CLI::IsMember({"mean", "lstm"}))
        ->capture_default_str();
    cmd->add_flag("--train-embeddings", config.train_embeddings, "fine-tune the embedding table");
  };
  auto add_train_options = [&](CLI::App* cmd) {
    cmd->add_option("--lr", config.train.lr, "Adam learning rate")->capture_default_str();
    cmd->add_option("--batch-size", config.train.batch_size, "examples per update")
        ->capture_default_str();
    cmd->add_option("--dropout", config.train.dropout, "dropout rate on the encoder output")
        ->capture_default_str();
    cmd->add_option("--k-folds", config.train.k_folds, "cross-validation folds")
        ->capture_default_str();
    cmd->add_option("--epochs", config.train.max_epochs, "maximum training epochs")
        ->capture_default_str();
    cmd->add_option("--patience", config.train.patience,
                    "epochs without validation improvement before stopping")
        ->capture_default_str();
  };
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--seed", config.train.seed, "root seed")->capture_default_str();
    cmd->add_option("--out", config.out_dir, "output directory")->capture_default_str();
  };

  CLI::App* gradcheck = app.add_subcommand(
      "gradcheck", "compare analytic gradients against central finite differences");
  gradcheck->add_option("--instances", config.instances, "random instances per check")
      ->capture_default_str();
  gradcheck->add_option("--tolerance", config.tolerance, "output-layer relative tolerance")
      ->capture_default_str();
  gradcheck->add_option("--e2e-tolerance", config.e2e_tolerance, "end-to-end relative tolerance")
      ->capture_default_str();
  gradcheck->add_option("--seed", config.train.seed, "root seed")->capture_default_str();
  gradcheck->add_flag("--inject-sign-flip", config.inject_sign_flip)->group("");

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic hierarchical corpus");
  synth->add_option("--categories", config.categories, "top-level categories")
      ->capture_default_str();
  synth->add_option("--classes-per-category", config.classes_per_category, "leaves per category")
      ->capture_default_str();
  synth->add_option("--examples-per-class", config.examples_per_class, "training documents per leaf")
      ->capture_default_str();
  synth->add_option("--vocab-per-class", config.vocab_per_class, "tokens owned by each leaf")
      ->capture_default_str();
  synth->add_option("--noise", config.noise, "rate of global-pool tokens")->capture_default_str();
  add_common(synth);

  CLI::App* cv = app.add_subcommand("cv", "k-fold cross-validation over a configuration grid");
  add_data_options(cv, false);
  add_model_options(cv);
  add_train_options(cv);
  add_common(cv);
  cv->add_option("--mode", config.mode, "output layer")
      ->check(CLI::IsMember({"flat", "hierarchical"}))
      ->capture_default_str();

  CLI::App* train_cmd = app.add_subcommand("train", "train one model and save a checkpoint");
  add_data_options(train_cmd, false);
  add_model_options(train_cmd);
  add_train_options(train_cmd);
  add_common(train_cmd);
  train_cmd->add_option("--mode", config.mode, "output layer")
      ->check(CLI::IsMember({"flat", "hierarchical"}))
      ->capture_default_str();

  CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a saved checkpoint on a corpus");
  eval_cmd->add_option("--model", config.model_path, "checkpoint from train")->required();
  eval_cmd->add_option("--test", config.test_path, "test corpus")->required();
  eval_cmd->add_option("--out", config.out_dir, "output directory")->capture_default_str();

  CLI::App* compare = app.add_subcommand(
      "compare", "train flat and hierarchical models under identical seeds and report both");
  add_data_options(compare, true);
  add_model_options(compare);
  add_train_options(compare);
  add_common(compare);
  compare->add_option("--mode", config.mode, "must be both")
      ->check(CLI::IsMember({"flat", "hierarchical", "both"}))
      ->capture_default_str();
  compare->add_option("--num-seeds", config.num_seeds, "train seeds seed..seed+n-1")
      ->capture_default_str();
  compare->add_flag("--skip-cv", config.skip_cv, "train the first candidate directly");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (app.got_subcommand(gradcheck)) return cmd_gradcheck(config);
    if (app.got_subcommand(synth)) return cmd_synth(config);
    if (app.got_subcommand(cv)) return cmd_cv(config);
    if (app.got_subcommand(train_cmd)) return cmd_train(config);
    if (app.got_subcommand(eval_cmd)) return cmd_eval(config);
    if (app.got_subcommand(compare)) {
      if (compare->count("--mode") == 0) config.mode = "both";
      return cmd_compare(config);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace hiertext::cli
