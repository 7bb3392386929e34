// Copyright 2026 The gapkg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gap/kg.hpp"
#include "gap/metrics.hpp"
#include "gap/model.hpp"
#include "gap/train.hpp"
#include "gap/vocab.hpp"

namespace gap {

inline constexpr const char* kCodeVersion = "gapkg 0.1.0";

struct RunConfig {
  ModelConfig model;
  TrainConfig train;
  std::size_t min_freq = 1;
  // Uses this vocabulary instead of building one from the training split.
  std::optional<std::filesystem::path> vocab_path;
  std::filesystem::path output_dir;
};

struct Splits {
  std::vector<Example> train;
  std::vector<Example> valid;
  // Evaluated after training; the validation split stands in when empty.
  std::vector<Example> test;
};

// Reads the three splits; test_path may be empty.
Splits load_splits(const std::filesystem::path& train_path, const std::filesystem::path& valid_path,
                   const std::filesystem::path& test_path, const SlotBudget& budget);

struct RunResult {
  std::filesystem::path dir;
  std::optional<double> best_valid_bleu;
  std::size_t steps = 0;
  std::size_t train_examples = 0;  // after subsampling
  EvalReport test;
  std::vector<std::string> hypotheses;
};

// Trains, decodes the test split with the best model and writes config.json,
// vocab.txt, metrics.jsonl, best.ckpt, last.ckpt, predictions.jsonl and
// report.json under cfg.output_dir.
RunResult run_experiment(const RunConfig& cfg, const Splits& splits);

nlohmann::json run_config_json(const RunConfig& cfg);

struct AblationCell {
  std::string scheme;
  bool type_encoding = false;
  RunResult run;
};

// Every scheme with and without type encoding; each run lives in
// <output_dir>/<scheme>_<notype|type>. Also writes ablation.tsv.
std::vector<AblationCell> run_ablation_grid(const RunConfig& base, const Splits& splits);

struct FewShotPoint {
  double proportion = 0.0;
  RunResult run;
};

inline const std::vector<double> kFewShotProportions = {0.005, 0.01, 0.05, 0.1};

// One run per proportion under <output_dir>/p<proportion>; writes few_shot.tsv.
std::vector<FewShotPoint> run_few_shot(const RunConfig& base, const Splits& splits,
                                       const std::vector<double>& proportions = kFewShotProportions);

struct SizeBucket {
  std::size_t min_triples = 0;
  std::size_t max_triples = 0;  // inclusive; 0 means unbounded
  std::string name() const;
};

inline const std::vector<SizeBucket> kSizeBuckets = {{1, 3}, {4, 7}, {8, 0}};

struct BucketScore {
  SizeBucket bucket;
  std::size_t examples = 0;
  std::optional<double> bleu;  // empty when the bucket has no examples
};

// Corpus BLEU of `hypotheses` within each triple-count bucket.
std::vector<BucketScore> bucket_scores(const std::vector<Example>& examples,
                                       const std::vector<std::string>& hypotheses,
                                       const std::vector<SizeBucket>& buckets = kSizeBuckets);

// Trains once, then scores the test predictions per bucket; writes buckets.tsv.
std::vector<BucketScore> run_size_buckets(const RunConfig& cfg, const Splits& splits,
                                          const std::vector<SizeBucket>& buckets = kSizeBuckets);

}  // namespace gap
