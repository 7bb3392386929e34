// Copyright 2026 The gapkg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gap/decode.hpp"
#include "gap/matrix.hpp"
#include "gap/model.hpp"
#include "gap/vocab.hpp"

namespace gap {

struct TrainConfig {
  double learning_rate = 2e-5;
  std::size_t warmup_steps = 1600;
  std::size_t batch_size = 16;
  std::size_t epochs = 1;
  std::size_t eval_period = 500;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 42;
  double data_proportion = 1.0;
  std::size_t max_output_len = 512;
  BeamConfig beam;

  // Throws InvalidConfig.
  void validate() const;
};

struct LossResult {
  double loss = 0.0;       // mean NLL over non-pad targets
  Matrix grad;             // d loss / d logits
  std::size_t tokens = 0;  // non-pad targets
};

// Throws AllPadTarget when every target is `pad`, ShapeMismatch otherwise.
LossResult cross_entropy_loss(const Matrix& logits, std::span<const TokenId> targets,
                              TokenId pad = special::kPad);

// Linear warmup from 0 to learning_rate over warmup_steps, constant after.
double lr_at(std::size_t step, const TrainConfig& config);

struct OptimizerState {
  std::vector<Matrix> first_moment;
  std::vector<Matrix> second_moment;
  std::size_t step = 0;
};

OptimizerState make_optimizer_state(const std::vector<Parameter*>& params);

// Bias-corrected Adam; rows in Parameter::frozen_rows are left untouched.
void adam_step(const std::vector<Parameter*>& params, OptimizerState& state, double lr,
               const TrainConfig& config);

// ceil(proportion * N) examples (at least one) taken from a seeded shuffle.
std::vector<Example> few_shot_subsample(const std::vector<Example>& corpus, double proportion,
                                        std::uint64_t seed);

// One (graph, reference) training pair with its encoder inputs.
struct TrainingPair {
  GraphInputs graph;
  std::vector<TokenId> target;  // <s> ... </s>
};

std::vector<TrainingPair> make_training_pairs(const std::vector<Example>& examples, const Vocabulary& vocab,
                                              const ModelConfig& model_config, std::size_t max_output_len);

// Teacher-forced loss of one pair. With `weight` > 0 the gradient of
// weight * loss is accumulated into the model's parameter gradients.
LossResult pair_loss(Model& model, const TrainingPair& pair, double weight);

struct MetricRecord {
  std::size_t step = 0;
  std::string split;
  std::optional<double> bleu;
  double loss = 0.0;
};

std::string to_jsonl(const MetricRecord& record);

// Hypotheses for each example, decoded with `beam`.
std::vector<std::string> decode_examples(const Model& model, const std::vector<Example>& examples,
                                         const Vocabulary& vocab, const BeamConfig& beam);

// Mean token loss of the first reference of each example.
double mean_loss(Model& model, const std::vector<Example>& examples, const Vocabulary& vocab,
                 std::size_t max_output_len);

struct EpochInfo {
  std::size_t epoch = 0;  // 1-based
  std::size_t step = 0;
  double mean_loss = 0.0;
};

struct TrainOptions {
  // When set, metrics.jsonl and best.ckpt are written here.
  std::optional<std::filesystem::path> output_dir;
  // Called after every epoch; returning false stops training.
  std::function<bool(const Model&, const EpochInfo&)> on_epoch_end;
  // Called after every optimizer step with the batch loss.
  std::function<void(std::size_t step, double loss)> on_step;
};

struct TrainResult {
  Model best_model;
  Model final_model;
  std::optional<double> best_bleu;
  std::size_t best_step = 0;
  std::size_t steps = 0;
  std::vector<MetricRecord> log;
};

// Mini-batch training with warmup and Adam. Every eval_period steps (and
// after the last step) the validation set is decoded and scored; the model
// with the best validation BLEU is kept. Deterministic for a fixed seed.
TrainResult train(const std::vector<Example>& train_set, const std::vector<Example>& valid_set,
                  const Vocabulary& vocab, const ModelConfig& model_config, const TrainConfig& train_config,
                  const TrainOptions& options = {});

}  // namespace gap
