// Copyright 2026 The gapkg Authors
// SPDX-License-Identifier: Apache-2.0

#include "gap/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include <json.hpp>

#include "gap/checkpoint.hpp"
#include "gap/error.hpp"
#include "gap/metrics.hpp"

namespace gap {

void TrainConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); };
  if (!(learning_rate > 0.0)) fail("learning_rate must be positive");
  if (batch_size == 0 || epochs == 0 || eval_period == 0) fail("batch_size, epochs and eval_period must be positive");
  if (!(beta1 > 0.0 && beta1 < 1.0 && beta2 > 0.0 && beta2 < 1.0)) fail("Adam betas must lie in (0, 1)");
  if (!(epsilon > 0.0)) fail("epsilon must be positive");
  if (!(data_proportion > 0.0 && data_proportion <= 1.0)) fail("data_proportion must lie in (0, 1]");
  if (max_output_len < 2) fail("max_output_len must be at least 2");
  if (beam.beam_size == 0 || beam.max_len == 0) fail("beam_size and max_len must be positive");
}

LossResult cross_entropy_loss(const Matrix& logits, std::span<const TokenId> targets, TokenId pad) {
  if (logits.rows() != targets.size()) throw Error(ErrorCode::ShapeMismatch, "one target per logits row");
  LossResult r;
  r.grad = Matrix(logits.rows(), logits.cols());
  for (TokenId t : targets) {
    if (t != pad) ++r.tokens;
  }
  if (r.tokens == 0) throw Error(ErrorCode::AllPadTarget, "no non-pad targets");
  const double inv = 1.0 / static_cast<double>(r.tokens);
  const std::size_t v = logits.cols();
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] == pad) continue;
    const auto target = static_cast<std::size_t>(targets[i]);
    if (targets[i] < 0 || target >= v) throw Error(ErrorCode::IndexOutOfRange, "target id");
    const auto row = logits.row(i);
    const double mx = *std::max_element(row.begin(), row.end());
    double total = 0.0;
    for (double x : row) total += std::exp(x - mx);
    const double lse = mx + std::log(total);
    r.loss += (lse - row[target]) * inv;
    auto g = r.grad.row(i);
    for (std::size_t j = 0; j < v; ++j) g[j] = std::exp(row[j] - lse) * inv;
    g[target] -= inv;
  }
  return r;
}

double lr_at(std::size_t step, const TrainConfig& config) {
  if (config.warmup_steps == 0 || step >= config.warmup_steps) return config.learning_rate;
  return config.learning_rate * static_cast<double>(step) / static_cast<double>(config.warmup_steps);
}

OptimizerState make_optimizer_state(const std::vector<Parameter*>& params) {
  OptimizerState s;
  for (const Parameter* p : params) {
    s.first_moment.emplace_back(p->value.rows(), p->value.cols());
    s.second_moment.emplace_back(p->value.rows(), p->value.cols());
  }
  return s;
}

void adam_step(const std::vector<Parameter*>& params, OptimizerState& state, double lr,
               const TrainConfig& config) {
  if (state.first_moment.size() != params.size()) {
    throw Error(ErrorCode::ShapeMismatch, "optimizer state does not match the parameters");
  }
  ++state.step;
  const double b1 = config.beta1, b2 = config.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = *params[i];
    Matrix& m = state.first_moment[i];
    Matrix& v = state.second_moment[i];
    const std::size_t cols = p.value.cols();
    std::vector<bool> frozen(p.value.rows(), false);
    for (std::size_t r : p.frozen_rows) frozen[r] = true;
    for (std::size_t r = 0; r < p.value.rows(); ++r) {
      if (frozen[r]) continue;
      for (std::size_t c = 0; c < cols; ++c) {
        const std::size_t k = r * cols + c;
        const double g = p.grad.data()[k];
        double& mk = m.data()[k];
        double& vk = v.data()[k];
        mk = b1 * mk + (1.0 - b1) * g;
        vk = b2 * vk + (1.0 - b2) * g * g;
        p.value.data()[k] -= lr * (mk / c1) / (std::sqrt(vk / c2) + config.epsilon);
      }
    }
  }
}

std::vector<Example> few_shot_subsample(const std::vector<Example>& corpus, double proportion,
                                        std::uint64_t seed) {
  if (corpus.empty()) throw Error(ErrorCode::EmptyCorpus, "nothing to subsample");
  if (!(proportion > 0.0 && proportion <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "proportion must lie in (0, 1]");
  }
  // The small slack keeps products like 0.1 * 50 from rounding up to 6.
  const double want = std::ceil(proportion * static_cast<double>(corpus.size()) - 1e-9);
  const std::size_t count = std::clamp<std::size_t>(static_cast<std::size_t>(want), 1, corpus.size());
  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Example> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(corpus[order[i]]);
  return out;
}

std::vector<TrainingPair> make_training_pairs(const std::vector<Example>& examples, const Vocabulary& vocab,
                                              const ModelConfig& model_config, std::size_t max_output_len) {
  std::vector<TrainingPair> pairs;
  for (const auto& ex : examples) {
    const GraphInputs graph = prepare_graph(ex.graph, vocab, model_config);
    for (const auto& ref : ex.references) {
      pairs.push_back({graph, encode_target(ref, vocab, std::min(max_output_len, model_config.max_positions + 1))});
    }
  }
  return pairs;
}

LossResult pair_loss(Model& model, const TrainingPair& pair, double weight) {
  const bool grad = weight > 0.0;
  Tape tape(grad);
  const Var enc = encode(tape, model, pair.graph);
  const std::span<const TokenId> ids(pair.target);
  const Var logits = decoder_forward(tape, model, enc, ids.first(ids.size() - 1));
  LossResult r = cross_entropy_loss(tape.value(logits), ids.subspan(1));
  if (grad) {
    Matrix loss_value(1, 1, r.loss);
    auto dlogits = std::make_shared<Matrix>(r.grad);
    const Var loss = tape.custom(logits, std::move(loss_value), [dlogits, weight](const Matrix& g) {
      Matrix out = *dlogits;
      const double s = g(0, 0) * weight;
      for (double& x : out.values()) x *= s;
      return out;
    });
    tape.backward(loss);
  }
  return r;
}

std::string to_jsonl(const MetricRecord& record) {
  nlohmann::json j{{"step", record.step}, {"split", record.split}, {"loss", record.loss}};
  j["bleu"] = record.bleu ? nlohmann::json(*record.bleu) : nlohmann::json(nullptr);
  return j.dump();
}

std::vector<std::string> decode_examples(const Model& model, const std::vector<Example>& examples,
                                         const Vocabulary& vocab, const BeamConfig& beam) {
  std::vector<std::string> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) {
    const GraphInputs graph = prepare_graph(ex.graph, vocab, model.config());
    out.push_back(decode_tokens(generate(model, graph, beam), vocab));
  }
  return out;
}

double mean_loss(Model& model, const std::vector<Example>& examples, const Vocabulary& vocab,
                 std::size_t max_output_len) {
  double total = 0.0;
  std::size_t tokens = 0;
  for (const auto& ex : examples) {
    const GraphInputs graph = prepare_graph(ex.graph, vocab, model.config());
    TrainingPair pair{graph, encode_target(ex.references.front(), vocab, max_output_len)};
    const LossResult r = pair_loss(model, pair, 0.0);
    total += r.loss * static_cast<double>(r.tokens);
    tokens += r.tokens;
  }
  return tokens ? total / static_cast<double>(tokens) : 0.0;
}

TrainResult train(const std::vector<Example>& train_set, const std::vector<Example>& valid_set,
                  const Vocabulary& vocab, const ModelConfig& model_config, const TrainConfig& train_config,
                  const TrainOptions& options) {
  train_config.validate();
  if (train_set.empty()) throw Error(ErrorCode::EmptyCorpus, "empty training set");
  ModelConfig mc = model_config;
  mc.vocab_size = vocab.size();
  const std::size_t max_out = std::min(train_config.max_output_len, mc.max_positions + 1);

  const auto subset = train_config.data_proportion < 1.0
                          ? few_shot_subsample(train_set, train_config.data_proportion, train_config.seed)
                          : train_set;
  const auto pairs = make_training_pairs(subset, vocab, mc, max_out);

  TrainResult result{Model(mc), Model(mc), std::nullopt, 0, 0, {}};
  Model& model = result.final_model;
  const auto params = model.parameters();
  OptimizerState opt = make_optimizer_state(params);

  std::ofstream log_file;
  if (options.output_dir) {
    std::filesystem::create_directories(*options.output_dir);
    log_file.open(*options.output_dir / "metrics.jsonl", std::ios::binary | std::ios::trunc);
    if (!log_file) throw Error(ErrorCode::Io, "cannot write metrics log");
  }
  auto emit = [&](const MetricRecord& rec) {
    result.log.push_back(rec);
    if (log_file) log_file << to_jsonl(rec) << '\n' << std::flush;
  };

  double period_loss = 0.0;
  std::size_t period_batches = 0;
  auto evaluate = [&](std::size_t step) {
    emit({step, "train", std::nullopt, period_batches ? period_loss / static_cast<double>(period_batches) : 0.0});
    period_loss = 0.0;
    period_batches = 0;
    if (valid_set.empty()) return;
    const auto hyps = decode_examples(model, valid_set, vocab, train_config.beam);
    std::vector<std::vector<std::string>> refs;
    for (const auto& ex : valid_set) refs.push_back(ex.references);
    const double score = bleu(hyps, refs);
    emit({step, "valid", score, mean_loss(model, valid_set, vocab, max_out)});
    if (!result.best_bleu || score > *result.best_bleu) {
      result.best_bleu = score;
      result.best_step = step;
      result.best_model = model;
      if (options.output_dir) save_checkpoint(model, *options.output_dir / "best.ckpt");
    }
  };

  std::mt19937_64 rng(train_config.seed);
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t step = 0;
  std::size_t last_eval = 0;
  for (std::size_t epoch = 1; epoch <= train_config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    std::size_t epoch_batches = 0;
    for (std::size_t start = 0; start < order.size(); start += train_config.batch_size) {
      const std::size_t end = std::min(order.size(), start + train_config.batch_size);
      std::size_t tokens = 0;
      for (std::size_t i = start; i < end; ++i) tokens += pairs[order[i]].target.size() - 1;
      model.zero_grad();
      double batch_loss = 0.0;
      for (std::size_t i = start; i < end; ++i) {
        const TrainingPair& pair = pairs[order[i]];
        const double w = static_cast<double>(pair.target.size() - 1) / static_cast<double>(tokens);
        batch_loss += w * pair_loss(model, pair, w).loss;
      }
      ++step;
      adam_step(params, opt, lr_at(step, train_config), train_config);
      period_loss += batch_loss;
      ++period_batches;
      epoch_loss += batch_loss;
      ++epoch_batches;
      if (options.on_step) options.on_step(step, batch_loss);
      if (step % train_config.eval_period == 0) {
        evaluate(step);
        last_eval = step;
      }
    }
    if (options.on_epoch_end &&
        !options.on_epoch_end(model, {epoch, step, epoch_loss / static_cast<double>(epoch_batches)})) {
      break;
    }
  }
  if (last_eval != step) evaluate(step);
  result.steps = step;
  if (options.output_dir) save_checkpoint(model, *options.output_dir / "last.ckpt");
  if (!result.best_bleu) result.best_model = model;
  return result;
}

}  // namespace gap
