// Copyright 2026 The gapkg Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "gap/dataset.hpp"
#include "gap/error.hpp"
#include "gap/synth.hpp"
#include "gap/train.hpp"
#include "oracles.hpp"

using namespace gap;

namespace {

ModelConfig tiny_model(const Vocabulary& vocab, std::size_t d = 16) {
  ModelConfig c;
  c.vocab_size = vocab.size();
  c.d_model = d;
  c.heads = 2;
  c.d_ff = 2 * d;
  c.layers = 2;
  c.decoder_layers = 2;
  c.max_positions = 64;
  return c;
}

TrainConfig fast_train() {
  TrainConfig t;
  t.learning_rate = 1e-3;
  t.warmup_steps = 10;
  t.batch_size = 8;
  t.eval_period = 1000000;
  t.beam = {1, 1.0, 30};
  return t;
}

}  // namespace

TEST_CASE("cross-entropy matches a log-softmax oracle") {
  std::mt19937_64 rng(2);
  const Matrix logits = oracle::random_matrix(rng, 3, 10, 2.0);
  const std::vector<TokenId> targets = {4, 0, 9};
  const LossResult r = cross_entropy_loss(logits, targets);
  CHECK(r.tokens == 2);
  double expect = 0.0;
  for (std::size_t i : {0u, 2u}) {
    auto row = logits.row(i);
    expect -= oracle::log_softmax({row.begin(), row.end()})[static_cast<std::size_t>(targets[i])] / 2.0;
  }
  CHECK(std::abs(r.loss - expect) < 1e-12);
  for (double g : r.grad.row(1)) CHECK(g == 0.0);

  Matrix x = logits;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double fd = oracle::fd_derivative([&] { return cross_entropy_loss(x, targets).loss; }, x.values()[i]);
    CHECK(r.grad.values()[i] == doctest::Approx(fd).epsilon(1e-7).scale(1.0));
  }
}

TEST_CASE("cross-entropy limits and errors") {
  const Matrix uniform(2, 7);
  CHECK(cross_entropy_loss(uniform, std::vector<TokenId>{3, 5}).loss == doctest::Approx(std::log(7.0)));
  Matrix sharp(1, 7);
  sharp(0, 3) = 100.0;
  CHECK(cross_entropy_loss(sharp, std::vector<TokenId>{3}).loss < 1e-30);
  CHECK_THROWS_AS(cross_entropy_loss(uniform, std::vector<TokenId>{0, 0}), Error);
  CHECK_THROWS_AS(cross_entropy_loss(uniform, std::vector<TokenId>{1}), Error);
  try {
    cross_entropy_loss(uniform, std::vector<TokenId>{0, 0});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AllPadTarget);
  }
}

TEST_CASE("warmup schedule") {
  TrainConfig t;
  t.learning_rate = 2e-5;
  t.warmup_steps = 1600;
  CHECK(lr_at(1600, t) == 2e-5);
  CHECK(lr_at(800, t) == doctest::Approx(1e-5));
  CHECK(lr_at(16000, t) == 2e-5);
  t.warmup_steps = 0;
  CHECK(lr_at(1, t) == 2e-5);
}

TEST_CASE("Adam update rules") {
  TrainConfig t;
  Parameter p("p", 2, 2);
  p.value = {{1.0, 2.0}, {3.0, 4.0}};
  p.frozen_rows = {1};
  std::vector<Parameter*> params = {&p};
  OptimizerState s = make_optimizer_state(params);

  const Matrix before = p.value;
  adam_step(params, s, 0.1, t);
  CHECK(p.value == before);

  // Step 1 with g = 1: bias-corrected m = v = 1, so the update is lr / (1 + eps).
  p.grad.fill(1.0);
  OptimizerState fresh = make_optimizer_state(params);
  adam_step(params, fresh, 0.1, t);
  CHECK(p.value(0, 0) == doctest::Approx(1.0 - 0.1 / (1.0 + 1e-8)).epsilon(1e-15));
  CHECK(p.value(1, 0) == 3.0);
  CHECK(p.value(1, 1) == 4.0);

  // Constant gradient: the per-step move settles at lr.
  for (int i = 0; i < 999; ++i) {
    const double prev = p.value(0, 1);
    adam_step(params, fresh, 0.01, t);
    if (i == 998) CHECK(std::abs(prev - p.value(0, 1)) == doctest::Approx(0.01).epsilon(0.01));
  }
  CHECK(p.value(1, 0) == 3.0);
}

TEST_CASE("few-shot subsample sizes and determinism") {
  std::vector<Example> corpus = synthetic_corpus({200, 1, 3, 1});
  CHECK(few_shot_subsample(corpus, 0.01, 4).size() == 2);
  CHECK(few_shot_subsample(corpus, 0.005, 4).size() == 1);
  CHECK(few_shot_subsample(corpus, 0.1, 4).size() == 20);
  CHECK(few_shot_subsample(corpus, 1.0, 4).size() == 200);
  const auto a = few_shot_subsample(corpus, 0.05, 9), b = few_shot_subsample(corpus, 0.05, 9);
  const auto c = few_shot_subsample(corpus, 0.05, 10);
  std::vector<std::string> ia, ib, ic;
  for (const auto& e : a) ia.push_back(e.id);
  for (const auto& e : b) ib.push_back(e.id);
  for (const auto& e : c) ic.push_back(e.id);
  CHECK(ia == ib);
  CHECK(ia != ic);
  CHECK(std::set<std::string>(ia.begin(), ia.end()).size() == ia.size());
  CHECK_THROWS_AS(few_shot_subsample(corpus, 0.0, 1), Error);
  CHECK_THROWS_AS(few_shot_subsample(corpus, 1.5, 1), Error);
  CHECK_THROWS_AS(few_shot_subsample({}, 0.5, 1), Error);
}

TEST_CASE("config validation") {
  TrainConfig t;
  CHECK_NOTHROW(t.validate());
  t.data_proportion = 0.0;
  CHECK_THROWS_AS(t.validate(), Error);
  t = {};
  t.beta2 = 1.0;
  CHECK_THROWS_AS(t.validate(), Error);
}

TEST_CASE("single repeated example: loss is nonincreasing after warmup") {
  const std::vector<Example> one = {synthetic_corpus({1, 3, 3, 2}).front()};
  const Vocabulary vocab = build_vocab(one);
  TrainConfig t = fast_train();
  t.epochs = 500;
  t.batch_size = 1;
  t.learning_rate = 3e-4;
  std::vector<double> losses;
  TrainOptions opt;
  opt.on_step = [&](std::size_t, double loss) { losses.push_back(loss); };
  const Model init(tiny_model(vocab));
  const TrainResult r = train(one, {}, vocab, tiny_model(vocab), t, opt);
  REQUIRE(losses.size() == 500);
  std::size_t ok = 0, total = 0;
  for (std::size_t s = t.warmup_steps; s + 1 < losses.size(); ++s, ++total) {
    if (losses[s + 1] <= losses[s]) ++ok;
  }
  const double fraction = static_cast<double>(ok) / static_cast<double>(total);
  MESSAGE("nonincreasing fraction " << fraction << ", final loss " << losses.back());
  CHECK(fraction >= 0.95);

  // Frozen entries never move.
  const Model& trained = r.final_model;
  for (std::size_t c = 0; c < trained.config().d_model; ++c) {
    CHECK(trained.token_embedding.value(0, c) == init.token_embedding.value(0, c));
  }
  for (std::size_t l = 0; l < trained.encoder.size(); ++l) {
    CHECK(trained.encoder[l].gamma.value(0, 0) == 0.0);
  }
}

TEST_CASE("frozen gamma row survives training with type encoding") {
  const std::vector<Example> data = synthetic_corpus({6, 2, 3, 5});
  const Vocabulary vocab = build_vocab(data);
  ModelConfig mc = tiny_model(vocab);
  mc.type_encoding = true;
  TrainConfig t = fast_train();
  t.epochs = 5;
  t.batch_size = 2;
  const TrainResult r = train(data, {}, vocab, mc, t);
  bool moved = false;
  for (const auto& layer : r.final_model.encoder) {
    CHECK(layer.gamma.value(0, 0) == 0.0);
    for (std::size_t k = 1; k < 5; ++k) moved = moved || layer.gamma.value(k, 0) != 0.0;
  }
  CHECK(moved);
  for (std::size_t c = 0; c < mc.d_model; ++c) CHECK(r.final_model.token_embedding.value(0, c) == 0.0);
}

TEST_CASE("training loss falls over the first 100 steps on the bundled corpus") {
  const auto corpus = load_dataset(std::string(DATA_DIR) + "/synthetic_50.jsonl");
  const Vocabulary vocab = build_vocab(corpus);
  for (std::uint64_t seed : {1, 2, 3}) {
    ModelConfig mc = tiny_model(vocab, 64);
    mc.heads = 4;
    mc.d_ff = 128;
    mc.seed = seed;
    TrainConfig t = fast_train();
    t.seed = seed;
    t.epochs = 15;
    std::vector<double> losses;
    TrainOptions opt;
    opt.on_step = [&](std::size_t, double loss) { losses.push_back(loss); };
    opt.on_epoch_end = [&](const Model&, const EpochInfo& info) { return info.step < 100; };
    const TrainResult r = train(corpus, {}, vocab, mc, t, opt);
    REQUIRE(losses.size() >= 100);
    Model initial(r.final_model.config());
    const double before = mean_loss(initial, corpus, vocab, 512);
    Model after = r.final_model;
    const double now = mean_loss(after, corpus, vocab, 512);
    MESSAGE("seed " << seed << ": corpus loss " << before << " -> " << now);
    CHECK(now < before);
    double first = 0.0, last = 0.0;
    for (std::size_t i = 0; i < 10; ++i) {
      first += losses[i];
      last += losses[90 + i];
    }
    CHECK(last < first);
  }
}

TEST_CASE("identical runs give identical logs and parameters") {
  const std::vector<Example> data = synthetic_corpus({8, 1, 2, 9});
  const Vocabulary vocab = build_vocab(data);
  TrainConfig t = fast_train();
  t.epochs = 3;
  t.batch_size = 3;
  t.eval_period = 2;
  t.beam.max_len = 8;
  const TrainResult a = train(data, data, vocab, tiny_model(vocab), t);
  const TrainResult b = train(data, data, vocab, tiny_model(vocab), t);
  REQUIRE(a.log.size() == b.log.size());
  for (std::size_t i = 0; i < a.log.size(); ++i) CHECK(to_jsonl(a.log[i]) == to_jsonl(b.log[i]));
  const auto pa = a.final_model.parameters(), pb = b.final_model.parameters();
  for (std::size_t i = 0; i < pa.size(); ++i) CHECK(pa[i]->value == pb[i]->value);
  // 9 steps: evaluations at 2, 4, 6, 8 and a final one at 9, each logging a
  // train record and a validation record.
  CHECK(a.steps == 9);
  CHECK(a.log.size() == 10);
  CHECK(a.log.front().split == "train");
  CHECK(a.log[1].split == "valid");
  CHECK(a.log[1].bleu.has_value());
}

TEST_CASE("metric records serialize as JSON lines") {
  CHECK(to_jsonl({5, "train", std::nullopt, 1.5}) == R"({"bleu":null,"loss":1.5,"split":"train","step":5})");
  CHECK(to_jsonl({6, "valid", 12.5, 2.0}) == R"({"bleu":12.5,"loss":2.0,"split":"valid","step":6})");
}
