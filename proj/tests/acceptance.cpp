// Copyright 2026 The gapkg Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "gap/attention.hpp"
#include "gap/dataset.hpp"
#include "gap/experiment.hpp"
#include "gap/metrics.hpp"
#include "gap/model.hpp"
#include "gap/trace.hpp"
#include "gap/train.hpp"
#include "gradcheck.hpp"
#include "oracles.hpp"

using namespace gap;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances and limits.
constexpr std::size_t kOracleGraphs = 200;
constexpr double kOracleSeconds = 10.0;
constexpr std::size_t kKernelSeeds = 100;
constexpr double kKernelTol = 1e-12;
constexpr double kGradTol = 1e-4;
constexpr double kGradSeconds = 120.0;
constexpr double kLimitTol = 1e-10;
constexpr double kOverfitBleu = 90.0;
constexpr std::size_t kOverfitEpochs = 300;
constexpr double kOverfitSeconds = 15 * 60.0;
constexpr double kMetricTol = 1e-6;
constexpr double kTraceTol = 1e-6;
constexpr std::size_t kTraceGraphs = 20;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

fs::path output_root() {
  const char* root = std::getenv("GAP_OUTPUT_ROOT");
  const fs::path base = root && *root ? fs::path(root) : fs::temp_directory_path() / "gapkg_acceptance";
  return base;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ModelConfig small_model(std::size_t vocab_size, std::size_t d) {
  ModelConfig c;
  c.vocab_size = vocab_size;
  c.d_model = d;
  c.heads = d >= 32 ? 4 : 2;
  c.d_ff = 2 * d;
  c.layers = 2;
  c.decoder_layers = 2;
  c.max_positions = 128;
  return c;
}

Outcome mask_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2024);
  const SlotBudget budget;
  std::size_t mismatches = 0;
  for (std::size_t g = 0; g < kOracleGraphs; ++g) {
    const KnowledgeGraph kg = oracle::random_graph(rng, 6);
    const std::size_t m = budget.slots();
    const TypeMatrix types = build_type_matrix(kg, m);
    const auto expect_types = oracle::types(kg, m);
    for (const auto& name : MaskScheme::names()) {
      const MaskMatrix mask = build_mask(kg, MaskScheme::parse(name), m);
      const auto expect = oracle::mask(kg, MaskScheme::parse(name), m);
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) mismatches += mask.values(i, j) != expect[i][j];
      }
    }
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) mismatches += types.at(i, j) != expect_types[i][j];
    }
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < kOracleSeconds,
          std::to_string(kOracleGraphs) + " graphs x 4 schemes, " + std::to_string(mismatches) + " mismatched entries, " +
              fmt("%.2f s", secs)};
}

Outcome kernels() {
  double worst_attn = 0, worst_pool = 0, worst_type = 0, worst_gather = 0;
  for (std::uint64_t seed = 0; seed < kKernelSeeds; ++seed) {
    std::mt19937_64 rng(seed);
    const std::size_t heads = 1 + seed % 4, n = 2 + seed % 5, m = 1 + seed % 6;
    const Matrix q = oracle::random_matrix(rng, n, 2 * heads), k = oracle::random_matrix(rng, m, 2 * heads);
    const Matrix v = oracle::random_matrix(rng, m, 3 * heads);
    Matrix bias = oracle::random_matrix(rng, n, m);
    std::bernoulli_distribution drop(0.3);
    for (double& b : bias.values()) {
      if (drop(rng)) b = kMaskBlocked;
    }
    worst_attn = std::max(worst_attn, max_abs_diff(multi_head_attention(q, k, v, bias, heads).output,
                                                   oracle::naive_multi_head(q, k, v, &bias, heads)));

    const KnowledgeGraph kg = oracle::random_graph(rng, 6);
    const Vocabulary vocab = build_vocab({Example{"g", kg, {"x"}}});
    const LinearizedGraph lin = linearize(kg, vocab);
    const std::size_t slots = lin.component_count() + 3;
    const Matrix x = oracle::random_matrix(rng, lin.size(), 5);
    worst_pool = std::max(worst_pool, max_abs_diff(pool_components(x, lin.spans, slots),
                                                   oracle::naive_pool(x, lin.spans, slots)));
    const Matrix gs = oracle::random_matrix(rng, slots, 5);
    worst_gather = std::max(worst_gather, max_abs_diff(gather_residual(gs, lin.spans, x),
                                                       oracle::naive_gather(gs, lin.spans, x)));
    const TypeMatrix types = build_type_matrix(kg, slots);
    const Matrix gamma = oracle::random_matrix(rng, kTypeCount, 1);
    const Matrix tb = type_bias(gamma.values(), types);
    for (std::size_t i = 0; i < slots; ++i) {
      for (std::size_t j = 0; j < slots; ++j) {
        const int t = types.at(i, j);
        const double expect = t == 0 ? 0.0 : gamma(static_cast<std::size_t>(t), 0);
        worst_type = std::max(worst_type, std::abs(tb(i, j) - expect));
      }
    }
  }
  const double worst = std::max({worst_attn, worst_pool, worst_type, worst_gather});
  char buf[200];
  std::snprintf(buf, sizeof buf, "%zu seeds; max |diff| attention %.1e, pool %.1e, type_bias %.1e, gather %.1e",
                kKernelSeeds, worst_attn, worst_pool, worst_type, worst_gather);
  return {worst <= kKernelTol, buf};
}

KnowledgeGraph two_triples() {
  KnowledgeGraph kg;
  kg.entities = {{"a", "ada lovelace"}, {"l", "london"}, {"e", "england"}};
  kg.relations = {{"b", "birth place"}, {"c", "country"}};
  kg.triples = {{"a", "b", "l"}, {"l", "c", "e"}};
  return kg;
}

Outcome gradient_check() {
  const auto t0 = std::chrono::steady_clock::now();
  const KnowledgeGraph kg = two_triples();
  const std::vector<Example> ex = {{"g", kg, {"ada lovelace was born in london , england ."}}};
  const Vocabulary vocab = build_vocab(ex);
  ModelConfig cfg = small_model(vocab.size(), 16);
  cfg.max_positions = 32;
  cfg.type_encoding = true;
  cfg.init_std = 0.3;
  Model model(cfg);
  std::mt19937_64 rng(77);
  std::normal_distribution<double> nd(0.0, 0.5);
  for (auto& layer : model.encoder) {
    for (std::size_t t = 1; t < 5; ++t) layer.gamma.value(t, 0) = nd(rng);
  }
  const auto pair = make_training_pairs(ex, vocab, cfg, 64).front();
  const auto r = oracle::check_model_gradients(model, pair);
  const double secs = seconds_since(t0);
  char buf[200];
  std::snprintf(buf, sizeof buf, "%zu entries, worst per-tensor rel err %.2e (%s), %.1f s", r.entries,
                r.max_rel_error, r.worst.c_str(), secs);
  return {r.max_rel_error < kGradTol && secs < kGradSeconds, buf};
}

Outcome mask_as_limit() {
  std::mt19937_64 rng(99);
  double worst = 0.0;
  std::size_t cases = 0;
  const std::size_t d = 8, heads = 2;
  for (int g = 0; g < 50; ++g) {
    const KnowledgeGraph kg = oracle::random_graph(rng, 6);
    const std::size_t m = component_index(kg).size();
    const Matrix pooled = oracle::random_matrix(rng, m, d);
    const Matrix wq = oracle::random_matrix(rng, d, d, 0.5), wk = oracle::random_matrix(rng, d, d, 0.5);
    const Matrix wv = oracle::random_matrix(rng, d, d, 0.5);
    const Matrix q = matmul(pooled, wq), k = matmul(pooled, wk), v = matmul(pooled, wv);
    const TypeMatrix types = build_type_matrix(kg, m);
    for (const auto& name : MaskScheme::names()) {
      const MaskMatrix mask = build_mask(kg, MaskScheme::parse(name), m);
      // Graph attention with gamma = 0 on the tape.
      Tape tape(false);
      const Var gamma = tape.constant(Matrix(kTypeCount, 1));
      const Var bias = tape.type_bias(gamma, types, mask.values);
      const Var out = tape.attention(tape.constant(q), tape.constant(k), tape.constant(v), bias, heads);
      // Unbiased attention over the allowed keys only.
      const auto allowed = oracle::mask(kg, MaskScheme::parse(name), m);
      std::vector<std::vector<std::size_t>> keys(m);
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
          if (allowed[i][j] == 0.0) keys[i].push_back(j);
        }
      }
      worst = std::max(worst, max_abs_diff(tape.value(out), oracle::naive_multi_head(q, k, v, nullptr, heads, &keys)));
      ++cases;
    }
  }
  return {worst <= kLimitTol, std::to_string(cases) + " graph/scheme cases, max |diff| " + fmt("%.1e", worst)};
}

Outcome zero_init_type() {
  const auto corpus = load_dataset(std::string(DATA_DIR) + "/synthetic_50.jsonl");
  const Vocabulary vocab = build_vocab(corpus);
  std::size_t compared = 0, differing = 0;
  for (const auto& name : MaskScheme::names()) {
    ModelConfig off = small_model(vocab.size(), 16);
    off.scheme = MaskScheme::parse(name);
    ModelConfig on = off;
    on.type_encoding = true;
    const Model a(off), b(on);
    for (std::size_t i = 0; i < 10; ++i) {
      const GraphInputs g = prepare_graph(corpus[i].graph, vocab, off);
      const auto target = encode_target(corpus[i].references.front(), vocab);
      const std::span<const TokenId> in(target.data(), target.size() - 1);
      Tape ta(false), tb(false);
      const Matrix la = ta.value(decoder_forward(ta, a, encode(ta, a, g), in));
      const Matrix lb = tb.value(decoder_forward(tb, b, encode(tb, b, g), in));
      ++compared;
      differing += !(la == lb);
    }
  }
  return {differing == 0, std::to_string(compared) + " forward passes, " + std::to_string(differing) +
                              " not bit-identical"};
}

Outcome overfit() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto corpus = load_dataset(std::string(DATA_DIR) + "/synthetic_50.jsonl");
  const Vocabulary vocab = build_vocab(corpus);
  std::vector<std::vector<std::string>> refs;
  for (const auto& ex : corpus) refs.push_back(ex.references);
  std::string detail;
  std::size_t passed = 0;
  for (std::uint64_t seed : {1, 2, 3}) {
    ModelConfig mc = small_model(vocab.size(), 64);
    mc.d_ff = 128;
    mc.seed = seed;
    TrainConfig tc;
    tc.learning_rate = 1e-3;
    tc.warmup_steps = 20;
    tc.batch_size = 8;
    tc.epochs = kOverfitEpochs;
    tc.eval_period = 1000000;
    tc.seed = seed;
    const BeamConfig greedy{1, 1.0, 48};
    double best = 0.0;
    std::size_t reached = 0;
    TrainOptions opt;
    opt.on_epoch_end = [&](const Model& model, const EpochInfo& info) {
      if (info.epoch % 10 != 0 && info.epoch != kOverfitEpochs) return true;
      const double score = bleu(decode_examples(model, corpus, vocab, greedy), refs);
      best = std::max(best, score);
      if (score >= kOverfitBleu) {
        reached = info.epoch;
        return false;
      }
      return true;
    };
    train(corpus, {}, vocab, mc, tc, opt);
    passed += reached > 0;
    detail += "seed " + std::to_string(seed) + ": " +
              (reached ? "BLEU " + fmt("%.1f", best) + " at epoch " + std::to_string(reached)
                       : "best BLEU " + fmt("%.1f", best)) +
              "; ";
  }
  const double secs = seconds_since(t0);
  detail += fmt("%.0f s", secs);
  return {passed == 3 && secs < kOverfitSeconds, std::to_string(passed) + "/3 seeds; " + detail};
}

RunConfig harness_config(const fs::path& out) {
  RunConfig cfg;
  cfg.model.d_model = 16;
  cfg.model.heads = 2;
  cfg.model.d_ff = 32;
  cfg.model.layers = 1;
  cfg.model.decoder_layers = 1;
  cfg.model.max_positions = 96;
  cfg.train.learning_rate = 1e-3;
  cfg.train.warmup_steps = 5;
  cfg.train.batch_size = 8;
  cfg.train.epochs = 1;
  cfg.train.eval_period = 1000000;
  cfg.train.beam = {1, 1.0, 20};
  cfg.output_dir = out;
  return cfg;
}

Outcome ablation_shape() {
  const auto corpus = load_dataset(std::string(DATA_DIR) + "/synthetic_50.jsonl");
  Splits s;
  s.train = corpus;
  s.valid.assign(corpus.begin(), corpus.begin() + 10);
  const fs::path root = output_root();
  fs::remove_all(root / "ablate");
  fs::remove_all(root / "few-shot");
  const auto cells = run_ablation_grid(harness_config(root / "ablate"), s);
  std::set<std::pair<std::string, bool>> seen;
  bool files = fs::exists(root / "ablate" / "ablation.tsv");
  for (const auto& c : cells) {
    seen.insert({c.scheme, c.type_encoding});
    files = files && fs::exists(c.run.dir / "report.json") && fs::exists(c.run.dir / "best.ckpt");
  }
  std::size_t table_rows = 0;
  {
    std::istringstream tsv(slurp(root / "ablate" / "ablation.tsv"));
    std::string line;
    while (std::getline(tsv, line)) ++table_rows;
  }
  const auto points = run_few_shot(harness_config(root / "few-shot"), s);
  std::vector<std::size_t> sizes;
  for (const auto& p : points) sizes.push_back(p.run.train_examples);
  const bool few_ok = points.size() == 4 && points[0].proportion == 0.005 && points[3].proportion == 0.1 &&
                      sizes == std::vector<std::size_t>{1, 1, 3, 5} && fs::exists(root / "few-shot" / "few_shot.tsv");
  return {cells.size() == 8 && seen.size() == 8 && files && table_rows == 5 && few_ok,
          std::to_string(seen.size()) + " distinct ablation cells, table rows " + std::to_string(table_rows) +
              "; few-shot train sizes " + std::to_string(sizes.size() > 0 ? sizes[0] : 0) + "/" +
              std::to_string(sizes.size() > 1 ? sizes[1] : 0) + "/" + std::to_string(sizes.size() > 2 ? sizes[2] : 0) +
              "/" + std::to_string(sizes.size() > 3 ? sizes[3] : 0) + " under " + root.string()};
}

Outcome metric_fidelity() {
  std::vector<std::string> failures;
  auto expect = [&](bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  };
  auto near = [](double a, double b) { return std::abs(a - b) <= kMetricTol; };
  expect(bleu({"the cat sat on the mat"}, std::vector<std::string>{"the cat sat on the mat"}) == 100.0, "identical");
  expect(bleu({"aenir"}, std::vector<std::string>{"aenir"}) == 100.0, "identical single word");
  expect(near(bleu({"the the the cat"}, std::vector<std::string>{"the cat sat"}), 100.0 * std::pow(36.0, -0.25)),
         "clipped precision");
  expect(near(bleu({"the cat"}, std::vector<std::string>{"the cat sat on the mat"}), 100.0 * std::exp(-2.0)),
         "brevity penalty");
  expect(near(bleu({"a b c d", "x y"}, std::vector<std::string>{"a b c d", "x z"}),
              100.0 * std::pow(5.0 / 6.0 * 3.0 / 4.0, 0.25)),
         "corpus pooling");
  expect(bleu({"x y z"}, std::vector<std::string>{"a b c"}) == 0.0, "no overlap");

  KnowledgeGraph kg;
  kg.entities = {{"a", "aenir"}, {"g", "garth nix"}};
  kg.relations = {{"r", "author"}};
  kg.triples = {{"a", "r", "g"}};
  const std::string ref = "aenir was written by garth nix";
  expect(entity_accuracy(kg, "aenir is a novel", ref) == 50.0, "entity 50");
  expect(entity_accuracy(kg, ref, ref) == 100.0, "entity 100");
  expect(entity_accuracy(kg, "aenir by garth nix", "aenir is a novel") == 200.0, "entity unclipped 200");
  std::string detail = "BLEU and entity-accuracy hand cases";
  for (const auto& f : failures) detail += "; failed: " + f;
  return {failures.empty(), detail};
}

Outcome trace_validity() {
  std::mt19937_64 rng(404);
  double worst = 0.0;
  std::size_t rows = 0, blocked = 0, bad_blocked = 0;
  for (std::size_t g = 0; g < kTraceGraphs; ++g) {
    const KnowledgeGraph kg = oracle::random_graph(rng, 6);
    const Vocabulary vocab = build_vocab({Example{"g", kg, {"x"}}});
    for (const auto& name : MaskScheme::names()) {
      ModelConfig cfg = small_model(vocab.size(), 16);
      cfg.scheme = MaskScheme::parse(name);
      cfg.type_encoding = g % 2 == 1;
      cfg.seed = g + 1;
      cfg.init_std = 0.5;
      Model model(cfg);
      for (auto& layer : model.encoder) {
        for (std::size_t t = 1; t < 5; ++t) layer.gamma.value(t, 0) = std::normal_distribution<double>(0, 1)(rng);
      }
      const AttentionTrace t = trace_attention(model, prepare_graph(kg, vocab, cfg), "g");
      for (const Matrix& w : t.layers) {
        for (std::size_t i = 0; i < w.rows(); ++i) {
          double sum = 0.0;
          bool nonzero = false;
          for (double x : w.row(i)) {
            sum += x;
            nonzero = nonzero || x != 0.0;
          }
          ++rows;
          if (t.blocked_rows[i]) {
            ++blocked;
            bad_blocked += nonzero;
          } else {
            worst = std::max(worst, std::abs(sum - 1.0));
          }
        }
      }
    }
  }
  char buf[200];
  std::snprintf(buf, sizeof buf, "%zu rows (%zu blocked, %zu nonzero blocked), max |row sum - 1| %.1e", rows, blocked,
                bad_blocked, worst);
  return {worst <= kTraceTol && bad_blocked == 0 && blocked > 0, buf};
}

Outcome determinism() {
  const auto corpus = load_dataset(std::string(DATA_DIR) + "/synthetic_50.jsonl");
  Splits s;
  s.train.assign(corpus.begin(), corpus.begin() + 20);
  s.valid.assign(corpus.begin() + 20, corpus.begin() + 26);
  const fs::path root = output_root() / "determinism";
  fs::remove_all(root);
  RunConfig cfg = harness_config(root / "a");
  cfg.model.type_encoding = true;
  cfg.train.epochs = 3;
  cfg.train.eval_period = 4;
  run_experiment(cfg, s);
  cfg.output_dir = root / "b";
  run_experiment(cfg, s);
  std::size_t same = 0;
  const std::vector<std::string> files = {"metrics.jsonl", "best.ckpt", "last.ckpt", "predictions.jsonl",
                                          "report.json", "vocab.txt"};
  for (const auto& f : files) {
    const std::string a = slurp(root / "a" / f), b = slurp(root / "b" / f);
    same += !a.empty() && a == b;
  }
  return {same == files.size(), std::to_string(same) + "/" + std::to_string(files.size()) + " artifacts byte-identical"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"mask/type oracle equivalence", mask_oracle},
      {"kernel reference equivalence", kernels},
      {"full-model gradient check", gradient_check},
      {"mask-as-limit", mask_as_limit},
      {"zero-init type equivalence", zero_init_type},
      {"overfit smoke test", overfit},
      {"ablation and few-shot harness shape", ablation_shape},
      {"metric fidelity", metric_fidelity},
      {"trace validity", trace_validity},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("[%s] %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failed;
}
