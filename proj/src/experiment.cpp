// Copyright 2026 The gapkg Authors
// SPDX-License-Identifier: Apache-2.0

#include "gap/experiment.hpp"

#include <cstdio>
#include <fstream>

#include "gap/checkpoint.hpp"
#include "gap/config_json.hpp"
#include "gap/dataset.hpp"
#include "gap/error.hpp"

namespace gap {

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << text;
}

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::string fmt(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *v);
  return buf;
}

}  // namespace

Splits load_splits(const std::filesystem::path& train_path, const std::filesystem::path& valid_path,
                   const std::filesystem::path& test_path, const SlotBudget& budget) {
  Splits s;
  s.train = load_dataset(train_path, budget);
  s.valid = load_dataset(valid_path, budget);
  if (!test_path.empty()) s.test = load_dataset(test_path, budget);
  return s;
}

nlohmann::json run_config_json(const RunConfig& cfg) {
  nlohmann::json j;
  j["code_version"] = kCodeVersion;
  j["model"] = to_json(cfg.model);
  j["train"] = to_json(cfg.train);
  j["seed"] = cfg.train.seed;
  j["min_freq"] = cfg.min_freq;
  if (cfg.vocab_path) j["vocab_path"] = cfg.vocab_path->string();
  return j;
}

RunResult run_experiment(const RunConfig& cfg, const Splits& splits) {
  if (splits.train.empty()) throw Error(ErrorCode::EmptyCorpus, "empty training split");
  std::filesystem::create_directories(cfg.output_dir);

  Vocabulary vocab;
  if (cfg.vocab_path) {
    vocab = Vocabulary::load(*cfg.vocab_path);
  } else {
    vocab = build_vocab(splits.train, VocabOptions{cfg.min_freq});
  }
  ModelConfig mc = cfg.model;
  mc.vocab_size = vocab.size();
  RunConfig written = cfg;
  written.model = mc;
  write_text(cfg.output_dir / "config.json", run_config_json(written).dump(2) + "\n");
  vocab.save(cfg.output_dir / "vocab.txt");

  TrainOptions options;
  options.output_dir = cfg.output_dir;
  TrainResult trained = train(splits.train, splits.valid, vocab, mc, cfg.train, options);
  if (!trained.best_bleu) save_checkpoint(trained.best_model, cfg.output_dir / "best.ckpt");

  RunResult result;
  result.dir = cfg.output_dir;
  result.best_valid_bleu = trained.best_bleu;
  result.steps = trained.steps;
  result.train_examples = cfg.train.data_proportion < 1.0
                              ? few_shot_subsample(splits.train, cfg.train.data_proportion, cfg.train.seed).size()
                              : splits.train.size();

  const auto& test = splits.test.empty() ? splits.valid : splits.test;
  result.hypotheses = decode_examples(trained.best_model, test, vocab, cfg.train.beam);
  result.test = evaluate_predictions(test, result.hypotheses);

  std::string predictions;
  for (std::size_t i = 0; i < test.size(); ++i) {
    nlohmann::json p;
    p["example_id"] = test[i].id;
    p["hypothesis"] = result.hypotheses[i];
    p["reference"] = test[i].references.front();
    p["entity_accuracy"] = optional_json(result.test.entity_accuracy[i]);
    predictions += p.dump() + "\n";
  }
  write_text(cfg.output_dir / "predictions.jsonl", predictions);

  nlohmann::json report;
  report["bleu"] = result.test.bleu;
  report["entity_accuracy"] = optional_json(result.test.mean_entity_accuracy);
  report["examples"] = result.test.examples;
  report["best_valid_bleu"] = optional_json(result.best_valid_bleu);
  report["best_step"] = trained.best_step;
  report["steps"] = trained.steps;
  report["train_examples"] = result.train_examples;
  write_text(cfg.output_dir / "report.json", report.dump(2) + "\n");
  return result;
}

std::vector<AblationCell> run_ablation_grid(const RunConfig& base, const Splits& splits) {
  std::vector<AblationCell> cells;
  std::string table = "scheme\tbleu_notype\tbleu_type\tentity_notype\tentity_type\n";
  for (const std::string& scheme : {std::string("er_er"), std::string("er_e"), std::string("er_none"),
                                    std::string("e_e")}) {
    std::string line = scheme;
    std::string entity;
    for (bool type : {false, true}) {
      RunConfig cfg = base;
      cfg.model.scheme = MaskScheme::parse(scheme);
      cfg.model.type_encoding = type;
      cfg.model.graph_attention = true;
      cfg.output_dir = base.output_dir / (scheme + (type ? "_type" : "_notype"));
      AblationCell cell{scheme, type, run_experiment(cfg, splits)};
      line += "\t" + fmt(cell.run.test.bleu);
      entity += "\t" + fmt(cell.run.test.mean_entity_accuracy);
      cells.push_back(std::move(cell));
    }
    table += line + entity + "\n";
  }
  write_text(base.output_dir / "ablation.tsv", table);
  return cells;
}

std::vector<FewShotPoint> run_few_shot(const RunConfig& base, const Splits& splits,
                                       const std::vector<double>& proportions) {
  std::vector<FewShotPoint> points;
  std::string table = "proportion\ttrain_examples\tbleu\tentity_accuracy\n";
  for (double p : proportions) {
    RunConfig cfg = base;
    cfg.train.data_proportion = p;
    char name[32];
    std::snprintf(name, sizeof name, "p%g", p);
    cfg.output_dir = base.output_dir / name;
    FewShotPoint point{p, run_experiment(cfg, splits)};
    char row[128];
    std::snprintf(row, sizeof row, "%g\t%zu\t%s\t%s\n", p, point.run.train_examples,
                  fmt(point.run.test.bleu).c_str(), fmt(point.run.test.mean_entity_accuracy).c_str());
    table += row;
    points.push_back(std::move(point));
  }
  write_text(base.output_dir / "few_shot.tsv", table);
  return points;
}

std::string SizeBucket::name() const {
  if (max_triples == 0) return std::to_string(min_triples) + "+";
  return std::to_string(min_triples) + "-" + std::to_string(max_triples);
}

std::vector<BucketScore> bucket_scores(const std::vector<Example>& examples,
                                       const std::vector<std::string>& hypotheses,
                                       const std::vector<SizeBucket>& buckets) {
  if (examples.size() != hypotheses.size()) {
    throw Error(ErrorCode::ShapeMismatch, "one hypothesis per example expected");
  }
  std::vector<BucketScore> out;
  for (const SizeBucket& b : buckets) {
    std::vector<std::string> hyps;
    std::vector<std::vector<std::string>> refs;
    for (std::size_t i = 0; i < examples.size(); ++i) {
      const std::size_t n = examples[i].graph.triples.size();
      if (n < b.min_triples || (b.max_triples != 0 && n > b.max_triples)) continue;
      hyps.push_back(hypotheses[i]);
      refs.push_back(examples[i].references);
    }
    BucketScore s{b, hyps.size(), std::nullopt};
    if (!hyps.empty()) s.bleu = bleu(hyps, refs);
    out.push_back(s);
  }
  return out;
}

std::vector<BucketScore> run_size_buckets(const RunConfig& cfg, const Splits& splits,
                                          const std::vector<SizeBucket>& buckets) {
  const RunResult run = run_experiment(cfg, splits);
  const auto& test = splits.test.empty() ? splits.valid : splits.test;
  auto scores = bucket_scores(test, run.hypotheses, buckets);
  std::string table = "bucket\texamples\tbleu\n";
  for (const auto& s : scores) {
    table += s.bucket.name() + "\t" + std::to_string(s.examples) + "\t" + fmt(s.bleu) + "\n";
  }
  write_text(cfg.output_dir / "buckets.tsv", table);
  return scores;
}

}  // namespace gap
