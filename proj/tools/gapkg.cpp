// Copyright 2026 The gapkg Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end: vocabulary preparation, training, evaluation,
// experiment grids, attention traces and their rendering.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gap/checkpoint.hpp"
#include "gap/config_json.hpp"
#include "gap/dataset.hpp"
#include "gap/error.hpp"
#include "gap/experiment.hpp"
#include "gap/heatmap.hpp"
#include "gap/synth.hpp"
#include "gap/trace.hpp"

namespace fs = std::filesystem;
using namespace gap;

namespace {

fs::path default_output(const std::string& name) {
  const char* root = std::getenv("GAP_OUTPUT_ROOT");
  return fs::path(root && *root ? root : "runs") / name;
}

// Options shared by every subcommand that trains.
struct RunFlags {
  std::string train_path, valid_path, test_path;
  std::string config_path;
  std::string vocab_path;
  std::string out;
  std::optional<std::string> scheme;
  bool type_encoding = false;
  bool no_graph = false;
  std::optional<std::size_t> d_model, heads, d_ff, layers, decoder_layers, epochs, batch_size, warmup,
      eval_period, beam, max_len, min_freq, num_nodes, num_relations;
  std::optional<double> lr, proportion;
  std::optional<std::uint64_t> seed;

  void add(CLI::App* app, bool needs_valid = true) {
    app->add_option("--train", train_path, "training split (JSONL)")->required()->check(CLI::ExistingFile);
    auto* v = app->add_option("--valid", valid_path, "validation split (JSONL)")->check(CLI::ExistingFile);
    if (needs_valid) v->required();
    app->add_option("--test", test_path, "test split (JSONL); defaults to the validation split")
        ->check(CLI::ExistingFile);
    app->add_option("--config", config_path, "JSON with \"model\" and \"train\" objects")->check(CLI::ExistingFile);
    app->add_option("--vocab", vocab_path, "vocabulary file to use instead of building one")
        ->check(CLI::ExistingFile);
    app->add_option("--out", out, "output directory");
    app->add_option("--scheme", scheme, "mask scheme: er_er, er_e, er_none or e_e");
    app->add_flag("--type-encoding", type_encoding, "add the learned type bias");
    app->add_flag("--no-graph-attention", no_graph, "plain encoder without graph-aware layers");
    app->add_option("--d-model", d_model);
    app->add_option("--heads", heads);
    app->add_option("--d-ff", d_ff);
    app->add_option("--layers", layers);
    app->add_option("--decoder-layers", decoder_layers);
    app->add_option("--num-nodes", num_nodes);
    app->add_option("--num-relations", num_relations);
    app->add_option("--epochs", epochs);
    app->add_option("--batch-size", batch_size);
    app->add_option("--warmup", warmup);
    app->add_option("--eval-period", eval_period);
    app->add_option("--lr", lr);
    app->add_option("--proportion", proportion, "fraction of the training split to use");
    app->add_option("--seed", seed);
    app->add_option("--beam", beam);
    app->add_option("--max-len", max_len, "maximum generated tokens");
    app->add_option("--min-freq", min_freq);
  }

  RunConfig build(const std::string& name) const {
    RunConfig cfg;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      nlohmann::json j;
      try {
        in >> j;
        if (j.contains("model")) cfg.model = model_config_from_json(j.at("model"));
        if (j.contains("train")) cfg.train = train_config_from_json(j.at("train"));
        if (j.contains("min_freq")) cfg.min_freq = j.at("min_freq").get<std::size_t>();
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, config_path + ": " + e.what());
      }
    }
    auto set = [](auto& field, const auto& value) {
      if (value) field = *value;
    };
    if (scheme) cfg.model.scheme = MaskScheme::parse(*scheme);
    if (type_encoding) cfg.model.type_encoding = true;
    if (no_graph) cfg.model.graph_attention = false;
    set(cfg.model.d_model, d_model);
    set(cfg.model.heads, heads);
    set(cfg.model.d_ff, d_ff);
    set(cfg.model.layers, layers);
    set(cfg.model.decoder_layers, decoder_layers);
    set(cfg.model.budget.num_nodes, num_nodes);
    set(cfg.model.budget.num_relations, num_relations);
    set(cfg.train.epochs, epochs);
    set(cfg.train.batch_size, batch_size);
    set(cfg.train.warmup_steps, warmup);
    set(cfg.train.eval_period, eval_period);
    set(cfg.train.learning_rate, lr);
    set(cfg.train.data_proportion, proportion);
    set(cfg.train.beam.beam_size, beam);
    set(cfg.train.beam.max_len, max_len);
    set(cfg.min_freq, min_freq);
    if (seed) {
      cfg.train.seed = *seed;
      cfg.model.seed = *seed;
    }
    if (!vocab_path.empty()) cfg.vocab_path = vocab_path;
    cfg.output_dir = out.empty() ? default_output(name) : fs::path(out);
    cfg.train.validate();
    return cfg;
  }

  Splits splits(const RunConfig& cfg) const {
    Splits s = load_splits(train_path, valid_path, test_path, cfg.model.budget);
    return s;
  }
};

std::string fmt(const std::optional<double>& v) {
  return v ? std::to_string(*v) : std::string("n/a");
}

void print_result(const RunResult& r) {
  std::cout << "bleu " << r.test.bleu << "  entity_accuracy " << fmt(r.test.mean_entity_accuracy) << "  steps "
            << r.steps << "  dir " << r.dir.string() << '\n';
}

const Example& find_example(const std::vector<Example>& examples, const std::string& id) {
  for (const auto& ex : examples) {
    if (ex.id == id) return ex;
  }
  throw Error(ErrorCode::IndexOutOfRange, "no example with id " + id);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Knowledge-graph-to-text with graph-aware attention"};
  app.require_subcommand(1);

  // prepare-vocab
  std::vector<std::string> vocab_inputs;
  std::string vocab_out = "vocab.txt";
  std::size_t vocab_min_freq = 1;
  auto* prep = app.add_subcommand("prepare-vocab", "build a vocabulary from dataset files");
  prep->add_option("--data", vocab_inputs, "dataset files (JSONL)")->required()->check(CLI::ExistingFile);
  prep->add_option("--out", vocab_out, "vocabulary file");
  prep->add_option("--min-freq", vocab_min_freq);

  RunFlags train_flags, ablate_flags, few_flags, bucket_flags;
  auto* train_cmd = app.add_subcommand("train", "train one model and evaluate it");
  train_flags.add(train_cmd);
  auto* ablate = app.add_subcommand("ablate", "mask scheme x type encoding grid");
  ablate_flags.add(ablate);
  auto* few = app.add_subcommand("few-shot", "train on subsampled fractions of the training split");
  few_flags.add(few);
  std::vector<double> proportions = kFewShotProportions;
  few->add_option("--proportions", proportions, "fractions to run")->delimiter(',');
  auto* buckets = app.add_subcommand("buckets", "score test predictions by graph size");
  bucket_flags.add(buckets);

  // evaluate
  std::string eval_ckpt, eval_vocab, eval_data, eval_out;
  std::size_t eval_beam = 5, eval_max_len = 64;
  auto* eval = app.add_subcommand("evaluate", "decode a dataset with a checkpoint and score it");
  eval->add_option("--checkpoint", eval_ckpt)->required()->check(CLI::ExistingFile);
  eval->add_option("--vocab", eval_vocab)->required()->check(CLI::ExistingFile);
  eval->add_option("--data", eval_data)->required()->check(CLI::ExistingFile);
  eval->add_option("--beam", eval_beam);
  eval->add_option("--max-len", eval_max_len);
  eval->add_option("--out", eval_out, "predictions file (JSONL)");

  // trace
  std::string trace_ckpt, trace_vocab, trace_data, trace_id, trace_out = "trace.json";
  auto* trace = app.add_subcommand("trace", "export graph attention weights for one example");
  trace->add_option("--checkpoint", trace_ckpt)->required()->check(CLI::ExistingFile);
  trace->add_option("--vocab", trace_vocab)->required()->check(CLI::ExistingFile);
  trace->add_option("--data", trace_data)->required()->check(CLI::ExistingFile);
  trace->add_option("--example", trace_id, "example id; defaults to the first")->required(false);
  trace->add_option("--out", trace_out);

  // render
  std::string render_in, render_out, render_format = "text";
  std::size_t render_layer = 0;
  auto* render = app.add_subcommand("render", "draw a trace as a text grid or SVG");
  render->add_option("--trace", render_in)->required()->check(CLI::ExistingFile);
  render->add_option("--layer", render_layer);
  render->add_option("--format", render_format)->check(CLI::IsMember({"text", "svg"}));
  render->add_option("--out", render_out, "output file; stdout when omitted");

  // synth
  SynthOptions synth_opts;
  std::string synth_out = "synthetic.jsonl";
  auto* synth = app.add_subcommand("synth", "write a synthetic corpus");
  synth->add_option("--count", synth_opts.count);
  synth->add_option("--min-triples", synth_opts.min_triples);
  synth->add_option("--max-triples", synth_opts.max_triples);
  synth->add_option("--seed", synth_opts.seed);
  synth->add_option("--out", synth_out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*prep) {
      std::vector<Example> corpus;
      for (const auto& path : vocab_inputs) {
        auto part = load_dataset(path);
        corpus.insert(corpus.end(), part.begin(), part.end());
      }
      const Vocabulary vocab = build_vocab(corpus, VocabOptions{vocab_min_freq});
      vocab.save(vocab_out);
      std::cout << "vocabulary " << vocab.size() << " tokens -> " << vocab_out << '\n';
    } else if (*train_cmd) {
      const RunConfig cfg = train_flags.build("train");
      print_result(run_experiment(cfg, train_flags.splits(cfg)));
    } else if (*ablate) {
      const RunConfig cfg = ablate_flags.build("ablate");
      for (const auto& cell : run_ablation_grid(cfg, ablate_flags.splits(cfg))) {
        std::cout << cell.scheme << (cell.type_encoding ? " +type " : " -type ");
        print_result(cell.run);
      }
    } else if (*few) {
      const RunConfig cfg = few_flags.build("few-shot");
      for (const auto& p : run_few_shot(cfg, few_flags.splits(cfg), proportions)) {
        std::cout << "proportion " << p.proportion << " examples " << p.run.train_examples << "  ";
        print_result(p.run);
      }
    } else if (*buckets) {
      const RunConfig cfg = bucket_flags.build("buckets");
      for (const auto& s : run_size_buckets(cfg, bucket_flags.splits(cfg))) {
        std::cout << s.bucket.name() << " examples " << s.examples << " bleu " << fmt(s.bleu) << '\n';
      }
    } else if (*eval) {
      const Model model = load_checkpoint(eval_ckpt);
      const Vocabulary vocab = Vocabulary::load(eval_vocab);
      const auto data = load_dataset(eval_data, model.config().budget);
      BeamConfig beam;
      beam.beam_size = eval_beam;
      beam.max_len = eval_max_len;
      const auto hyps = decode_examples(model, data, vocab, beam);
      const EvalReport report = evaluate_predictions(data, hyps);
      if (!eval_out.empty()) {
        std::ofstream out(eval_out);
        if (!out) throw Error(ErrorCode::Io, "cannot write " + eval_out);
        for (std::size_t i = 0; i < data.size(); ++i) {
          nlohmann::json p{{"example_id", data[i].id},
                           {"hypothesis", hyps[i]},
                           {"reference", data[i].references.front()}};
          p["entity_accuracy"] =
              report.entity_accuracy[i] ? nlohmann::json(*report.entity_accuracy[i]) : nlohmann::json(nullptr);
          out << p.dump() << '\n';
        }
      }
      std::cout << "bleu " << report.bleu << "  entity_accuracy " << fmt(report.mean_entity_accuracy)
                << "  examples " << report.examples << '\n';
    } else if (*trace) {
      const Model model = load_checkpoint(trace_ckpt);
      const Vocabulary vocab = Vocabulary::load(trace_vocab);
      const auto data = load_dataset(trace_data, model.config().budget);
      if (data.empty()) throw Error(ErrorCode::EmptyInput, "no examples in " + trace_data);
      const Example& ex = trace_id.empty() ? data.front() : find_example(data, trace_id);
      const GraphInputs graph = prepare_graph(ex.graph, vocab, model.config());
      save_trace(trace_attention(model, graph, ex.id), trace_out);
      std::cout << "trace -> " << trace_out << '\n';
    } else if (*render) {
      const AttentionTrace t = load_trace(render_in);
      const std::string text = render_format == "svg" ? render_svg(t, render_layer) : render_text(t, render_layer);
      if (render_out.empty()) {
        std::cout << text;
      } else {
        std::ofstream out(render_out);
        if (!out) throw Error(ErrorCode::Io, "cannot write " + render_out);
        out << text;
      }
    } else if (*synth) {
      save_dataset(synth_out, synthetic_corpus(synth_opts));
      std::cout << synth_opts.count << " examples -> " << synth_out << '\n';
    }
  } catch (const LineError& e) {
    std::cerr << "error [" << to_string(e.code()) << "] line " << e.line() << ": " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
