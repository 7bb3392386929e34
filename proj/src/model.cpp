// Copyright 2026 The gapkg Authors
// SPDX-License-Identifier: Apache-2.0

#include "gap/model.hpp"

#include <random>

#include "gap/error.hpp"

namespace gap {

void ModelConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); };
  if (vocab_size <= special::kCount) fail("vocabulary has no words");
  if (d_model == 0 || heads == 0 || d_model % heads != 0) fail("d_model must be a positive multiple of heads");
  if (d_ff == 0) fail("d_ff must be positive");
  if (layers == 0 || decoder_layers == 0) fail("layer counts must be positive");
  if (max_positions == 0) fail("max_positions must be positive");
  if (budget.num_nodes == 0 || budget.num_relations == 0) fail("slot budgets must be positive");
  if (!(init_std > 0.0)) fail("init_std must be positive");
}

GraphInputs prepare_graph(const KnowledgeGraph& kg, const Vocabulary& vocab, const ModelConfig& config) {
  const KnowledgeGraph valid = validate_graph(kg, config.budget);
  GraphInputs g;
  g.table = component_index(valid);
  g.lin = linearize(valid, g.table, vocab);
  const MaskMatrix mask = build_mask(g.table, config.scheme, config.m_slots());
  g.mask = mask.active_block();
  g.blocked_rows.assign(mask.blocked_rows.begin(), mask.blocked_rows.begin() + static_cast<long>(mask.active));
  g.types = build_type_matrix(g.table, config.m_slots()).active_block(g.table.size());
  return g;
}

namespace {

struct Initializer {
  std::mt19937_64 rng;
  std::normal_distribution<double> normal;

  Initializer(std::uint64_t seed, double std) : rng(seed), normal(0.0, std) {}

  Parameter gaussian(std::string name, std::size_t rows, std::size_t cols) {
    Parameter p(std::move(name), rows, cols);
    for (double& x : p.value.values()) x = normal(rng);
    return p;
  }
  static Parameter zeros(std::string name, std::size_t rows, std::size_t cols) {
    return Parameter(std::move(name), rows, cols);
  }
  static Parameter ones(std::string name, std::size_t rows, std::size_t cols) {
    Parameter p(std::move(name), rows, cols);
    p.value.fill(1.0);
    return p;
  }
  AttentionBlock block(const std::string& prefix, std::size_t d) {
    return {gaussian(prefix + ".wq", d, d), gaussian(prefix + ".wk", d, d), gaussian(prefix + ".wv", d, d),
            gaussian(prefix + ".wo", d, d)};
  }
};

template <typename Self, typename Out>
void collect(Self& m, std::vector<Out>& out) {
  auto block = [&](auto& b) {
    out.push_back(&b.wq);
    out.push_back(&b.wk);
    out.push_back(&b.wv);
    out.push_back(&b.wo);
  };
  out.push_back(&m.token_embedding);
  out.push_back(&m.position_embedding);
  out.push_back(&m.enc_ln_gain);
  out.push_back(&m.enc_ln_bias);
  out.push_back(&m.dec_ln_gain);
  out.push_back(&m.dec_ln_bias);
  for (auto& l : m.encoder) {
    block(l.global);
    out.push_back(&l.ln1_gain);
    out.push_back(&l.ln1_bias);
    block(l.graph);
    out.push_back(&l.gamma);
    out.push_back(&l.ffn_w1);
    out.push_back(&l.ffn_b1);
    out.push_back(&l.ffn_w2);
    out.push_back(&l.ffn_b2);
    out.push_back(&l.ln2_gain);
    out.push_back(&l.ln2_bias);
  }
  for (auto& l : m.decoder) {
    block(l.self);
    out.push_back(&l.ln1_gain);
    out.push_back(&l.ln1_bias);
    block(l.cross);
    out.push_back(&l.ln2_gain);
    out.push_back(&l.ln2_bias);
    out.push_back(&l.ffn_w1);
    out.push_back(&l.ffn_b1);
    out.push_back(&l.ffn_w2);
    out.push_back(&l.ffn_b2);
    out.push_back(&l.ln3_gain);
    out.push_back(&l.ln3_bias);
  }
}

}  // namespace

Model::Model(const ModelConfig& config) : config_(config) {
  config_.validate();
  const std::size_t d = config_.d_model;
  const std::size_t ff = config_.d_ff;
  Initializer init(config_.seed, config_.init_std);

  token_embedding = init.gaussian("embed.tokens", config_.vocab_size, d);
  for (double& x : token_embedding.value.row(special::kPad)) x = 0.0;
  token_embedding.frozen_rows = {static_cast<std::size_t>(special::kPad)};
  position_embedding = init.gaussian("embed.positions", config_.max_positions, d);
  enc_ln_gain = Initializer::ones("encoder.embed_ln.gain", 1, d);
  enc_ln_bias = Initializer::zeros("encoder.embed_ln.bias", 1, d);
  dec_ln_gain = Initializer::ones("decoder.embed_ln.gain", 1, d);
  dec_ln_bias = Initializer::zeros("decoder.embed_ln.bias", 1, d);

  for (std::size_t i = 0; i < config_.layers; ++i) {
    const std::string p = "encoder." + std::to_string(i);
    EncoderLayerParams l;
    l.global = init.block(p + ".global", d);
    l.ln1_gain = Initializer::ones(p + ".ln1.gain", 1, d);
    l.ln1_bias = Initializer::zeros(p + ".ln1.bias", 1, d);
    l.graph = init.block(p + ".graph", d);
    l.gamma = Initializer::zeros(p + ".graph.gamma", kTypeCount, 1);
    l.gamma.frozen_rows = {0};
    l.ffn_w1 = init.gaussian(p + ".ffn.w1", d, ff);
    l.ffn_b1 = Initializer::zeros(p + ".ffn.b1", 1, ff);
    l.ffn_w2 = init.gaussian(p + ".ffn.w2", ff, d);
    l.ffn_b2 = Initializer::zeros(p + ".ffn.b2", 1, d);
    l.ln2_gain = Initializer::ones(p + ".ln2.gain", 1, d);
    l.ln2_bias = Initializer::zeros(p + ".ln2.bias", 1, d);
    encoder.push_back(std::move(l));
  }
  for (std::size_t i = 0; i < config_.decoder_layers; ++i) {
    const std::string p = "decoder." + std::to_string(i);
    DecoderLayerParams l;
    l.self = init.block(p + ".self", d);
    l.ln1_gain = Initializer::ones(p + ".ln1.gain", 1, d);
    l.ln1_bias = Initializer::zeros(p + ".ln1.bias", 1, d);
    l.cross = init.block(p + ".cross", d);
    l.ln2_gain = Initializer::ones(p + ".ln2.gain", 1, d);
    l.ln2_bias = Initializer::zeros(p + ".ln2.bias", 1, d);
    l.ffn_w1 = init.gaussian(p + ".ffn.w1", d, ff);
    l.ffn_b1 = Initializer::zeros(p + ".ffn.b1", 1, ff);
    l.ffn_w2 = init.gaussian(p + ".ffn.w2", ff, d);
    l.ffn_b2 = Initializer::zeros(p + ".ffn.b2", 1, d);
    l.ln3_gain = Initializer::ones(p + ".ln3.gain", 1, d);
    l.ln3_bias = Initializer::zeros(p + ".ln3.bias", 1, d);
    decoder.push_back(std::move(l));
  }
}

std::vector<Parameter*> Model::parameters() {
  std::vector<Parameter*> out;
  collect(*this, out);
  return out;
}

std::vector<const Parameter*> Model::parameters() const {
  std::vector<const Parameter*> out;
  collect(*this, out);
  return out;
}

std::size_t Model::parameter_count() const {
  std::size_t n = 0;
  for (const Parameter* p : parameters()) n += p->value.size();
  return n;
}

void Model::zero_grad() {
  for (Parameter* p : parameters()) p->zero_grad();
}

namespace {

Var project_attention(Tape& tape, const AttentionBlock& b, Var queries, Var keys, Var bias,
                      std::size_t heads, std::shared_ptr<AttentionOutput>* record = nullptr) {
  const Var q = tape.matmul(queries, tape.parameter(b.wq));
  const Var k = tape.matmul(keys, tape.parameter(b.wk));
  const Var v = tape.matmul(keys, tape.parameter(b.wv));
  const Var a = tape.attention(q, k, v, bias, heads, record);
  return tape.matmul(a, tape.parameter(b.wo));
}

Var feed_forward(Tape& tape, Var x, const Parameter& w1, const Parameter& b1, const Parameter& w2,
                 const Parameter& b2) {
  Var h = tape.add_row(tape.matmul(x, tape.parameter(w1)), tape.parameter(b1));
  h = tape.gelu(h);
  return tape.add_row(tape.matmul(h, tape.parameter(w2)), tape.parameter(b2));
}

Var norm(Tape& tape, Var x, const Parameter& gain, const Parameter& bias) {
  return tape.layer_norm(x, tape.parameter(gain), tape.parameter(bias));
}

}  // namespace

Var encoder_layer_forward(Tape& tape, Var x, const GraphInputs& graph, const EncoderLayerParams& layer,
                          const ModelConfig& config, Matrix* trace) {
  const Var global = project_attention(tape, layer.global, x, x, Var{}, config.heads);
  Var h = norm(tape, tape.add(x, global), layer.ln1_gain, layer.ln1_bias);

  if (config.graph_attention) {
    const std::size_t m = graph.active();
    const Var pooled = tape.pool(h, graph.lin.spans, m);
    const Var bias = config.type_encoding ? tape.type_bias(tape.parameter(layer.gamma), graph.types, graph.mask)
                                          : tape.constant(graph.mask);
    std::shared_ptr<AttentionOutput> record;
    const Var updated = project_attention(tape, layer.graph, pooled, pooled, bias, config.heads, &record);
    if (trace) *trace = head_average(*record);
    h = tape.gather_residual(updated, graph.lin.spans, h);
  }

  const Var ffn = feed_forward(tape, h, layer.ffn_w1, layer.ffn_b1, layer.ffn_w2, layer.ffn_b2);
  return norm(tape, tape.add(h, ffn), layer.ln2_gain, layer.ln2_bias);
}

namespace {

Var embed(Tape& tape, const Model& model, std::span<const TokenId> ids, const Parameter& gain,
          const Parameter& bias) {
  if (ids.size() > model.config().max_positions) {
    throw Error(ErrorCode::LengthOverflow, std::to_string(ids.size()) + " tokens exceed " +
                                               std::to_string(model.config().max_positions) + " positions");
  }
  const Var tok = tape.embedding(tape.parameter(model.token_embedding), ids);
  const Var pos = tape.leading_rows(tape.parameter(model.position_embedding), ids.size());
  return norm(tape, tape.add(tok, pos), gain, bias);
}

}  // namespace

Var encode(Tape& tape, const Model& model, const GraphInputs& graph, EncoderTrace* trace) {
  Var x = embed(tape, model, graph.lin.token_ids, model.enc_ln_gain, model.enc_ln_bias);
  if (trace) {
    trace->layers.clear();
    trace->blocked_rows = graph.blocked_rows;
  }
  for (const auto& layer : model.encoder) {
    Matrix weights;
    x = encoder_layer_forward(tape, x, graph, layer, model.config(), trace ? &weights : nullptr);
    if (trace && model.config().graph_attention) trace->layers.push_back(std::move(weights));
  }
  return x;
}

Var decoder_forward(Tape& tape, const Model& model, Var encoder_states, std::span<const TokenId> input_ids) {
  const std::size_t n = input_ids.size();
  if (n == 0) throw Error(ErrorCode::ShapeMismatch, "empty decoder input");
  const ModelConfig& cfg = model.config();
  Var y = embed(tape, model, input_ids, model.dec_ln_gain, model.dec_ln_bias);

  Matrix causal(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) causal(i, j) = kMaskBlocked;
  }
  const Var causal_bias = tape.constant(std::move(causal));

  for (const auto& layer : model.decoder) {
    const Var self = project_attention(tape, layer.self, y, y, causal_bias, cfg.heads);
    y = norm(tape, tape.add(y, self), layer.ln1_gain, layer.ln1_bias);
    const Var cross = project_attention(tape, layer.cross, y, encoder_states, Var{}, cfg.heads);
    y = norm(tape, tape.add(y, cross), layer.ln2_gain, layer.ln2_bias);
    const Var ffn = feed_forward(tape, y, layer.ffn_w1, layer.ffn_b1, layer.ffn_w2, layer.ffn_b2);
    y = norm(tape, tape.add(y, ffn), layer.ln3_gain, layer.ln3_bias);
  }
  return tape.matmul_bt(y, tape.parameter(model.token_embedding));
}

}  // namespace gap
