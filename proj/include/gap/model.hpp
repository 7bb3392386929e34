// Copyright 2026 The gapkg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gap/autodiff.hpp"
#include "gap/kg.hpp"
#include "gap/linearize.hpp"
#include "gap/topology.hpp"
#include "gap/vocab.hpp"

namespace gap {

struct ModelConfig {
  std::size_t vocab_size = 0;
  std::size_t d_model = 128;
  std::size_t heads = 4;
  std::size_t d_ff = 512;
  // Encoder layers, each a global attention sublayer paired with a
  // graph-aware sublayer.
  std::size_t layers = 2;
  std::size_t decoder_layers = 2;
  std::size_t max_positions = 512;
  SlotBudget budget;
  MaskScheme scheme = MaskScheme::parse("er_e");
  bool type_encoding = false;
  // false drops the graph-aware sublayers (plain encoder-decoder baseline).
  bool graph_attention = true;
  double init_std = 0.02;
  std::uint64_t seed = 1;

  std::size_t m_slots() const { return budget.slots(); }
  // Throws InvalidConfig.
  void validate() const;
};

// Everything the encoder needs about one graph, restricted to the live
// components (the padded slots never influence the result).
struct GraphInputs {
  LinearizedGraph lin;
  ComponentTable table;
  Matrix mask;       // active x active, entries 0 or kMaskBlocked
  TypeMatrix types;  // active x active
  std::vector<bool> blocked_rows;

  std::size_t active() const { return table.size(); }
};

// Validates the graph against the config's slot budget and builds the
// linearization, mask and type matrices.
GraphInputs prepare_graph(const KnowledgeGraph& kg, const Vocabulary& vocab, const ModelConfig& config);

struct AttentionBlock {
  Parameter wq, wk, wv, wo;
};

struct EncoderLayerParams {
  AttentionBlock global;
  Parameter ln1_gain, ln1_bias;
  AttentionBlock graph;
  Parameter gamma;  // kTypeCount x 1, row 0 frozen at 0
  Parameter ffn_w1, ffn_b1, ffn_w2, ffn_b2;
  Parameter ln2_gain, ln2_bias;
};

struct DecoderLayerParams {
  AttentionBlock self;
  Parameter ln1_gain, ln1_bias;
  AttentionBlock cross;
  Parameter ln2_gain, ln2_bias;
  Parameter ffn_w1, ffn_b1, ffn_w2, ffn_b2;
  Parameter ln3_gain, ln3_bias;
};

class Model {
 public:
  // Random init: N(0, init_std^2) for embeddings and weights, zero biases,
  // unit layer-norm gains, gamma = 0, <pad> embedding row = 0.
  explicit Model(const ModelConfig& config);

  const ModelConfig& config() const { return config_; }
  ModelConfig& mutable_config() { return config_; }

  // Stable order; names are unique and used by checkpoints.
  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;
  std::size_t parameter_count() const;
  void zero_grad();

  Parameter token_embedding;
  Parameter position_embedding;
  Parameter enc_ln_gain, enc_ln_bias;
  Parameter dec_ln_gain, dec_ln_bias;
  std::vector<EncoderLayerParams> encoder;
  std::vector<DecoderLayerParams> decoder;

 private:
  ModelConfig config_;
};

// Post-softmax graph attention of one encoder layer, averaged over heads,
// over the active components.
struct EncoderTrace {
  std::vector<Matrix> layers;
  std::vector<bool> blocked_rows;
};

// One paired layer: global self-attention + residual + layer norm, then
// pool -> graph attention biased by M + gamma(T) -> gather + residual, then
// feed-forward + residual + layer norm.
Var encoder_layer_forward(Tape& tape, Var x, const GraphInputs& graph, const EncoderLayerParams& layer,
                          const ModelConfig& config, Matrix* trace = nullptr);

// Token states of the final encoder layer (n x d).
Var encode(Tape& tape, const Model& model, const GraphInputs& graph, EncoderTrace* trace = nullptr);

// Causal decoder over `input_ids` with cross-attention to `encoder_states`;
// returns logits (len x vocab). Throws LengthOverflow.
Var decoder_forward(Tape& tape, const Model& model, Var encoder_states, std::span<const TokenId> input_ids);

}  // namespace gap
