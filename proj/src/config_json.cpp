// Copyright 2026 The gapkg Authors
// SPDX-License-Identifier: Apache-2.0

#include "gap/config_json.hpp"

namespace gap {

using nlohmann::json;

namespace {

template <typename T>
void read(const json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

}  // namespace

json to_json(const ModelConfig& c) {
  return json{{"vocab_size", c.vocab_size},
              {"d_model", c.d_model},
              {"heads", c.heads},
              {"d_ff", c.d_ff},
              {"layers", c.layers},
              {"decoder_layers", c.decoder_layers},
              {"max_positions", c.max_positions},
              {"num_nodes", c.budget.num_nodes},
              {"num_relations", c.budget.num_relations},
              {"scheme", c.scheme.name()},
              {"type_encoding", c.type_encoding},
              {"graph_attention", c.graph_attention},
              {"init_std", c.init_std},
              {"seed", c.seed}};
}

json to_json(const BeamConfig& c) {
  return json{{"beam_size", c.beam_size}, {"length_penalty", c.length_penalty}, {"max_len", c.max_len}};
}

json to_json(const TrainConfig& c) {
  return json{{"learning_rate", c.learning_rate},
              {"warmup_steps", c.warmup_steps},
              {"batch_size", c.batch_size},
              {"epochs", c.epochs},
              {"eval_period", c.eval_period},
              {"beta1", c.beta1},
              {"beta2", c.beta2},
              {"epsilon", c.epsilon},
              {"seed", c.seed},
              {"data_proportion", c.data_proportion},
              {"max_output_len", c.max_output_len},
              {"beam", to_json(c.beam)}};
}

ModelConfig model_config_from_json(const json& j) {
  ModelConfig c;
  read(j, "vocab_size", c.vocab_size);
  read(j, "d_model", c.d_model);
  read(j, "heads", c.heads);
  read(j, "d_ff", c.d_ff);
  read(j, "layers", c.layers);
  read(j, "decoder_layers", c.decoder_layers);
  read(j, "max_positions", c.max_positions);
  read(j, "num_nodes", c.budget.num_nodes);
  read(j, "num_relations", c.budget.num_relations);
  if (j.contains("scheme")) c.scheme = MaskScheme::parse(j.at("scheme").get<std::string>());
  read(j, "type_encoding", c.type_encoding);
  read(j, "graph_attention", c.graph_attention);
  read(j, "init_std", c.init_std);
  read(j, "seed", c.seed);
  return c;
}

BeamConfig beam_config_from_json(const json& j) {
  BeamConfig c;
  read(j, "beam_size", c.beam_size);
  read(j, "length_penalty", c.length_penalty);
  read(j, "max_len", c.max_len);
  return c;
}

TrainConfig train_config_from_json(const json& j) {
  TrainConfig c;
  read(j, "learning_rate", c.learning_rate);
  read(j, "warmup_steps", c.warmup_steps);
  read(j, "batch_size", c.batch_size);
  read(j, "epochs", c.epochs);
  read(j, "eval_period", c.eval_period);
  read(j, "beta1", c.beta1);
  read(j, "beta2", c.beta2);
  read(j, "epsilon", c.epsilon);
  read(j, "seed", c.seed);
  read(j, "data_proportion", c.data_proportion);
  read(j, "max_output_len", c.max_output_len);
  if (j.contains("beam")) c.beam = beam_config_from_json(j.at("beam"));
  return c;
}

}  // namespace gap
