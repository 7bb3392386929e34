// Copyright 2026 The gapkg Authors
// SPDX-License-Identifier: Apache-2.0

#include "gap/vocab.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>

#include "gap/error.hpp"
#include "gap/text.hpp"

namespace gap {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

Vocabulary::Vocabulary() {
  for (auto s : kSpecialTokens) add(std::string(s));
}

Vocabulary::Vocabulary(const std::vector<std::string>& words) : Vocabulary() {
  for (const auto& w : words) {
    if (ids_.count(w)) throw Error(ErrorCode::InvalidConfig, "duplicate vocabulary token '" + w + "'");
    add(w);
  }
}

void Vocabulary::add(std::string token) {
  ids_.emplace(token, static_cast<TokenId>(tokens_.size()));
  tokens_.push_back(std::move(token));
}

TokenId Vocabulary::id(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  return it == ids_.end() ? special::kUnk : it->second;
}

bool Vocabulary::contains(std::string_view token) const { return ids_.count(std::string(token)) > 0; }

const std::string& Vocabulary::token(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw Error(ErrorCode::IndexOutOfRange, "token id " + std::to_string(id));
  }
  return tokens_[static_cast<std::size_t>(id)];
}

std::vector<TokenId> Vocabulary::encode_words(const std::vector<std::string>& words) const {
  std::vector<TokenId> out;
  out.reserve(words.size());
  for (const auto& w : words) out.push_back(id(w));
  return out;
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  for (const auto& t : tokens_) out << t << '\n';
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  if (lines.size() < special::kCount) {
    throw Error(ErrorCode::ParseError, path.string() + ": missing special tokens");
  }
  for (std::size_t i = 0; i < special::kCount; ++i) {
    if (lines[i] != kSpecialTokens[i]) {
      throw LineError(ErrorCode::ParseError, i + 1, "expected special token " + std::string(kSpecialTokens[i]));
    }
  }
  return Vocabulary(std::vector<std::string>(lines.begin() + special::kCount, lines.end()));
}

Vocabulary build_vocab(const std::vector<Example>& corpus, const VocabOptions& options) {
  if (corpus.empty()) throw Error(ErrorCode::EmptyCorpus, "cannot build a vocabulary from nothing");
  // std::map keeps the words sorted, so example order does not matter.
  std::map<std::string, std::size_t> counts;
  auto count = [&](std::string_view text) {
    for (auto& w : tokenize(text)) ++counts[w];
  };
  for (const auto& ex : corpus) {
    for (const auto& e : ex.graph.entities) count(e.label);
    for (const auto& r : ex.graph.relations) count(r.label);
    for (const auto& ref : ex.references) count(ref);
  }
  std::vector<std::string> words;
  for (const auto& [w, c] : counts) {
    const bool is_special =
        std::find(Vocabulary::kSpecialTokens.begin(), Vocabulary::kSpecialTokens.end(), w) !=
        Vocabulary::kSpecialTokens.end();
    if (c >= options.min_freq && !is_special) words.push_back(w);
  }
  return Vocabulary(words);
}

std::vector<TokenId> encode_target(std::string_view text, const Vocabulary& vocab, std::size_t max_len) {
  if (max_len < 2) throw Error(ErrorCode::InvalidConfig, "max output length must be at least 2");
  std::vector<TokenId> ids{special::kBos};
  for (const auto& w : tokenize(text)) ids.push_back(vocab.id(w));
  if (ids.size() + 1 > max_len) ids.resize(max_len - 1);
  ids.push_back(special::kEos);
  return ids;
}

std::string decode_tokens(const std::vector<TokenId>& ids, const Vocabulary& vocab) {
  std::vector<std::string> words;
  for (TokenId id : ids) {
    if (id == special::kEos) break;
    if (id == special::kPad || id == special::kBos) continue;
    words.push_back(vocab.token(id));
  }
  return join_tokens(words);
}

}  // namespace gap
