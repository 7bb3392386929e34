// Copyright 2026 The gapkg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "gap/kg.hpp"

namespace gap {

using TokenId = std::int32_t;

namespace special {
inline constexpr TokenId kPad = 0;
inline constexpr TokenId kBos = 1;
inline constexpr TokenId kEos = 2;
inline constexpr TokenId kUnk = 3;
inline constexpr TokenId kHeadSep = 4;
inline constexpr TokenId kRelationSep = 5;
inline constexpr TokenId kTailSep = 6;
inline constexpr std::size_t kCount = 7;
}  // namespace special

// Dense token <-> id mapping. Ids 0..6 are the special tokens in the order
// <pad> <s> </s> <unk> <H> <R> <T>; corpus words follow in byte order.
//
// On disk: one token per line, line number (0-based) = id.
class Vocabulary {
 public:
  static constexpr std::array<std::string_view, special::kCount> kSpecialTokens = {
      "<pad>", "<s>", "</s>", "<unk>", "<H>", "<R>", "<T>"};

  Vocabulary();
  // `words` must not contain special tokens or duplicates.
  explicit Vocabulary(const std::vector<std::string>& words);

  std::size_t size() const { return tokens_.size(); }
  // Unknown tokens map to <unk>.
  TokenId id(std::string_view token) const;
  bool contains(std::string_view token) const;
  const std::string& token(TokenId id) const;
  const std::vector<std::string>& tokens() const { return tokens_; }

  std::vector<TokenId> encode_words(const std::vector<std::string>& words) const;

  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.tokens_ == b.tokens_; }

 private:
  void add(std::string token);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> ids_;
};

struct VocabOptions {
  // Words seen fewer times than this are left out and encode as <unk>.
  std::size_t min_freq = 1;
};

// Throws EmptyCorpus when `corpus` is empty.
Vocabulary build_vocab(const std::vector<Example>& corpus, const VocabOptions& options = {});

// <s> tokens </s>, truncated to `max_len` ids with </s> kept last.
std::vector<TokenId> encode_target(std::string_view text, const Vocabulary& vocab,
                                   std::size_t max_len = 512);

// Joins the words of `ids`, dropping <pad>, <s> and everything from </s> on.
std::string decode_tokens(const std::vector<TokenId>& ids, const Vocabulary& vocab);

}  // namespace gap
