// Copyright 2026 The loglab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "loglab/ingestion.hpp"

namespace loglab {

inline constexpr std::int32_t kPadId = 0;
inline constexpr std::int32_t kClsId = 1;
inline constexpr std::int32_t kUnkId = 2;
inline constexpr std::int32_t kNumId = 3;
inline constexpr std::int32_t kHexId = 4;
inline constexpr std::size_t kNumReservedIds = 5;

inline constexpr std::string_view kPadToken = "[PAD]";
inline constexpr std::string_view kClsToken = "[CLS]";
inline constexpr std::string_view kUnkToken = "[UNK]";
inline constexpr std::string_view kNumToken = "[NUM]";
inline constexpr std::string_view kHexToken = "[HEX]";

// Cleaned token list; element 0 is always "[CLS]".
using TokenSequence = std::vector<std::string>;

// Placeholder substitution, applied per token. Hexadecimal values become
// "[HEX]": either "0x"/"0X" followed by hex digits, or a string of >= 6 hex
// digits containing at least one letter (the length gate keeps ordinary
// words like "face" intact). All-digit tokens with value >= 10 become
// "[NUM]". Everything else passes through unchanged, so the substitution
// is idempotent.
std::string substitute_token(std::string token);

// Splits content on '.' ',' ':' '/' and whitespace runs, drops empty
// fragments, substitutes placeholders and prefixes "[CLS]". Empty content
// yields just ["[CLS]"].
TokenSequence tokenize(std::string_view content);

// Exact output length max_len: position 0 stays "[CLS]", content tokens are
// cut at max_len - 1, shortfall is filled with "[PAD]". Throws
// InvalidLength when max_len < 2.
TokenSequence truncate_pad(const TokenSequence& tokens, std::size_t max_len);

// token -> id table. Ids 0..4 are reserved ([PAD], [CLS], [UNK], [NUM],
// [HEX]); corpus tokens follow by descending frequency, ties broken
// lexicographically, so construction is deterministic.
class Vocabulary {
 public:
  Vocabulary();

  static Vocabulary build(const std::vector<TokenSequence>& corpus,
                          std::size_t min_freq = 1);

  // Reserved token strings map to their reserved ids, unknown tokens to
  // [UNK].
  std::int32_t id_of(std::string_view token) const;
  const std::string& token_of(std::int32_t id) const;
  std::size_t size() const { return tokens_.size(); }

  // Tab-separated "token <TAB> id" lines; load reproduces identical ids.
  void save(const std::string& path) const;
  static Vocabulary load(const std::string& path);

 private:
  friend class VocabularyBuilder;
  std::unordered_map<std::string, std::int32_t> ids_;
  std::vector<std::string> tokens_;
};

// Streaming frequency accumulator, for corpora too large to keep all token
// sequences in memory.
class VocabularyBuilder {
 public:
  void add(const TokenSequence& tokens);
  Vocabulary build(std::size_t min_freq = 1) const;

 private:
  std::unordered_map<std::string, std::uint64_t> counts_;
};

// Fixed-length integer form of one message. mask[i] is 1 exactly where
// ids[i] != [PAD]; ids[0] is always [CLS].
struct EncodedSequence {
  std::vector<std::int32_t> ids;
  std::vector<std::uint8_t> mask;
};

EncodedSequence encode(const TokenSequence& tokens, const Vocabulary& vocab,
                       std::size_t max_len);

// Inverse of encode up to truncation and [UNK] substitution: drops [PAD]
// positions and maps ids back through the vocabulary.
TokenSequence decode(const EncodedSequence& encoded, const Vocabulary& vocab);

// Contiguous encoded corpus, row i at ids[i*max_len .. (i+1)*max_len).
struct EncodedDataset {
  std::size_t count = 0;
  std::size_t max_len = 0;
  std::vector<std::int32_t> ids;
  std::vector<std::uint8_t> mask;

  std::span<const std::int32_t> row_ids(std::size_t i) const {
    return {ids.data() + i * max_len, max_len};
  }
  std::span<const std::uint8_t> row_mask(std::size_t i) const {
    return {mask.data() + i * max_len, max_len};
  }
};

EncodedDataset encode_all(const std::vector<LogRecord>& records,
                          const Vocabulary& vocab, std::size_t max_len);

}  // namespace loglab
