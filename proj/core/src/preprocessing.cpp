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

#include "loglab/preprocessing.hpp"

#include <algorithm>
#include <fstream>

#include "loglab/errors.hpp"

namespace loglab {
namespace {

bool is_split_char(char c) {
  return c == '.' || c == ',' || c == ':' || c == '/' || c == ' ' ||
         c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f';
}

bool is_hex_digit(char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') ||
         (c >= 'A' && c <= 'F');
}

bool is_hex_token(std::string_view t) {
  if (t.size() >= 3 && t[0] == '0' && (t[1] == 'x' || t[1] == 'X')) {
    return std::all_of(t.begin() + 2, t.end(), is_hex_digit);
  }
  if (t.size() < 6) return false;
  bool has_letter = false;
  for (char c : t) {
    if (!is_hex_digit(c)) return false;
    has_letter |= c > '9';
  }
  return has_letter;
}

// All digits and value >= 10, i.e. at least two digits after leading
// zeros. Length-based so arbitrarily long digit runs never overflow.
bool is_large_number(std::string_view t) {
  if (t.empty()) return false;
  for (char c : t) {
    if (c < '0' || c > '9') return false;
  }
  std::size_t first = t.find_first_not_of('0');
  if (first == std::string_view::npos) return false;  // all zeros
  return t.size() - first >= 2;
}

bool is_reserved_token(std::string_view t) {
  return t == kPadToken || t == kClsToken || t == kUnkToken ||
         t == kNumToken || t == kHexToken;
}

std::int32_t reserved_id(std::string_view t) {
  if (t == kPadToken) return kPadId;
  if (t == kClsToken) return kClsId;
  if (t == kUnkToken) return kUnkId;
  if (t == kNumToken) return kNumId;
  return kHexId;
}

}  // namespace

std::string substitute_token(std::string token) {
  if (is_hex_token(token)) return std::string(kHexToken);
  if (is_large_number(token)) return std::string(kNumToken);
  return token;
}

TokenSequence tokenize(std::string_view content) {
  TokenSequence tokens;
  tokens.emplace_back(kClsToken);
  std::size_t i = 0;
  const std::size_t n = content.size();
  while (i < n) {
    while (i < n && is_split_char(content[i])) ++i;
    const std::size_t begin = i;
    while (i < n && !is_split_char(content[i])) ++i;
    if (i > begin) {
      tokens.push_back(
          substitute_token(std::string(content.substr(begin, i - begin))));
    }
  }
  return tokens;
}

TokenSequence truncate_pad(const TokenSequence& tokens, std::size_t max_len) {
  if (max_len < 2) {
    throw InvalidLength("max_len must be >= 2, got " +
                        std::to_string(max_len));
  }
  TokenSequence out;
  out.reserve(max_len);
  const std::size_t keep = std::min(tokens.size(), max_len);
  out.assign(tokens.begin(), tokens.begin() + keep);
  out.resize(max_len, std::string(kPadToken));
  return out;
}

Vocabulary::Vocabulary() {
  tokens_ = {std::string(kPadToken), std::string(kClsToken),
             std::string(kUnkToken), std::string(kNumToken),
             std::string(kHexToken)};
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    ids_.emplace(tokens_[i], static_cast<std::int32_t>(i));
  }
}

Vocabulary Vocabulary::build(const std::vector<TokenSequence>& corpus,
                             std::size_t min_freq) {
  VocabularyBuilder builder;
  for (const auto& seq : corpus) builder.add(seq);
  return builder.build(min_freq);
}

std::int32_t Vocabulary::id_of(std::string_view token) const {
  const auto it = ids_.find(std::string(token));
  return it == ids_.end() ? kUnkId : it->second;
}

const std::string& Vocabulary::token_of(std::int32_t id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw ShapeMismatch("token id " + std::to_string(id) + " out of range");
  }
  return tokens_[id];
}

void Vocabulary::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    out << tokens_[i] << '\t' << i << '\n';
  }
  if (!out) throw IoError("write error on '" + path + "'");
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  Vocabulary vocab;
  std::string line;
  std::size_t expected = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw IoError("malformed vocabulary line '" + line + "'");
    }
    const std::string token = line.substr(0, tab);
    const std::size_t id = std::stoull(line.substr(tab + 1));
    if (id != expected) {
      throw IoError("vocabulary ids not contiguous at '" + line + "'");
    }
    if (expected < kNumReservedIds) {
      if (token != vocab.tokens_[expected]) {
        throw IoError("reserved token mismatch at id " +
                      std::to_string(expected));
      }
    } else {
      vocab.tokens_.push_back(token);
      if (!vocab.ids_.emplace(token, static_cast<std::int32_t>(id)).second) {
        throw IoError("duplicate vocabulary token '" + token + "'");
      }
    }
    ++expected;
  }
  if (expected < kNumReservedIds) {
    throw IoError("vocabulary file '" + path + "' is truncated");
  }
  return vocab;
}

void VocabularyBuilder::add(const TokenSequence& tokens) {
  for (const auto& token : tokens) {
    if (!is_reserved_token(token)) ++counts_[token];
  }
}

Vocabulary VocabularyBuilder::build(std::size_t min_freq) const {
  std::vector<std::pair<std::string_view, std::uint64_t>> order;
  order.reserve(counts_.size());
  for (const auto& [token, count] : counts_) {
    if (count >= min_freq) order.emplace_back(token, count);
  }
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });

  Vocabulary vocab;
  vocab.tokens_.reserve(kNumReservedIds + order.size());
  for (const auto& [token, count] : order) {
    vocab.ids_.emplace(std::string(token),
                       static_cast<std::int32_t>(vocab.tokens_.size()));
    vocab.tokens_.emplace_back(token);
  }
  return vocab;
}

EncodedSequence encode(const TokenSequence& tokens, const Vocabulary& vocab,
                       std::size_t max_len) {
  const TokenSequence padded = truncate_pad(tokens, max_len);
  EncodedSequence out;
  out.ids.reserve(max_len);
  out.mask.reserve(max_len);
  for (const auto& token : padded) {
    const std::int32_t id =
        is_reserved_token(token) ? reserved_id(token) : vocab.id_of(token);
    out.ids.push_back(id);
    out.mask.push_back(id != kPadId ? 1 : 0);
  }
  return out;
}

TokenSequence decode(const EncodedSequence& encoded, const Vocabulary& vocab) {
  TokenSequence tokens;
  tokens.reserve(encoded.ids.size());
  for (std::int32_t id : encoded.ids) {
    if (id == kPadId) continue;
    tokens.push_back(vocab.token_of(id));
  }
  return tokens;
}

EncodedDataset encode_all(const std::vector<LogRecord>& records,
                          const Vocabulary& vocab, std::size_t max_len) {
  EncodedDataset data;
  data.count = records.size();
  data.max_len = max_len;
  data.ids.reserve(records.size() * max_len);
  data.mask.reserve(records.size() * max_len);
  for (const auto& record : records) {
    const EncodedSequence enc = encode(tokenize(record.content), vocab, max_len);
    data.ids.insert(data.ids.end(), enc.ids.begin(), enc.ids.end());
    data.mask.insert(data.mask.end(), enc.mask.begin(), enc.mask.end());
  }
  return data;
}

}  // namespace loglab
