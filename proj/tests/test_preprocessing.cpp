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

#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "loglab/errors.hpp"
#include "loglab/ingestion.hpp"
#include "loglab/preprocessing.hpp"
#include "oracles.hpp"

using namespace loglab;

TEST_SUITE("preprocessing") {

TEST_CASE("tokenize splits, substitutes and prefixes [CLS]") {
  CHECK(tokenize("time.c: Detected 3591.142 MHz") ==
        TokenSequence{"[CLS]", "time", "c", "Detected", "[NUM]", "[NUM]",
                      "MHz"});
  CHECK(tokenize("core 3 ok") == TokenSequence{"[CLS]", "core", "3", "ok"});
  CHECK(tokenize("addr 0xDEADBEEF port 8080") ==
        TokenSequence{"[CLS]", "addr", "[HEX]", "port", "[NUM]"});
  CHECK(tokenize("") == TokenSequence{"[CLS]"});
  CHECK(tokenize(" ,.:/  ") == TokenSequence{"[CLS]"});
}

TEST_CASE("substitution rules") {
  CHECK(substitute_token("3591") == "[NUM]");
  CHECK(substitute_token("10") == "[NUM]");
  CHECK(substitute_token("9") == "9");
  CHECK(substitute_token("0009") == "0009");  // value below ten
  CHECK(substitute_token("000010") == "[NUM]");
  CHECK(substitute_token("00000") == "00000");  // zero stays
  CHECK(substitute_token("123456789012345678901234567890") == "[NUM]");
  CHECK(substitute_token("deadbeef") == "[HEX]");
  CHECK(substitute_token("DEADBEEF") == "[HEX]");
  CHECK(substitute_token("face") == "face");    // shorter than the hex gate
  CHECK(substitute_token("0x5") == "[HEX]");
  CHECK(substitute_token("0XAB") == "[HEX]");
  CHECK(substitute_token("0x") == "0x");
  CHECK(substitute_token("0xZZ") == "0xZZ");
  CHECK(substitute_token("123456") == "[NUM]");  // all digits, no letter
  CHECK(substitute_token("Detected") == "Detected");
  CHECK(substitute_token("fs0") == "fs0");
}

TEST_CASE("substitution is idempotent") {
  for (const char* token :
       {"3591", "9", "deadbeef", "face", "0x5", "[NUM]", "[HEX]", "[CLS]",
        "[PAD]", "[UNK]", "MHz", "123456"}) {
    const std::string once = substitute_token(token);
    CHECK(substitute_token(once) == once);
  }
}

TEST_CASE("truncate_pad") {
  const TokenSequence seven = tokenize("time.c: Detected 3591.142 MHz");
  REQUIRE(seven.size() == 7);
  const auto padded = truncate_pad(seven, 12);
  REQUIRE(padded.size() == 12);
  CHECK(padded[0] == "[CLS]");
  CHECK(padded[6] == "MHz");
  for (std::size_t i = 7; i < 12; ++i) CHECK(padded[i] == "[PAD]");

  TokenSequence thirty{"[CLS]"};
  for (int i = 0; i < 29; ++i) thirty.push_back("t" + std::to_string(i));
  const auto cut = truncate_pad(thirty, 20);
  REQUIRE(cut.size() == 20);
  CHECK(cut[0] == "[CLS]");
  CHECK(cut[19] == "t18");  // 19 content tokens survive

  CHECK(truncate_pad({"[CLS]"}, 2) == TokenSequence{"[CLS]", "[PAD]"});
  CHECK_THROWS_AS(truncate_pad({"[CLS]"}, 1), InvalidLength);
  CHECK_THROWS_AS(truncate_pad({"[CLS]"}, 0), InvalidLength);
}

TEST_CASE("vocabulary orders by frequency then token") {
  const std::vector<TokenSequence> corpus = {
      {"[CLS]", "a"}, {"[CLS]", "a"}, {"[CLS]", "b"}};
  const auto vocab = Vocabulary::build(corpus);
  CHECK(vocab.id_of("a") == 5);
  CHECK(vocab.id_of("b") == 6);
  CHECK(vocab.size() == 7);
  CHECK(vocab.id_of("unseen") == kUnkId);
  CHECK(vocab.id_of("[CLS]") == kClsId);
  CHECK(vocab.id_of("[PAD]") == kPadId);

  // ties break lexicographically
  const auto tied = Vocabulary::build({{"[CLS]", "zz", "mm"}});
  CHECK(tied.id_of("mm") == 5);
  CHECK(tied.id_of("zz") == 6);
}

TEST_CASE("vocabulary construction is deterministic") {
  auto spec = make_default_synthetic_spec();
  spec.n_messages = 1500;
  spec.n_failures = 4;
  const auto corpus = generate_synthetic(spec);
  VocabularyBuilder a, b;
  for (const auto& r : corpus.records) {
    a.add(tokenize(r.content));
    b.add(tokenize(r.content));
  }
  const auto va = a.build();
  const auto vb = b.build();
  REQUIRE(va.size() == vb.size());
  for (std::size_t id = 0; id < va.size(); ++id) {
    CHECK(va.token_of(static_cast<std::int32_t>(id)) ==
          vb.token_of(static_cast<std::int32_t>(id)));
  }
}

TEST_CASE("min_freq filters rare tokens") {
  const std::vector<TokenSequence> corpus = {
      {"[CLS]", "common", "rare"}, {"[CLS]", "common"}};
  const auto vocab = Vocabulary::build(corpus, 2);
  CHECK(vocab.id_of("common") == 5);
  CHECK(vocab.id_of("rare") == kUnkId);
  CHECK(vocab.size() == 6);
}

TEST_CASE("vocabulary persists exactly") {
  const auto vocab = Vocabulary::build(
      {{"[CLS]", "alpha", "beta", "alpha", "[NUM]"}});
  const std::string path =
      (std::filesystem::temp_directory_path() / "loglab_vocab.tsv").string();
  vocab.save(path);
  const auto loaded = Vocabulary::load(path);
  REQUIRE(loaded.size() == vocab.size());
  for (std::size_t id = 0; id < vocab.size(); ++id) {
    const auto& token = vocab.token_of(static_cast<std::int32_t>(id));
    CHECK(loaded.id_of(token) == vocab.id_of(token));
  }
  std::remove(path.c_str());
}

TEST_CASE("encode produces exact length, ids and mask") {
  const auto vocab = Vocabulary::build({tokenize("alpha beta 42")});
  const auto enc = encode(tokenize("alpha beta 42"), vocab, 6);
  REQUIRE(enc.ids.size() == 6);
  REQUIRE(enc.mask.size() == 6);
  CHECK(enc.ids[0] == kClsId);
  CHECK(enc.mask == std::vector<std::uint8_t>{1, 1, 1, 1, 0, 0});
  for (std::size_t i = 0; i < 4; ++i) CHECK(enc.ids[i] != kUnkId);
  CHECK(enc.ids[3] == kNumId);

  const auto empty = encode(tokenize(""), vocab, 4);
  CHECK(empty.ids ==
        std::vector<std::int32_t>{kClsId, kPadId, kPadId, kPadId});
  CHECK(empty.mask == std::vector<std::uint8_t>{1, 0, 0, 0});

  const auto unk = encode(tokenize("never seen"), vocab, 4);
  CHECK(unk.ids[1] == kUnkId);
  CHECK(unk.ids[2] == kUnkId);
}

TEST_CASE("decode(encode(x)) recovers tokens up to truncation") {
  auto spec = make_default_synthetic_spec();
  spec.n_messages = 2000;
  spec.n_failures = 10;
  const auto corpus = generate_synthetic(spec);
  VocabularyBuilder builder;
  std::vector<TokenSequence> sequences;
  sequences.reserve(corpus.records.size());
  for (const auto& r : corpus.records) {
    sequences.push_back(tokenize(r.content));
    builder.add(sequences.back());
  }
  const auto vocab = builder.build();

  for (const auto& tokens : sequences) {
    const auto enc = encode(tokens, vocab, 12);
    const auto back = decode(enc, vocab);
    const std::size_t expect = std::min<std::size_t>(tokens.size(), 12);
    REQUIRE(back.size() == expect);
    for (std::size_t i = 0; i < expect; ++i) CHECK(back[i] == tokens[i]);
    // mask law
    for (std::size_t i = 0; i < enc.ids.size(); ++i) {
      CHECK((enc.mask[i] == 1) == (enc.ids[i] != kPadId));
    }
  }
}

TEST_CASE("production tokenizer agrees with the reference") {
  CHECK(testing::oracle_tokenize("time.c: Detected 3591.142 MHz") ==
        tokenize("time.c: Detected 3591.142 MHz"));
  auto spec = make_default_synthetic_spec();
  spec.n_messages = 1000;
  spec.n_failures = 10;
  const auto corpus = generate_synthetic(spec);
  for (const auto& r : corpus.records) {
    CHECK(testing::oracle_tokenize(r.content) == tokenize(r.content));
  }
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const std::string line = testing::random_fuzz_line(seed);
    CHECK(testing::oracle_tokenize(line) == tokenize(line));
  }
}

TEST_CASE("encode_all lays rows out contiguously") {
  std::vector<LogRecord> records(3);
  records[0].content = "a b";
  records[1].content = "c";
  records[2].content = "a";
  const auto vocab = Vocabulary::build(
      {tokenize("a b"), tokenize("c"), tokenize("a")});
  const auto data = encode_all(records, vocab, 4);
  CHECK(data.count == 3);
  CHECK(data.max_len == 4);
  CHECK(data.ids.size() == 12);
  CHECK(data.row_ids(1)[0] == kClsId);
  CHECK(data.row_ids(0)[1] == vocab.id_of("a"));
  CHECK(data.row_mask(1)[2] == 0);
}

}  // TEST_SUITE
