// Copyright 2026 The morphalign Authors
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

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace morphalign {
namespace {

using testing::TempDir;
using testing::fixture;
using testing::write_file;

TEST(ClassifyToken, MarkedSegmentsAreBoundMorphemes) {
  EXPECT_EQ(classify_token("p+-"), TokenClass::BoundMorpheme);
  EXPECT_EQ(classify_token("-s"), TokenClass::BoundMorpheme);
  EXPECT_EQ(classify_token("ne-"), TokenClass::BoundMorpheme);
  EXPECT_EQ(classify_token("casa"), TokenClass::Word);
  EXPECT_EQ(classify_token("ka-te"), TokenClass::Word);
  EXPECT_EQ(classify_token("-"), TokenClass::Word);
}

TEST(Vocabulary, NullIsReservedInSourceVocabulary) {
  auto v = Vocabulary::source();
  EXPECT_EQ(v.encode("<NULL>"), kNullId);
  EXPECT_EQ(v.size(), 1u);
  EXPECT_EQ(v.token_count(), 0u);
  auto t = Vocabulary::target();
  EXPECT_FALSE(t.lookup("<NULL>"));
}

TEST(Vocabulary, IdsFollowFirstOccurrenceAndCountFrequency) {
  auto v = Vocabulary::source();
  EXPECT_EQ(v.add("ne-"), 1u);
  EXPECT_EQ(v.add("casa"), 2u);
  EXPECT_EQ(v.add("ne-"), 1u);
  EXPECT_EQ(v.frequency(1), 2u);
  EXPECT_EQ(v.decode(v.encode("ne-")), "ne-");
  EXPECT_EQ(v.class_of(1), TokenClass::BoundMorpheme);
  EXPECT_THROW(v.encode("zzz-unseen"), UnknownToken);
}

TEST(Tokenize, SplitsOnAsciiWhitespaceOnly) {
  EXPECT_EQ(tokenize("  a\tb  c \r"), (std::vector<std::string>{"a", "b", "c"}));
  // Non-breaking space (U+00A0) stays inside the token.
  EXPECT_EQ(tokenize("a\xC2\xA0" "b c").size(), 2u);
}

TEST(LoadBitext, NahuatlExampleKeepsSegmentsWhole) {
  auto b = testing::bitext_from_lines({"ka-te ome no-kni-wan"}, {"tengo dos hermano -s"});
  ASSERT_EQ(b.pairs.size(), 1u);
  EXPECT_EQ(b.pairs[0].source.size(), 3u);
  EXPECT_EQ(b.pairs[0].target.size(), 4u);
  EXPECT_EQ(b.src_vocab.decode(b.pairs[0].source[0]), "ka-te");
}

TEST(LoadBitext, MinimalPair) {
  TempDir dir("corpus");
  write_file(dir.path() / "s", "a\n");
  write_file(dir.path() / "t", "b\n");
  auto b = load_bitext((dir.path() / "s").string(), (dir.path() / "t").string(), "x-y");
  ASSERT_EQ(b.pairs.size(), 1u);
  EXPECT_EQ(b.pairs[0].source.size(), 1u);
  EXPECT_EQ(b.pairs[0].target.size(), 1u);
  EXPECT_EQ(b.pairs[0].line_no, 1u);
  EXPECT_EQ(b.direction_label, "x-y");
}

TEST(LoadBitext, LineCountMismatchReportsBothCounts) {
  TempDir dir("corpus");
  write_file(dir.path() / "s", "a\nb\n");
  write_file(dir.path() / "t", "a\nb\nc\n");
  try {
    load_bitext((dir.path() / "s").string(), (dir.path() / "t").string(), "x");
    FAIL();
  } catch (const LineCountMismatch& e) {
    EXPECT_EQ(e.source_lines(), 2u);
    EXPECT_EQ(e.target_lines(), 3u);
  }
}

TEST(LoadBitext, EmptyLineNamesFileAndLine) {
  TempDir dir("corpus");
  write_file(dir.path() / "s", "a\n   \n");
  write_file(dir.path() / "t", "a\nb\n");
  try {
    load_bitext((dir.path() / "s").string(), (dir.path() / "t").string(), "x");
    FAIL();
  } catch (const EmptyLine& e) {
    EXPECT_EQ(e.line_no(), 2u);
    EXPECT_NE(std::string(e.what()).find("/s:2"), std::string::npos);
  }
}

TEST(LoadBitext, MissingFileNamesThePath) {
  try {
    load_bitext("/nonexistent/src.txt", fixture("demo.spa"), "x");
    FAIL();
  } catch (const FileNotFound& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/src.txt"), std::string::npos);
  }
}

TEST(LoadBitext, InvalidUtf8IsRejected) {
  TempDir dir("corpus");
  write_file(dir.path() / "s", "ok\nbad\xFF\n");
  write_file(dir.path() / "t", "a\nb\n");
  EXPECT_THROW(load_bitext((dir.path() / "s").string(), (dir.path() / "t").string(), "x"),
               EncodingError);
}

TEST(LoadBitext, ReservedNullSurfaceInSourceIsRejected) {
  EXPECT_THROW(tokenize_parallel({"a <NULL>"}, {"b"}), EncodingError);
}

TEST(LoadBitext, TsvInputMatchesTwoFileInput) {
  TempDir dir("corpus");
  write_file(dir.path() / "p.tsv", "ka-te ome\ttengo dos\nno-kni-wan\thermano -s\n");
  write_file(dir.path() / "s", "ka-te ome\nno-kni-wan\n");
  write_file(dir.path() / "t", "tengo dos\nhermano -s\n");
  auto a = load_bitext_tsv((dir.path() / "p.tsv").string(), "x");
  auto b = load_bitext((dir.path() / "s").string(), (dir.path() / "t").string(), "x");
  EXPECT_EQ(a.src_vocab, b.src_vocab);
  EXPECT_EQ(a.tgt_vocab, b.tgt_vocab);
  ASSERT_EQ(a.pairs.size(), b.pairs.size());
  for (std::size_t k = 0; k < a.pairs.size(); ++k) {
    EXPECT_EQ(a.pairs[k].source, b.pairs[k].source);
    EXPECT_EQ(a.pairs[k].target, b.pairs[k].target);
  }
}

TEST(LoadBitext, OverlongPairsAreSkippedWithWarning) {
  auto raw = tokenize_parallel({"a b c", "a"}, {"x", "y"});
  auto b = build_bitext(raw, "x", IngestOptions{2});
  ASSERT_EQ(b.pairs.size(), 1u);
  EXPECT_EQ(b.pairs[0].line_no, 2u);
  ASSERT_EQ(b.warnings.size(), 1u);
  EXPECT_NE(b.warnings[0].find("line 1"), std::string::npos);
}

TEST(Bitext, TokenCountsMatchFrequencyTotals) {
  auto b = testing::synth_bitext();
  EXPECT_EQ(source_token_count(b), b.src_vocab.total_frequency());
  EXPECT_EQ(target_token_count(b), b.tgt_vocab.total_frequency());
  std::size_t sum = 0;
  for (const auto& p : b.pairs) sum += p.source.size();
  EXPECT_EQ(source_token_count(b), sum);
}

TEST(Bitext, EncodeRoundTripsEverySurfaceOfTheFixture) {
  auto b = testing::synth_bitext();
  for (TokenId id = 1; id < b.src_vocab.size(); ++id)
    EXPECT_EQ(b.src_vocab.encode(b.src_vocab.decode(id)), id);
  for (TokenId id = 1; id < b.tgt_vocab.size(); ++id)
    EXPECT_EQ(b.tgt_vocab.encode(b.tgt_vocab.decode(id)), id);
}

TEST(Bitext, IngestionIsDeterministic) {
  auto a = testing::synth_bitext();
  auto b = testing::synth_bitext();
  EXPECT_EQ(a.src_vocab, b.src_vocab);
  EXPECT_EQ(a.tgt_vocab, b.tgt_vocab);
  for (std::size_t k = 0; k < a.pairs.size(); ++k)
    EXPECT_EQ(a.pairs[k].source, b.pairs[k].source);
}

TEST(EncodeBitext, ClosedVocabularyRejectsUnseenTokens) {
  auto train = testing::bitext_from_lines({"a b"}, {"x y"});
  auto raw = tokenize_parallel({"a c"}, {"x"});
  EXPECT_THROW(encode_bitext(raw, train.src_vocab, train.tgt_vocab, "l", false),
               UnknownToken);
  auto open = encode_bitext(raw, train.src_vocab, train.tgt_vocab, "l", true);
  EXPECT_EQ(open.pairs[0].source[1], train.src_vocab.size());
}

}  // namespace
}  // namespace morphalign
