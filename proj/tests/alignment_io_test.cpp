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

#include <sstream>

#include "test_util.hpp"

namespace morphalign {
namespace {

struct Aligned {
  Bitext bitext;
  AlignedCorpus corpus;
};

Aligned demo_alignment() {
  auto b = testing::bitext_from_lines({"ka-te ome no-kni-wan"}, {"tengo dos hermano -s"},
                                      "nahuatl-spanish");
  AlignedCorpus c;
  c.direction_label = b.direction_label;
  c.stage = Stage::M4;
  Alignment a;
  a.a = {1, 2, 3, 0};
  a.score = -3.5;
  c.pairs.push_back(make_aligned_pair(1, a, 3));
  return {b, c};
}

TEST(AlignmentText, LineFormat) {
  auto x = demo_alignment();
  std::ostringstream os;
  write_alignment_text(os, x.corpus, x.bitext);
  EXPECT_EQ(os.str(), "1 ||| ka-te ome no-kni-wan ||| tengo dos hermano -s ||| 1 2 3 0\n");
}

TEST(AlignmentJsonl, CarriesStageCoverageAndFertility) {
  auto x = demo_alignment();
  std::ostringstream os;
  write_alignment_jsonl(os, x.corpus, x.bitext);
  const auto doc = nlohmann::json::parse(os.str());
  EXPECT_EQ(doc.at("stage"), "m4");
  EXPECT_EQ(doc.at("line_no"), 1);
  EXPECT_EQ(doc.at("alignment"), nlohmann::json::array({1, 2, 3, 0}));
  EXPECT_EQ(doc.at("fertility"), nlohmann::json::array({1, 1, 1, 1}));
  EXPECT_EQ(doc.at("coverage").at(0), nlohmann::json::array({4}));
  EXPECT_DOUBLE_EQ(doc.at("score").get<double>(), -3.5);
}

TEST(AlignmentJsonl, ImpossibleScoreIsNull) {
  auto x = demo_alignment();
  x.corpus.pairs[0].alignment.score = kNegInf;
  std::ostringstream os;
  write_alignment_jsonl(os, x.corpus, x.bitext);
  EXPECT_TRUE(nlohmann::json::parse(os.str()).at("score").is_null());
}

TEST(AlignmentDump, BothFormatsReadBack) {
  auto x = demo_alignment();
  std::ostringstream text, jsonl;
  write_alignment_text(text, x.corpus, x.bitext);
  write_alignment_jsonl(jsonl, x.corpus, x.bitext);
  std::istringstream ti(text.str()), ji(jsonl.str());
  const auto from_text = read_alignment_text(ti);
  const auto from_json = read_alignment_jsonl(ji);
  EXPECT_EQ(from_text.stage, "");
  EXPECT_EQ(from_json.stage, "m4");
  for (const auto* d : {&from_text, &from_json}) {
    auto back = aligned_from_dump(*d, x.bitext, Stage::M4);
    ASSERT_EQ(back.pairs.size(), 1u);
    EXPECT_EQ(back.pairs[0].alignment.a, x.corpus.pairs[0].alignment.a);
    EXPECT_EQ(back.pairs[0].coverage, x.corpus.pairs[0].coverage);
  }
}

TEST(AlignmentDump, MismatchesAreDetected) {
  auto x = demo_alignment();
  auto other = testing::bitext_from_lines({"ka-te ome no-kni-wan"}, {"tengo tres hermano -s"});
  std::ostringstream os;
  write_alignment_text(os, x.corpus, x.bitext);
  std::istringstream in(os.str());
  const auto dump = read_alignment_text(in);
  EXPECT_THROW(aligned_from_dump(dump, other, Stage::M4), CorpusMismatch);

  auto two = testing::bitext_from_lines({"a", "b"}, {"x", "y"});
  EXPECT_THROW(aligned_from_dump(dump, two, Stage::M4), CorpusMismatch);

  auto bad = dump;
  bad.records[0].a = {1, 2, 9, 0};
  EXPECT_THROW(aligned_from_dump(bad, x.bitext, Stage::M4), CorpusMismatch);
  bad = dump;
  bad.records[0].a = {1, 2};
  EXPECT_THROW(aligned_from_dump(bad, x.bitext, Stage::M4), CorpusMismatch);
  bad = dump;
  bad.records[0].line_no = 7;
  EXPECT_THROW(aligned_from_dump(bad, x.bitext, Stage::M4), CorpusMismatch);
}

TEST(AlignmentDump, MalformedLinesAreRejected) {
  std::istringstream text("1 ||| a ||| b\n");
  EXPECT_THROW(read_alignment_text(text), CorpusMismatch);
  std::istringstream text2("1 ||| a ||| b ||| x\n");
  EXPECT_THROW(read_alignment_text(text2), CorpusMismatch);
  std::istringstream jsonl("{\"line_no\": 1}\n");
  EXPECT_THROW(read_alignment_jsonl(jsonl), CorpusMismatch);
}

}  // namespace
}  // namespace morphalign
