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

#ifndef MORPHALIGN_ALIGNMENT_IO_HPP
#define MORPHALIGN_ALIGNMENT_IO_HPP

#include <cmath>
#include <cstddef>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "morphalign/aligner.hpp"
#include "morphalign/corpus.hpp"
#include "morphalign/errors.hpp"

namespace morphalign {

// Text dump: one line per pair,
//   line_no ||| source tokens ||| target tokens ||| a_1 ... a_m
// with 0 marking the NULL cept. The JSON-lines variant adds coverage sets,
// fertilities and the score.

inline constexpr std::string_view kDumpSeparator = " ||| ";

namespace detail {

inline std::string join_tokens(const Vocabulary& v, const std::vector<TokenId>& ids) {
  std::string out;
  for (std::size_t k = 0; k < ids.size(); ++k) {
    if (k) out += ' ';
    out += v.decode(ids[k]);
  }
  return out;
}

inline void check_same_length(const AlignedCorpus& aligned, const Bitext& bitext) {
  if (aligned.pairs.size() != bitext.pairs.size())
    throw CorpusMismatch("alignment has " + std::to_string(aligned.pairs.size()) +
                         " records, bitext has " +
                         std::to_string(bitext.pairs.size()) + " pairs");
}

}  // namespace detail

inline void write_alignment_text(std::ostream& os, const AlignedCorpus& aligned,
                                 const Bitext& bitext) {
  detail::check_same_length(aligned, bitext);
  for (std::size_t k = 0; k < aligned.pairs.size(); ++k) {
    const auto& rec = aligned.pairs[k];
    const auto& pair = bitext.pairs[k];
    os << rec.line_no << kDumpSeparator
       << detail::join_tokens(bitext.src_vocab, pair.source) << kDumpSeparator
       << detail::join_tokens(bitext.tgt_vocab, pair.target) << kDumpSeparator;
    for (std::size_t j = 0; j < rec.alignment.a.size(); ++j) {
      if (j) os << ' ';
      os << rec.alignment.a[j];
    }
    os << '\n';
  }
}

inline void write_alignment_jsonl(std::ostream& os, const AlignedCorpus& aligned,
                                  const Bitext& bitext) {
  using nlohmann::json;
  detail::check_same_length(aligned, bitext);
  for (std::size_t k = 0; k < aligned.pairs.size(); ++k) {
    const auto& rec = aligned.pairs[k];
    const auto& pair = bitext.pairs[k];
    json src = json::array(), tgt = json::array();
    for (auto id : pair.source) src.push_back(bitext.src_vocab.decode(id));
    for (auto id : pair.target) tgt.push_back(bitext.tgt_vocab.decode(id));
    json fert = json::array();
    for (const auto& c : rec.coverage) fert.push_back(c.size());
    const double score = rec.alignment.score;
    os << json{{"line_no", rec.line_no},
               {"stage", to_string(aligned.stage)},
               {"source", std::move(src)},
               {"target", std::move(tgt)},
               {"alignment", rec.alignment.a},
               {"coverage", rec.coverage},
               {"fertility", std::move(fert)},
               {"score", std::isfinite(score) ? json(score) : json(nullptr)}}
              .dump()
       << '\n';
  }
}

/// One parsed dump record (surfaces, not ids).
struct DumpRecord {
  std::size_t line_no = 0;
  std::vector<std::string> source;
  std::vector<std::string> target;
  std::vector<Cept> a;
  double score = kNegInf;
};

struct AlignmentDump {
  std::string stage;  // empty when the format does not carry it
  std::vector<DumpRecord> records;
};

inline AlignmentDump read_alignment_text(std::istream& is) {
  AlignmentDump dump;
  std::string line;
  std::size_t n = 0;
  while (std::getline(is, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t pos = 0;
    for (;;) {
      const auto sep = line.find(kDumpSeparator, pos);
      fields.push_back(line.substr(pos, sep == std::string::npos ? sep : sep - pos));
      if (sep == std::string::npos) break;
      pos = sep + kDumpSeparator.size();
    }
    if (fields.size() != 4)
      throw CorpusMismatch("malformed alignment dump line " + std::to_string(n));
    DumpRecord rec;
    try {
      rec.line_no = std::stoul(fields[0]);
      for (const auto& tok : tokenize(fields[3]))
        rec.a.push_back(static_cast<Cept>(std::stoul(tok)));
    } catch (const std::exception&) {
      throw CorpusMismatch("malformed alignment dump line " + std::to_string(n));
    }
    rec.source = tokenize(fields[1]);
    rec.target = tokenize(fields[2]);
    dump.records.push_back(std::move(rec));
  }
  return dump;
}

inline AlignmentDump read_alignment_jsonl(std::istream& is) {
  AlignmentDump dump;
  std::string line;
  std::size_t n = 0;
  while (std::getline(is, line)) {
    ++n;
    if (line.empty() || line == "\r") continue;
    try {
      const auto doc = nlohmann::json::parse(line);
      DumpRecord rec;
      rec.line_no = doc.at("line_no").get<std::size_t>();
      rec.source = doc.at("source").get<std::vector<std::string>>();
      rec.target = doc.at("target").get<std::vector<std::string>>();
      rec.a = doc.at("alignment").get<std::vector<Cept>>();
      if (doc.contains("score") && doc.at("score").is_number())
        rec.score = doc.at("score").get<double>();
      const auto stage = doc.value("stage", std::string());
      if (dump.records.empty()) dump.stage = stage;
      dump.records.push_back(std::move(rec));
    } catch (const nlohmann::json::exception&) {
      throw CorpusMismatch("malformed alignment dump line " + std::to_string(n));
    }
  }
  return dump;
}

/// Rebuilds an AlignedCorpus from a dump after checking that it belongs to
/// `bitext`: same pair count, line numbers, tokens, and valid cepts.
inline AlignedCorpus aligned_from_dump(const AlignmentDump& dump,
                                       const Bitext& bitext, Stage stage) {
  if (dump.records.size() != bitext.pairs.size())
    throw CorpusMismatch("alignment dump has " +
                         std::to_string(dump.records.size()) +
                         " records, bitext has " +
                         std::to_string(bitext.pairs.size()) + " pairs");
  AlignedCorpus out;
  out.direction_label = bitext.direction_label;
  out.stage = stage;
  for (std::size_t k = 0; k < dump.records.size(); ++k) {
    const auto& rec = dump.records[k];
    const auto& pair = bitext.pairs[k];
    const auto where = "alignment record " + std::to_string(k + 1);
    if (rec.line_no != pair.line_no)
      throw CorpusMismatch(where + ": line number " + std::to_string(rec.line_no) +
                           " does not match bitext line " +
                           std::to_string(pair.line_no));
    bool same = rec.source.size() == pair.source.size() &&
                rec.target.size() == pair.target.size();
    for (std::size_t i = 0; same && i < pair.source.size(); ++i)
      same = rec.source[i] == bitext.src_vocab.decode(pair.source[i]);
    for (std::size_t j = 0; same && j < pair.target.size(); ++j)
      same = rec.target[j] == bitext.tgt_vocab.decode(pair.target[j]);
    if (!same) throw CorpusMismatch(where + ": tokens differ from the bitext");
    if (rec.a.size() != pair.target.size())
      throw CorpusMismatch(where + ": alignment length differs from target length");
    for (auto i : rec.a)
      if (i > pair.source.size())
        throw CorpusMismatch(where + ": cept index out of range");
    Alignment a;
    a.a = rec.a;
    a.score = rec.score;
    out.pairs.push_back(make_aligned_pair(rec.line_no, std::move(a), pair.source.size()));
  }
  return out;
}

}  // namespace morphalign

#endif  // MORPHALIGN_ALIGNMENT_IO_HPP
