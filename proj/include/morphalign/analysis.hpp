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

#ifndef MORPHALIGN_ANALYSIS_HPP
#define MORPHALIGN_ANALYSIS_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "morphalign/aligner.hpp"
#include "morphalign/corpus.hpp"
#include "morphalign/errors.hpp"

namespace morphalign {

/// Alignment tally of one surface form.
struct TokenAlignmentCounter {
  std::string surface;
  TokenClass cls = TokenClass::Word;
  std::uint64_t aligned = 0;
  std::uint64_t non_aligned = 0;
  std::int64_t diff = 0;  // aligned - non_aligned

  static TokenAlignmentCounter make(std::string surface, std::uint64_t aligned,
                                    std::uint64_t non_aligned) {
    TokenAlignmentCounter c;
    c.cls = classify_token(surface);
    c.surface = std::move(surface);
    c.aligned = aligned;
    c.non_aligned = non_aligned;
    c.diff = std::int64_t(aligned) - std::int64_t(non_aligned);
    return c;
  }

  friend bool operator==(const TokenAlignmentCounter&,
                         const TokenAlignmentCounter&) = default;
};

/// Report order: most negative diff first, then surface (bytewise).
inline bool report_order(const TokenAlignmentCounter& x,
                         const TokenAlignmentCounter& y) {
  if (x.diff != y.diff) return x.diff < y.diff;
  return x.surface < y.surface;
}

struct DirectionStats {
  std::uint64_t tokens = 0;
  std::uint64_t na_tokens = 0;
  std::uint64_t na_words = 0;
  std::uint64_t na_morphemes = 0;
  double na_rate = 0.0;  // na_tokens / tokens, unrounded

  /// Rate to three decimals, truncated toward zero ("0.617" for
  /// 2905/4702). Computed in integers so it never depends on rounding of
  /// na_rate.
  std::string rate_text() const {
    const std::uint64_t milli = tokens == 0 ? 0 : (na_tokens * 1000) / tokens;
    std::string frac = std::to_string(milli % 1000);
    frac.insert(0, 3 - frac.size(), '0');
    return std::to_string(milli / 1000) + "." + frac;
  }

  friend bool operator==(const DirectionStats&, const DirectionStats&) = default;
};

/// Which side of the pair a report counts.
enum class CountedSide { Source, Target };

struct AlignmentReport {
  std::string direction_label;
  std::string stage;  // "m1".."m4", or "-" when unknown
  CountedSide side = CountedSide::Source;
  std::vector<TokenAlignmentCounter> counters;  // report order
  std::size_t total_rows = 0;                   // rows before any top-k cut
  DirectionStats stats;
  std::vector<std::string> notes;

  friend bool operator==(const AlignmentReport&, const AlignmentReport&) = default;
};

namespace detail {

inline std::vector<TokenAlignmentCounter> finish_counters(
    const std::map<std::string, std::pair<std::uint64_t, std::uint64_t>>& tally) {
  std::vector<TokenAlignmentCounter> out;
  out.reserve(tally.size());
  for (const auto& [surface, counts] : tally)
    out.push_back(TokenAlignmentCounter::make(surface, counts.first, counts.second));
  std::stable_sort(out.begin(), out.end(), report_order);
  return out;
}

inline void check_pairs(const AlignedCorpus& aligned, const Bitext& bitext) {
  if (aligned.pairs.size() != bitext.pairs.size())
    throw CorpusMismatch("alignment has " + std::to_string(aligned.pairs.size()) +
                         " pairs, bitext has " + std::to_string(bitext.pairs.size()));
  for (std::size_t k = 0; k < bitext.pairs.size(); ++k) {
    if (aligned.pairs[k].alignment.a.size() != bitext.pairs[k].target.size() ||
        aligned.pairs[k].coverage.size() != bitext.pairs[k].source.size() + 1)
      throw CorpusMismatch("alignment shape differs from bitext at pair " +
                           std::to_string(k + 1));
  }
}

}  // namespace detail

/// A source occurrence is aligned when its cept covers at least one target
/// position, non-aligned otherwise. NULL is not a source occurrence.
inline std::vector<TokenAlignmentCounter> count_source_alignment(
    const AlignedCorpus& aligned, const Bitext& bitext) {
  detail::check_pairs(aligned, bitext);
  std::map<std::string, std::pair<std::uint64_t, std::uint64_t>> tally;
  for (std::size_t k = 0; k < bitext.pairs.size(); ++k) {
    const auto& src = bitext.pairs[k].source;
    const auto& cov = aligned.pairs[k].coverage;
    for (std::size_t i = 1; i <= src.size(); ++i) {
      auto& c = tally[bitext.src_vocab.decode(src[i - 1])];
      (cov[i].empty() ? c.second : c.first) += 1;
    }
  }
  return detail::finish_counters(tally);
}

/// Target-side variant: a target occurrence is non-aligned when it sits
/// in the NULL cept.
inline std::vector<TokenAlignmentCounter> count_target_alignment(
    const AlignedCorpus& aligned, const Bitext& bitext) {
  detail::check_pairs(aligned, bitext);
  std::map<std::string, std::pair<std::uint64_t, std::uint64_t>> tally;
  for (std::size_t k = 0; k < bitext.pairs.size(); ++k) {
    const auto& tgt = bitext.pairs[k].target;
    const auto& a = aligned.pairs[k].alignment.a;
    for (std::size_t j = 0; j < tgt.size(); ++j) {
      auto& c = tally[bitext.tgt_vocab.decode(tgt[j])];
      (a[j] == 0 ? c.second : c.first) += 1;
    }
  }
  return detail::finish_counters(tally);
}

inline DirectionStats direction_stats(
    const std::vector<TokenAlignmentCounter>& counters) {
  DirectionStats s;
  for (const auto& c : counters) {
    s.tokens += c.aligned + c.non_aligned;
    if (c.cls == TokenClass::BoundMorpheme)
      s.na_morphemes += c.non_aligned;
    else
      s.na_words += c.non_aligned;
  }
  s.na_tokens = s.na_words + s.na_morphemes;
  s.na_rate = s.tokens == 0 ? 0.0 : double(s.na_tokens) / double(s.tokens);
  return s;
}

/// The first k rows of the (already ordered) report; all rows if k is
/// larger than the row count.
inline std::vector<TokenAlignmentCounter> top_nonaligned(
    const AlignmentReport& report, std::size_t k = 15) {
  const auto n = std::min(k, report.counters.size());
  return {report.counters.begin(), report.counters.begin() + std::ptrdiff_t(n)};
}

inline constexpr const char* kClassificationNote =
    "words and morphemes are told apart by the '-' marker at a token edge, "
    "on both language sides; unmarked affixes count as words";

struct ReportOptions {
  bool count_target = false;
  std::size_t top = 0;  // 0 keeps every row
};

/// Counts, orders and summarizes one direction. The stats always cover
/// every token, even when `top` trims the listed rows.
inline AlignmentReport make_report(const AlignedCorpus& aligned,
                                   const Bitext& bitext, const std::string& stage,
                                   const ReportOptions& opts = {}) {
  AlignmentReport r;
  r.direction_label = bitext.direction_label;
  r.stage = stage;
  r.side = opts.count_target ? CountedSide::Target : CountedSide::Source;
  r.counters = opts.count_target ? count_target_alignment(aligned, bitext)
                                 : count_source_alignment(aligned, bitext);
  r.total_rows = r.counters.size();
  r.stats = direction_stats(r.counters);
  r.notes.push_back(kClassificationNote);
  if (opts.top > 0) r.counters = top_nonaligned(r, opts.top);
  return r;
}

// ---------------------------------------------------------------------------
// Rendering

namespace detail {

inline std::string md_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '|' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

inline const char* side_name(CountedSide s) {
  return s == CountedSide::Source ? "source" : "target";
}

}  // namespace detail

inline std::string render_tsv(const AlignmentReport& r) {
  std::ostringstream os;
  os << "Token\tAlig\tNon\tDiff\n";
  for (const auto& c : r.counters)
    os << c.surface << '\t' << c.aligned << '\t' << c.non_aligned << '\t'
       << c.diff << '\n';
  os << '\n';
  os << "# direction\t" << r.direction_label << '\n';
  os << "# stage\t" << r.stage << '\n';
  os << "# side\t" << detail::side_name(r.side) << '\n';
  os << "Tokens\tN.a. Tokens\tN.a. words\tN.a. morph.\tN.a./tokens\n";
  os << r.stats.tokens << '\t' << r.stats.na_tokens << '\t' << r.stats.na_words
     << '\t' << r.stats.na_morphemes << '\t' << r.stats.rate_text() << '\n';
  for (const auto& n : r.notes) os << "# note\t" << n << '\n';
  return os.str();
}

inline std::string markdown_stats_header() {
  return "| Tokens | N.a. Tokens | N.a. words | N.a. morph. | N.a./tokens |\n"
         "|---:|---:|---:|---:|---:|\n";
}

inline std::string markdown_stats_row(const DirectionStats& s,
                                      const std::string& label = {}) {
  std::ostringstream os;
  os << "| ";
  if (!label.empty()) os << detail::md_escape(label) << " | ";
  os << s.tokens << " | " << s.na_tokens << " | " << s.na_words << " | "
     << s.na_morphemes << " | " << s.rate_text() << " |\n";
  return os.str();
}

inline std::string render_markdown(const AlignmentReport& r) {
  std::ostringstream os;
  os << "### " << detail::md_escape(r.direction_label) << " (" << r.stage << ", "
     << detail::side_name(r.side) << " side)\n\n";
  os << "| Token | Alig | Non | Diff |\n";
  os << "|:---|---:|---:|---:|\n";
  for (const auto& c : r.counters)
    os << "| " << detail::md_escape(c.surface) << " | " << c.aligned << " | "
       << c.non_aligned << " | " << c.diff << " |\n";
  os << '\n' << markdown_stats_header() << markdown_stats_row(r.stats);
  for (const auto& n : r.notes) os << "\nNote: " << n << '\n';
  return os.str();
}

inline nlohmann::json report_to_json(const AlignmentReport& r) {
  using nlohmann::json;
  json rows = json::array();
  for (const auto& c : r.counters)
    rows.push_back({{"token", c.surface},
                    {"class", to_string(c.cls)},
                    {"aligned", c.aligned},
                    {"non_aligned", c.non_aligned},
                    {"diff", c.diff}});
  return json{{"direction", r.direction_label},
              {"stage", r.stage},
              {"side", detail::side_name(r.side)},
              {"rows", std::move(rows)},
              {"total_rows", r.total_rows},
              {"stats",
               {{"tokens", r.stats.tokens},
                {"na_tokens", r.stats.na_tokens},
                {"na_words", r.stats.na_words},
                {"na_morphemes", r.stats.na_morphemes},
                {"na_rate", r.stats.na_rate},
                {"na_rate_text", r.stats.rate_text()}}},
              {"notes", r.notes}};
}

inline std::string render_json(const AlignmentReport& r) {
  return report_to_json(r).dump(2) + "\n";
}

inline AlignmentReport report_from_json(const nlohmann::json& doc) {
  AlignmentReport r;
  r.direction_label = doc.at("direction").get<std::string>();
  r.stage = doc.at("stage").get<std::string>();
  r.side = doc.at("side").get<std::string>() == "target" ? CountedSide::Target
                                                          : CountedSide::Source;
  for (const auto& row : doc.at("rows")) {
    r.counters.push_back(TokenAlignmentCounter::make(
        row.at("token").get<std::string>(), row.at("aligned").get<std::uint64_t>(),
        row.at("non_aligned").get<std::uint64_t>()));
  }
  r.total_rows = doc.at("total_rows").get<std::size_t>();
  const auto& s = doc.at("stats");
  r.stats.tokens = s.at("tokens").get<std::uint64_t>();
  r.stats.na_tokens = s.at("na_tokens").get<std::uint64_t>();
  r.stats.na_words = s.at("na_words").get<std::uint64_t>();
  r.stats.na_morphemes = s.at("na_morphemes").get<std::uint64_t>();
  r.stats.na_rate = s.at("na_rate").get<double>();
  r.notes = doc.at("notes").get<std::vector<std::string>>();
  return r;
}

enum class ReportFormat { Tsv, Json, Markdown };

inline ReportFormat parse_report_format(const std::string& s) {
  if (s == "tsv") return ReportFormat::Tsv;
  if (s == "json") return ReportFormat::Json;
  if (s == "md" || s == "markdown") return ReportFormat::Markdown;
  throw std::invalid_argument("unknown report format: " + s);
}

inline const char* extension(ReportFormat f) {
  switch (f) {
    case ReportFormat::Tsv: return "tsv";
    case ReportFormat::Json: return "json";
    case ReportFormat::Markdown: return "md";
  }
  return "";
}

inline std::string render_report(const AlignmentReport& r, ReportFormat f) {
  switch (f) {
    case ReportFormat::Tsv: return render_tsv(r);
    case ReportFormat::Json: return render_json(r);
    case ReportFormat::Markdown: return render_markdown(r);
  }
  return {};
}

}  // namespace morphalign

#endif  // MORPHALIGN_ANALYSIS_HPP
