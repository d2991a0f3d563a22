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

#ifndef MORPHALIGN_CORPUS_HPP
#define MORPHALIGN_CORPUS_HPP

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "morphalign/errors.hpp"

namespace morphalign {

using TokenId = std::uint32_t;

inline constexpr TokenId kNullId = 0;
inline constexpr std::string_view kNullSurface = "<NULL>";
inline constexpr char kMorphemeMarker = '-';

enum class TokenClass { Word, BoundMorpheme };

inline const char* to_string(TokenClass c) {
  return c == TokenClass::Word ? "word" : "morpheme";
}

/// A token is a bound morpheme when its first or last character is the
/// marker, except for the bare marker itself. Interior markers ("ka-te")
/// do not count.
inline TokenClass classify_token(std::string_view surface) {
  if (surface.size() < 2) return TokenClass::Word;
  if (surface.front() == kMorphemeMarker || surface.back() == kMorphemeMarker)
    return TokenClass::BoundMorpheme;
  return TokenClass::Word;
}

struct TokenInfo {
  TokenId id = 0;
  TokenClass cls = TokenClass::Word;
  std::uint64_t frequency = 0;
};

/// Dense surface <-> id map. Slot 0 is reserved for the NULL cept; it is a
/// real entry ("<NULL>") only in source vocabularies.
class Vocabulary {
 public:
  static Vocabulary source() { return Vocabulary(true); }
  static Vocabulary target() { return Vocabulary(false); }

  Vocabulary() : Vocabulary(false) {}

  bool has_null() const { return has_null_; }

  /// Number of id slots, including the reserved slot 0.
  std::size_t size() const { return surfaces_.size(); }

  /// Number of real tokens, excluding slot 0.
  std::size_t token_count() const { return surfaces_.size() - 1; }

  /// Adds one occurrence of `surface`, assigning the next id on first sight.
  TokenId add(std::string_view surface, std::uint64_t count = 1) {
    auto it = index_.find(std::string(surface));
    if (it != index_.end()) {
      infos_[it->second].frequency += count;
      return it->second;
    }
    const auto id = static_cast<TokenId>(surfaces_.size());
    surfaces_.emplace_back(surface);
    infos_.push_back(TokenInfo{id, classify_token(surface), count});
    index_.emplace(surfaces_.back(), id);
    return id;
  }

  /// Open-vocabulary lookup: nullopt for unseen surfaces.
  std::optional<TokenId> lookup(std::string_view surface) const {
    auto it = index_.find(std::string(surface));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Closed-vocabulary lookup.
  TokenId encode(std::string_view surface) const {
    if (auto id = lookup(surface)) return *id;
    throw UnknownToken(std::string(surface));
  }

  bool contains(std::string_view surface) const {
    return lookup(surface).has_value();
  }

  const std::string& decode(TokenId id) const { return surfaces_.at(id); }
  const TokenInfo& info(TokenId id) const { return infos_.at(id); }
  TokenClass class_of(TokenId id) const { return infos_.at(id).cls; }
  std::uint64_t frequency(TokenId id) const { return infos_.at(id).frequency; }

  std::uint64_t total_frequency() const {
    std::uint64_t total = 0;
    for (const auto& i : infos_) total += i.frequency;
    return total;
  }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    if (a.has_null_ != b.has_null_ || a.surfaces_ != b.surfaces_) return false;
    for (std::size_t i = 0; i < a.infos_.size(); ++i) {
      if (a.infos_[i].frequency != b.infos_[i].frequency ||
          a.infos_[i].cls != b.infos_[i].cls)
        return false;
    }
    return true;
  }

 private:
  explicit Vocabulary(bool with_null) : has_null_(with_null) {
    surfaces_.emplace_back(with_null ? kNullSurface : std::string_view{});
    infos_.push_back(TokenInfo{kNullId, TokenClass::Word, 0});
    if (with_null) index_.emplace(std::string(kNullSurface), kNullId);
  }

  bool has_null_;
  std::vector<std::string> surfaces_;
  std::vector<TokenInfo> infos_;
  std::unordered_map<std::string, TokenId> index_;
};

/// One training unit. `source` is the conditioning side that carries the
/// cepts (length l), `target` the generated side (length m).
struct SentencePair {
  std::vector<TokenId> source;
  std::vector<TokenId> target;
  std::size_t line_no = 0;
};

struct Bitext {
  std::vector<SentencePair> pairs;
  Vocabulary src_vocab = Vocabulary::source();
  Vocabulary tgt_vocab = Vocabulary::target();
  std::string direction_label;
  // Ingestion warnings (over-long pairs that were dropped).
  std::vector<std::string> warnings;
};

struct IngestOptions {
  std::size_t max_len = 100;
};

namespace detail {

inline bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

/// Returns the byte offset of the first invalid sequence, or npos.
inline std::size_t find_invalid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return i;
    }
    if (i + len > s.size()) return i;
    for (std::size_t k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) return i;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // Overlong forms, surrogates, out of range.
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
        (len == 4 && cp < 0x10000) || cp > 0x10FFFF ||
        (cp >= 0xD800 && cp <= 0xDFFF))
      return i;
    i += len;
  }
  return std::string_view::npos;
}

}  // namespace detail

/// Splits on ASCII whitespace.
inline std::vector<std::string> tokenize(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && detail::is_ascii_space(line[i])) ++i;
    std::size_t start = i;
    while (i < line.size() && !detail::is_ascii_space(line[i])) ++i;
    if (i > start) out.emplace_back(line.substr(start, i - start));
  }
  return out;
}

/// Reads a UTF-8 text file into lines (without terminators). A UTF-8 byte
/// order mark on the first line is dropped.
inline std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileNotFound(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (lines.empty() && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (detail::find_invalid_utf8(line) != std::string_view::npos)
      throw EncodingError(path, lines.size() + 1, "invalid UTF-8");
    lines.push_back(std::move(line));
  }
  return lines;
}

/// Tokenized parallel text before id assignment.
struct RawParallel {
  std::vector<std::vector<std::string>> source;
  std::vector<std::vector<std::string>> target;
};

inline RawParallel tokenize_parallel(const std::vector<std::string>& src_lines,
                                     const std::vector<std::string>& tgt_lines,
                                     const std::string& src_name = "source",
                                     const std::string& tgt_name = "target") {
  if (src_lines.size() != tgt_lines.size())
    throw LineCountMismatch(src_lines.size(), tgt_lines.size());
  RawParallel raw;
  raw.source.reserve(src_lines.size());
  raw.target.reserve(tgt_lines.size());
  for (std::size_t k = 0; k < src_lines.size(); ++k) {
    auto s = tokenize(src_lines[k]);
    auto t = tokenize(tgt_lines[k]);
    if (s.empty()) throw EmptyLine(src_name, k + 1);
    if (t.empty()) throw EmptyLine(tgt_name, k + 1);
    for (const auto& tok : s) {
      if (tok == kNullSurface)
        throw EncodingError(src_name, k + 1, "reserved token <NULL>");
    }
    raw.source.push_back(std::move(s));
    raw.target.push_back(std::move(t));
  }
  return raw;
}

namespace detail {

inline bool too_long(const RawParallel& raw, std::size_t k,
                     const IngestOptions& opts, Bitext& out) {
  if (raw.source[k].size() <= opts.max_len &&
      raw.target[k].size() <= opts.max_len)
    return false;
  out.warnings.push_back("line " + std::to_string(k + 1) +
                         ": pair exceeds max length " +
                         std::to_string(opts.max_len) + " (source " +
                         std::to_string(raw.source[k].size()) + ", target " +
                         std::to_string(raw.target[k].size()) + "), skipped");
  return true;
}

}  // namespace detail

/// Builds vocabularies in first-occurrence order and encodes every pair.
inline Bitext build_bitext(const RawParallel& raw, std::string direction_label,
                           const IngestOptions& opts = {}) {
  Bitext out;
  out.direction_label = std::move(direction_label);
  for (std::size_t k = 0; k < raw.source.size(); ++k) {
    if (detail::too_long(raw, k, opts, out)) continue;
    SentencePair pair;
    pair.line_no = k + 1;
    pair.source.reserve(raw.source[k].size());
    pair.target.reserve(raw.target[k].size());
    for (const auto& tok : raw.source[k])
      pair.source.push_back(out.src_vocab.add(tok));
    for (const auto& tok : raw.target[k])
      pair.target.push_back(out.tgt_vocab.add(tok));
    out.pairs.push_back(std::move(pair));
  }
  return out;
}

/// Encodes against existing vocabularies. In closed mode an unseen surface
/// raises UnknownToken; in open mode it is appended to a copy of the
/// vocabulary so that ids beyond the original size mark unknown tokens.
inline Bitext encode_bitext(const RawParallel& raw, const Vocabulary& src_vocab,
                            const Vocabulary& tgt_vocab,
                            std::string direction_label, bool open_vocabulary,
                            const IngestOptions& opts = {}) {
  Bitext out;
  out.direction_label = std::move(direction_label);
  out.src_vocab = src_vocab;
  out.tgt_vocab = tgt_vocab;
  auto encode = [open_vocabulary](Vocabulary& v, const std::string& tok) {
    if (auto id = v.lookup(tok)) return *id;
    if (!open_vocabulary) throw UnknownToken(tok);
    return v.add(tok, 0);
  };
  for (std::size_t k = 0; k < raw.source.size(); ++k) {
    if (detail::too_long(raw, k, opts, out)) continue;
    SentencePair pair;
    pair.line_no = k + 1;
    for (const auto& tok : raw.source[k])
      pair.source.push_back(encode(out.src_vocab, tok));
    for (const auto& tok : raw.target[k])
      pair.target.push_back(encode(out.tgt_vocab, tok));
    out.pairs.push_back(std::move(pair));
  }
  return out;
}

inline RawParallel read_parallel(const std::string& src_path,
                                 const std::string& tgt_path) {
  auto src = read_lines(src_path);
  auto tgt = read_lines(tgt_path);
  return tokenize_parallel(src, tgt, src_path, tgt_path);
}

/// Reads `source<TAB>target` lines.
inline RawParallel read_parallel_tsv(const std::string& path) {
  auto lines = read_lines(path);
  std::vector<std::string> src, tgt;
  src.reserve(lines.size());
  tgt.reserve(lines.size());
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const auto tab = lines[k].find('\t');
    if (tab == std::string::npos)
      throw EncodingError(path, k + 1, "missing TAB separator");
    src.push_back(lines[k].substr(0, tab));
    tgt.push_back(lines[k].substr(tab + 1));
  }
  return tokenize_parallel(src, tgt, path, path);
}

inline Bitext load_bitext(const std::string& src_path,
                          const std::string& tgt_path,
                          std::string direction_label,
                          const IngestOptions& opts = {}) {
  return build_bitext(read_parallel(src_path, tgt_path),
                      std::move(direction_label), opts);
}

inline Bitext load_bitext_tsv(const std::string& path,
                              std::string direction_label,
                              const IngestOptions& opts = {}) {
  return build_bitext(read_parallel_tsv(path), std::move(direction_label),
                      opts);
}

inline std::uint64_t source_token_count(const Bitext& b) {
  std::uint64_t n = 0;
  for (const auto& p : b.pairs) n += p.source.size();
  return n;
}

inline std::uint64_t target_token_count(const Bitext& b) {
  std::uint64_t n = 0;
  for (const auto& p : b.pairs) n += p.target.size();
  return n;
}

}  // namespace morphalign

#endif  // MORPHALIGN_CORPUS_HPP
