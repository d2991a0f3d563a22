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

#ifndef MORPHALIGN_TABLES_HPP
#define MORPHALIGN_TABLES_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <tuple>
#include <utility>
#include <vector>

#include "morphalign/corpus.hpp"

namespace morphalign {

// Every table keeps its probabilities in one flat vector. Expected counts
// are collected in a vector of the same length and layout, so merging two
// count buffers is an element-wise sum.
using CountBuffer = std::vector<double>;

inline void add_into(CountBuffer& into, const CountBuffer& from) {
  for (std::size_t k = 0; k < into.size(); ++k) into[k] += from[k];
}

namespace detail {

/// Normalizes `probs[begin, begin+n)` from `counts`, interpolating with the
/// uniform distribution by `smoothing`. Rows without evidence are left as is.
inline void normalize_row(std::vector<double>& probs, const CountBuffer& counts,
                          std::size_t begin, std::size_t n,
                          double smoothing = 0.0) {
  if (n == 0) return;
  double total = 0.0;
  for (std::size_t k = begin; k < begin + n; ++k) total += counts[k];
  if (!(total > 0.0)) return;
  const double uniform = 1.0 / static_cast<double>(n);
  for (std::size_t k = begin; k < begin + n; ++k) {
    const double ml = counts[k] / total;
    probs[k] = smoothing > 0.0 ? (1.0 - smoothing) * ml + smoothing * uniform
                               : ml;
  }
}

}  // namespace detail

/// Sparse lexical table t(f|e), stored row-wise by source id with target
/// ids sorted inside each row. Only co-occurring pairs have a cell.
class TTable {
 public:
  TTable() = default;

  /// Cells for every (e, f) that co-occur in some pair; NULL (row 0)
  /// co-occurs with every target token when `with_null` is set. Each row
  /// starts uniform.
  static TTable from_cooccurrence(const Bitext& bitext, bool with_null) {
    const std::size_t rows = bitext.src_vocab.size();
    std::vector<std::vector<TokenId>> cols(rows);
    for (const auto& p : bitext.pairs) {
      for (auto e : p.source) cols[e].insert(cols[e].end(), p.target.begin(),
                                             p.target.end());
      if (with_null)
        cols[kNullId].insert(cols[kNullId].end(), p.target.begin(),
                             p.target.end());
    }
    TTable t;
    t.row_ptr_.assign(rows + 1, 0);
    for (std::size_t e = 0; e < rows; ++e) {
      auto& c = cols[e];
      std::sort(c.begin(), c.end());
      c.erase(std::unique(c.begin(), c.end()), c.end());
      t.row_ptr_[e + 1] = t.row_ptr_[e] + c.size();
    }
    t.cols_.reserve(t.row_ptr_.back());
    t.probs_.reserve(t.row_ptr_.back());
    for (std::size_t e = 0; e < rows; ++e) {
      const double u = cols[e].empty() ? 0.0 : 1.0 / double(cols[e].size());
      for (auto f : cols[e]) {
        t.cols_.push_back(f);
        t.probs_.push_back(u);
      }
    }
    return t;
  }

  /// Builds from explicit (e, f, p) cells; used by deserialization.
  static TTable from_cells(std::size_t rows,
                           std::vector<std::tuple<TokenId, TokenId, double>> cells) {
    std::sort(cells.begin(), cells.end());
    TTable t;
    t.row_ptr_.assign(rows + 1, 0);
    for (const auto& [e, f, p] : cells) ++t.row_ptr_[e + 1];
    for (std::size_t e = 0; e < rows; ++e) t.row_ptr_[e + 1] += t.row_ptr_[e];
    for (const auto& [e, f, p] : cells) {
      t.cols_.push_back(f);
      t.probs_.push_back(p);
    }
    return t;
  }

  std::size_t rows() const { return row_ptr_.empty() ? 0 : row_ptr_.size() - 1; }
  std::size_t size() const { return probs_.size(); }

  std::span<const TokenId> row_targets(TokenId e) const {
    if (e >= rows()) return {};
    return {cols_.data() + row_ptr_[e], row_ptr_[e + 1] - row_ptr_[e]};
  }
  std::span<const double> row_probs(TokenId e) const {
    if (e >= rows()) return {};
    return {probs_.data() + row_ptr_[e], row_ptr_[e + 1] - row_ptr_[e]};
  }
  std::size_t row_begin(TokenId e) const { return row_ptr_[e]; }

  /// Cell index of (e, f), or -1.
  std::ptrdiff_t index(TokenId e, TokenId f) const {
    if (e >= rows()) return -1;
    const auto first = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[e]);
    const auto last = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[e + 1]);
    auto it = std::lower_bound(first, last, f);
    if (it == last || *it != f) return -1;
    return it - cols_.begin();
  }

  double prob(TokenId e, TokenId f) const {
    const auto k = index(e, f);
    return k < 0 ? 0.0 : probs_[static_cast<std::size_t>(k)];
  }

  std::vector<double>& values() { return probs_; }
  const std::vector<double>& values() const { return probs_; }
  TokenId target_at(std::size_t k) const { return cols_[k]; }

  CountBuffer zero_counts() const { return CountBuffer(probs_.size(), 0.0); }

  void normalize(const CountBuffer& counts) {
    for (std::size_t e = 0; e < rows(); ++e)
      detail::normalize_row(probs_, counts, row_ptr_[e],
                            row_ptr_[e + 1] - row_ptr_[e]);
  }

  friend bool operator==(const TTable&, const TTable&) = default;

 private:
  std::vector<std::size_t> row_ptr_;
  std::vector<TokenId> cols_;
  std::vector<double> probs_;
};

/// Length-keyed block layout shared by the alignment and the absolute
/// distortion tables: one dense block per observed (l, m), laid out in key
/// order so the layout depends only on the set of lengths.
class LengthKeyedTable {
 public:
  using Key = std::pair<std::uint32_t, std::uint32_t>;
  using KeySet = std::set<Key>;

  static KeySet lengths_of(const Bitext& bitext) {
    KeySet keys;
    for (const auto& p : bitext.pairs)
      keys.emplace(static_cast<std::uint32_t>(p.source.size()),
                   static_cast<std::uint32_t>(p.target.size()));
    return keys;
  }

  const std::map<Key, std::size_t>& blocks() const { return offset_; }
  std::vector<double>& values() { return probs_; }
  const std::vector<double>& values() const { return probs_; }
  std::size_t size() const { return probs_.size(); }
  CountBuffer zero_counts() const { return CountBuffer(probs_.size(), 0.0); }

  std::ptrdiff_t block(std::size_t l, std::size_t m) const {
    auto it = offset_.find(Key(static_cast<std::uint32_t>(l),
                               static_cast<std::uint32_t>(m)));
    return it == offset_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
  }

  friend bool operator==(const LengthKeyedTable&,
                         const LengthKeyedTable&) = default;

 protected:
  template <class BlockSize>
  void layout(const KeySet& keys, BlockSize block_size) {
    offset_.clear();
    std::size_t total = 0;
    for (const auto& key : keys) {
      offset_.emplace(key, total);
      total += block_size(key.first, key.second);
    }
    probs_.assign(total, 0.0);
  }

  std::map<Key, std::size_t> offset_;
  std::vector<double> probs_;
};

/// Alignment table a(i | j, l, m) for i in 0..l, j in 1..m. Cell layout
/// inside a block: (j-1)*(l+1) + i. Unseen lengths fall back to uniform.
class ATable : public LengthKeyedTable {
 public:
  ATable() = default;

  static ATable uniform(const KeySet& lengths, bool with_null) {
    ATable a;
    a.with_null_ = with_null;
    a.layout(lengths, [](std::size_t l, std::size_t m) { return m * (l + 1); });
    for (const auto& [key, off] : a.offset_) {
      const auto [l, m] = key;
      for (std::size_t j = 1; j <= m; ++j)
        for (std::size_t i = 0; i <= l; ++i)
          a.probs_[off + cell(i, j, l)] = a.uniform_prob(i, l);
    }
    return a;
  }

  static ATable uniform_for(const Bitext& bitext, bool with_null) {
    return uniform(lengths_of(bitext), with_null);
  }

  bool with_null() const { return with_null_; }

  static std::size_t cell(std::size_t i, std::size_t j, std::size_t l) {
    return (j - 1) * (l + 1) + i;
  }

  double uniform_prob(std::size_t i, std::size_t l) const {
    if (with_null_) return 1.0 / static_cast<double>(l + 1);
    return i == 0 ? 0.0 : 1.0 / static_cast<double>(l);
  }

  double prob(std::size_t i, std::size_t j, std::size_t l, std::size_t m) const {
    const auto b = block(l, m);
    if (b < 0) return uniform_prob(i, l);
    return probs_[static_cast<std::size_t>(b) + cell(i, j, l)];
  }

  std::ptrdiff_t index(std::size_t i, std::size_t j, std::size_t l,
                       std::size_t m) const {
    const auto b = block(l, m);
    return b < 0 ? -1 : b + static_cast<std::ptrdiff_t>(cell(i, j, l));
  }

  void normalize(const CountBuffer& counts) {
    for (const auto& [key, off] : offset_) {
      const auto [l, m] = key;
      for (std::size_t j = 1; j <= m; ++j)
        detail::normalize_row(probs_, counts, off + cell(0, j, l), l + 1);
    }
  }

  friend bool operator==(const ATable&, const ATable&) = default;

 private:
  bool with_null_ = true;
};

/// Fertility n(phi | e) for phi in 0..max_fertility, plus the NULL
/// insertion pair p0/p1.
class FertilityTable {
 public:
  FertilityTable() = default;
  FertilityTable(std::size_t rows, int max_fertility)
      : rows_(rows),
        max_fertility_(max_fertility),
        probs_(rows * static_cast<std::size_t>(max_fertility + 1), 0.0) {
    for (std::size_t e = 0; e < rows; ++e) probs_[e * width()] = 1.0;
  }

  std::size_t rows() const { return rows_; }
  int max_fertility() const { return max_fertility_; }
  std::size_t width() const { return static_cast<std::size_t>(max_fertility_ + 1); }

  /// Out-of-vocabulary source tokens never generate anything.
  double prob(TokenId e, int phi) const {
    if (phi < 0 || phi > max_fertility_) return 0.0;
    if (e >= rows_) return phi == 0 ? 1.0 : 0.0;
    return probs_[e * width() + static_cast<std::size_t>(phi)];
  }

  std::size_t index(TokenId e, int phi) const {
    return e * width() + static_cast<std::size_t>(phi);
  }

  std::span<const double> row(TokenId e) const {
    return {probs_.data() + e * width(), width()};
  }
  void set_row(TokenId e, std::span<const double> values) {
    std::copy(values.begin(), values.end(), probs_.begin() + static_cast<std::ptrdiff_t>(e * width()));
  }

  std::vector<double>& values() { return probs_; }
  const std::vector<double>& values() const { return probs_; }
  std::size_t size() const { return probs_.size(); }
  CountBuffer zero_counts() const { return CountBuffer(probs_.size(), 0.0); }

  double p0 = 0.95;
  double p1 = 0.05;

  /// Rows from 1: the NULL cept's fertility is governed by p0/p1 instead.
  void normalize(const CountBuffer& counts, double smoothing) {
    for (std::size_t e = 1; e < rows_; ++e)
      detail::normalize_row(probs_, counts, e * width(), width(), smoothing);
  }

  friend bool operator==(const FertilityTable&, const FertilityTable&) = default;

 private:
  std::size_t rows_ = 0;
  int max_fertility_ = 9;
  std::vector<double> probs_;
};

/// Absolute distortion d(j | i, l, m) for i in 1..l, j in 1..m. Cell layout
/// inside a block: (i-1)*m + (j-1). Unseen lengths fall back to 1/m.
class AbsoluteDistortion : public LengthKeyedTable {
 public:
  static AbsoluteDistortion uniform(const KeySet& lengths) {
    AbsoluteDistortion d;
    d.layout(lengths, [](std::size_t l, std::size_t m) { return l * m; });
    for (const auto& [key, off] : d.offset_) {
      const auto [l, m] = key;
      std::fill_n(d.probs_.begin() + static_cast<std::ptrdiff_t>(off), l * m,
                  1.0 / static_cast<double>(m));
    }
    return d;
  }

  static std::size_t cell(std::size_t j, std::size_t i, std::size_t m) {
    return (i - 1) * m + (j - 1);
  }

  double prob(std::size_t j, std::size_t i, std::size_t l, std::size_t m) const {
    const auto b = block(l, m);
    if (b < 0) return 1.0 / static_cast<double>(m);
    return probs_[static_cast<std::size_t>(b) + cell(j, i, m)];
  }

  std::ptrdiff_t index(std::size_t j, std::size_t i, std::size_t l,
                       std::size_t m) const {
    const auto b = block(l, m);
    return b < 0 ? -1 : b + static_cast<std::ptrdiff_t>(cell(j, i, m));
  }

  void normalize(const CountBuffer& counts, double smoothing) {
    for (const auto& [key, off] : offset_) {
      const auto [l, m] = key;
      for (std::size_t i = 1; i <= l; ++i)
        detail::normalize_row(probs_, counts, off + cell(1, i, m), m, smoothing);
    }
  }

  friend bool operator==(const AbsoluteDistortion&,
                         const AbsoluteDistortion&) = default;
};

/// Word classes for relative displacement. Ids outside the maps get class 0.
struct DisplacementClasses {
  std::vector<std::uint32_t> source;  // by source id
  std::vector<std::uint32_t> target;  // by target id
  std::uint32_t source_count = 1;
  std::uint32_t target_count = 1;

  std::uint32_t source_class(TokenId e) const {
    return e < source.size() ? source[e] : 0;
  }
  std::uint32_t target_class(TokenId f) const {
    return f < target.size() ? target[f] : 0;
  }

  friend bool operator==(const DisplacementClasses&,
                         const DisplacementClasses&) = default;
};

/// Relative distortion. The head table d1(dj | A, B) covers dj in
/// [1-L, L] (dj = position of a cept's first word minus the center of the
/// previous non-empty cept); the non-head table d>1(dj | B) covers dj in
/// [1, L-1] (distance to the previous word of the same cept).
class RelativeDistortion {
 public:
  RelativeDistortion() = default;
  RelativeDistortion(std::size_t max_len, std::uint32_t source_classes,
                     std::uint32_t target_classes)
      : max_len_(max_len),
        source_classes_(source_classes),
        target_classes_(target_classes),
        head_(source_classes * target_classes * head_width(),
              1.0 / static_cast<double>(head_width())),
        nonhead_(target_classes * nonhead_width(),
                 1.0 / static_cast<double>(nonhead_width())) {}

  std::size_t max_len() const { return max_len_; }
  std::uint32_t source_classes() const { return source_classes_; }
  std::uint32_t target_classes() const { return target_classes_; }
  std::size_t head_width() const { return 2 * max_len_; }
  std::size_t nonhead_width() const { return max_len_ > 1 ? max_len_ - 1 : 1; }
  std::ptrdiff_t min_head_displacement() const {
    return 1 - static_cast<std::ptrdiff_t>(max_len_);
  }

  std::ptrdiff_t head_index(std::ptrdiff_t dj, std::uint32_t a,
                            std::uint32_t b) const {
    const std::ptrdiff_t k = dj - min_head_displacement();
    if (k < 0 || k >= static_cast<std::ptrdiff_t>(head_width()) ||
        a >= source_classes_ || b >= target_classes_)
      return -1;
    return static_cast<std::ptrdiff_t>((a * target_classes_ + b) * head_width()) + k;
  }

  std::ptrdiff_t nonhead_index(std::ptrdiff_t dj, std::uint32_t b) const {
    if (dj < 1 || dj > static_cast<std::ptrdiff_t>(nonhead_width()) ||
        b >= target_classes_)
      return -1;
    return static_cast<std::ptrdiff_t>(b * nonhead_width()) + dj - 1;
  }

  double head(std::ptrdiff_t dj, std::uint32_t a, std::uint32_t b) const {
    const auto k = head_index(dj, a, b);
    return k < 0 ? 0.0 : head_[static_cast<std::size_t>(k)];
  }
  double nonhead(std::ptrdiff_t dj, std::uint32_t b) const {
    const auto k = nonhead_index(dj, b);
    return k < 0 ? 0.0 : nonhead_[static_cast<std::size_t>(k)];
  }

  std::vector<double>& head_values() { return head_; }
  const std::vector<double>& head_values() const { return head_; }
  std::vector<double>& nonhead_values() { return nonhead_; }
  const std::vector<double>& nonhead_values() const { return nonhead_; }

  void normalize(const CountBuffer& head_counts,
                 const CountBuffer& nonhead_counts, double smoothing) {
    for (std::size_t r = 0; r < std::size_t{source_classes_} * target_classes_; ++r)
      detail::normalize_row(head_, head_counts, r * head_width(), head_width(),
                            smoothing);
    for (std::size_t r = 0; r < target_classes_; ++r)
      detail::normalize_row(nonhead_, nonhead_counts, r * nonhead_width(),
                            nonhead_width(), smoothing);
  }

  friend bool operator==(const RelativeDistortion&,
                         const RelativeDistortion&) = default;

 private:
  std::size_t max_len_ = 100;
  std::uint32_t source_classes_ = 1;
  std::uint32_t target_classes_ = 1;
  std::vector<double> head_;
  std::vector<double> nonhead_;
};

}  // namespace morphalign

#endif  // MORPHALIGN_TABLES_HPP
