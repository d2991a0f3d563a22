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

#ifndef MORPHALIGN_ALIGNER_HPP
#define MORPHALIGN_ALIGNER_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "morphalign/corpus.hpp"
#include "morphalign/model.hpp"
#include "morphalign/parallel.hpp"
#include "morphalign/scoring.hpp"

namespace morphalign {

namespace detail {

/// Position-wise argmax of t(f_j|e_i) (times a(i|j,l,m) when
/// `with_atable`); the smallest i wins ties, so NULL wins ties.
inline std::vector<Cept> positionwise_argmax(const StageView& view,
                                             std::span<const TokenId> e,
                                             std::span<const TokenId> f,
                                             bool with_atable) {
  const std::size_t l = e.size(), m = f.size();
  const std::size_t first = view.use_null() ? 0 : 1;
  std::vector<Cept> a(m, static_cast<Cept>(first));
  for (std::size_t j = 1; j <= m; ++j) {
    double best = -1.0;
    for (std::size_t i = first; i <= l; ++i) {
      double v = view.t(source_at(e, i), f[j - 1]);
      if (with_atable) v *= view.a(i, j, l, m);
      if (v > best) {
        best = v;
        a[j - 1] = static_cast<Cept>(i);
      }
    }
  }
  return a;
}

}  // namespace detail

/// Exact Viterbi alignment for Models 1 and 2, whose joint probability
/// factorizes over target positions.
inline Alignment viterbi_exact(const StageView& view, std::span<const TokenId> e,
                               std::span<const TokenId> f) {
  if (view.stage() != Stage::M1 && view.stage() != Stage::M2)
    throw StageMismatch("exact Viterbi exists for m1 and m2 only");
  Alignment out;
  out.a = detail::positionwise_argmax(view, e, f, view.stage() == Stage::M2);
  out.score = score_alignment(view, e, f, out.a);
  return out;
}

/// Starting point of the fertility-model search: the Model 2 Viterbi
/// alignment under the view's lexical table and the model's alignment table.
inline Alignment hillclimb_start(const StageView& view,
                                 std::span<const TokenId> e,
                                 std::span<const TokenId> f) {
  Alignment out;
  out.a = detail::positionwise_argmax(view, e, f, true);
  out.score = score_alignment(view, e, f, out.a);
  return out;
}

/// Visits every move (one a_j set to another cept) and every swap
/// (a_j and a_k exchanged, j < k, a_j != a_k) of `a`, in that order.
/// `a` is modified in place during the visit and restored afterwards.
template <class Visit>
void for_each_neighbor(std::vector<Cept>& a, std::size_t l, bool use_null,
                       Visit&& visit) {
  const std::size_t m = a.size();
  const Cept first = use_null ? 0 : 1;
  for (std::size_t j = 0; j < m; ++j) {
    const Cept old = a[j];
    for (Cept i = first; i <= l; ++i) {
      if (i == old) continue;
      a[j] = i;
      visit(static_cast<const std::vector<Cept>&>(a));
    }
    a[j] = old;
  }
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = j + 1; k < m; ++k) {
      if (a[j] == a[k]) continue;
      std::swap(a[j], a[k]);
      visit(static_cast<const std::vector<Cept>&>(a));
      std::swap(a[j], a[k]);
    }
  }
}

/// Move/swap neighborhood of `a` (excluding `a`).
inline std::vector<std::vector<Cept>> neighbors(std::vector<Cept> a,
                                                std::size_t l,
                                                bool use_null = true) {
  std::vector<std::vector<Cept>> out;
  for_each_neighbor(a, l, use_null,
                    [&](const std::vector<Cept>& n) { out.push_back(n); });
  return out;
}

/// Steepest-ascent local search over the move/swap neighborhood. Only
/// strictly better neighbors are accepted, so the search terminates; among
/// equally good best neighbors the first visited wins.
inline Alignment hillclimb(const StageView& view, std::span<const TokenId> e,
                           std::span<const TokenId> f, Alignment start) {
  Alignment cur = std::move(start);
  cur.score = score_alignment(view, e, f, cur.a);
  std::vector<Cept> best_a;
  for (;;) {
    double best = cur.score;
    bool improved = false;
    for_each_neighbor(cur.a, e.size(), view.use_null(),
                      [&](const std::vector<Cept>& n) {
                        const double s = score_alignment(view, e, f, n);
                        if (s > best) {
                          best = s;
                          best_a = n;
                          improved = true;
                        }
                      });
    if (!improved) return cur;
    cur.a = best_a;
    cur.score = best;
  }
}

/// Best alignment of one pair: exact for Models 1-2, hill-climbed from the
/// Model 2 Viterbi start for Models 3-4.
inline Alignment align_pair(const StageView& view, std::span<const TokenId> e,
                            std::span<const TokenId> f) {
  if (view.stage() == Stage::M1 || view.stage() == Stage::M2)
    return viterbi_exact(view, e, f);
  return hillclimb(view, e, f, hillclimb_start(view, e, f));
}

struct AlignedPair {
  std::size_t line_no = 0;
  Alignment alignment;
  // coverage[i] = target positions (1-based) aligned to cept i, i in 0..l.
  std::vector<std::vector<std::uint32_t>> coverage;
};

struct AlignedCorpus {
  std::string direction_label;
  Stage stage = Stage::M1;
  std::vector<AlignedPair> pairs;
};

inline AlignedPair make_aligned_pair(std::size_t line_no, Alignment a,
                                     std::size_t l) {
  AlignedPair out;
  out.line_no = line_no;
  out.coverage = a.coverage(l);
  out.alignment = std::move(a);
  return out;
}

/// Aligns every pair at `stage`. Unless `allow_unknown`, a token outside
/// the model vocabulary raises UnknownToken. Output order follows input
/// order whatever the execution order.
inline AlignedCorpus align_corpus(const Bitext& bitext, const ModelParams& params,
                                  Stage stage, bool allow_unknown = false,
                                  const ExecPolicy& exec = {}) {
  if (!allow_unknown) {
    for (const auto& p : bitext.pairs) {
      for (auto id : p.source)
        if (id >= params.src_vocab_size)
          throw UnknownToken(bitext.src_vocab.decode(id));
      for (auto id : p.target)
        if (id >= params.tgt_vocab_size)
          throw UnknownToken(bitext.tgt_vocab.decode(id));
    }
  }
  const StageView view(params, stage);
  AlignedCorpus out;
  out.direction_label = bitext.direction_label;
  out.stage = stage;
  out.pairs.resize(bitext.pairs.size());
  parallel_for(bitext.pairs.size(), exec, [&](std::size_t k) {
    const auto& p = bitext.pairs[k];
    out.pairs[k] =
        make_aligned_pair(p.line_no, align_pair(view, p.source, p.target),
                          p.source.size());
  });
  return out;
}

}  // namespace morphalign

#endif  // MORPHALIGN_ALIGNER_HPP
