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

#ifndef MORPHALIGN_SCORING_HPP
#define MORPHALIGN_SCORING_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "morphalign/corpus.hpp"
#include "morphalign/model.hpp"

namespace morphalign {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Smallest log-factor admitted by likelihood accumulation (about the
// log of the smallest subnormal double).
inline constexpr double kLogClamp = -745.0;

inline double clamped_log(double x) {
  return x > 0.0 ? std::max(std::log(x), kLogClamp) : kLogClamp;
}

inline double log_sum_exp(std::span<const double> xs) {
  double hi = kNegInf;
  for (double x : xs) hi = std::max(hi, x);
  if (hi == kNegInf) return kNegInf;
  double sum = 0.0;
  for (double x : xs) sum += std::exp(x - hi);
  return hi + std::log(sum);
}

using Cept = std::uint32_t;

/// a[j-1] is the cept (source position, 0 for NULL) of target position j.
struct Alignment {
  std::vector<Cept> a;
  double score = kNegInf;

  /// phi[i] = number of target positions aligned to cept i, i in 0..l.
  std::vector<std::uint32_t> fertilities(std::size_t l) const {
    std::vector<std::uint32_t> phi(l + 1, 0);
    for (auto i : a) ++phi[i];
    return phi;
  }

  /// For every cept i in 0..l, the target positions (1-based) aligned to it.
  std::vector<std::vector<std::uint32_t>> coverage(std::size_t l) const {
    std::vector<std::vector<std::uint32_t>> cov(l + 1);
    for (std::size_t j = 0; j < a.size(); ++j)
      cov[a[j]].push_back(static_cast<std::uint32_t>(j + 1));
    return cov;
  }

  friend bool operator==(const Alignment& x, const Alignment& y) {
    return x.a == y.a;
  }
};

/// Source token at cept i (i = 0 is NULL).
inline TokenId source_at(std::span<const TokenId> e, std::size_t i) {
  return i == 0 ? kNullId : e[i - 1];
}

inline void check_alignment(std::span<const TokenId> e,
                            std::span<const TokenId> f,
                            std::span<const Cept> a) {
  if (a.size() != f.size())
    throw std::invalid_argument("alignment length differs from target length");
  for (auto i : a)
    if (i > e.size()) throw std::invalid_argument("cept index out of range");
}

/// log P(f|e) for Models 1 and 2, with the per-position sum over cepts
/// done in closed form. Exact: no clamping.
inline double log_sentence_prob(const StageView& view,
                                std::span<const TokenId> e,
                                std::span<const TokenId> f) {
  if (view.stage() != Stage::M1 && view.stage() != Stage::M2)
    throw StageMismatch("closed-form likelihood exists for m1 and m2 only");
  const std::size_t l = e.size(), m = f.size();
  const std::size_t first = view.use_null() ? 0 : 1;
  double logp = 0.0;
  for (std::size_t j = 1; j <= m; ++j) {
    double sum = 0.0;
    for (std::size_t i = first; i <= l; ++i) {
      const double t = view.t(source_at(e, i), f[j - 1]);
      sum += view.stage() == Stage::M2 ? t * view.a(i, j, l, m) : t;
    }
    logp += std::log(sum);
  }
  if (view.stage() == Stage::M1)
    logp -= static_cast<double>(m) *
            std::log(static_cast<double>(view.use_null() ? l + 1 : l));
  return logp;
}

namespace detail {

inline double log_choose(std::size_t n, std::size_t k) {
  return std::lgamma(double(n) + 1) - std::lgamma(double(k) + 1) -
         std::lgamma(double(n - k) + 1);
}

/// NULL insertion term: C(m - phi0, phi0) p0^(m - 2 phi0) p1^phi0.
inline double log_null_term(const FertilityTable& n, std::size_t m,
                            std::size_t phi0) {
  if (2 * phi0 > m) return kNegInf;
  double logp = log_choose(m - phi0, phi0);
  if (m - 2 * phi0 > 0) logp += double(m - 2 * phi0) * std::log(n.p0);
  if (phi0 > 0) logp += double(phi0) * std::log(n.p1);
  return logp;
}

inline std::uint32_t ceil_mean(std::span<const std::uint32_t> positions) {
  std::uint64_t sum = 0;
  for (auto p : positions) sum += p;
  return static_cast<std::uint32_t>((sum + positions.size() - 1) /
                                    positions.size());
}

}  // namespace detail

/// One relative-displacement event of a Model 4 alignment.
struct Displacement {
  bool head;            // first word of its cept
  std::ptrdiff_t dj;    // offset from the previous center / previous word
  std::uint32_t source_class;  // class of the previous cept's word (head only)
  std::uint32_t target_class;  // class of the placed target word
  std::uint32_t position;      // 1-based target position
};

/// Visits the displacement events of `a` in cept order. The previous
/// center starts at 0 and the previous word at NULL.
template <class Visit>
void for_each_displacement(std::span<const TokenId> e,
                           std::span<const TokenId> f,
                           std::span<const Cept> a,
                           const DisplacementClasses& cls, Visit&& visit) {
  const std::size_t l = e.size(), m = f.size();
  std::vector<std::vector<std::uint32_t>> cepts(l + 1);
  for (std::size_t j = 1; j <= m; ++j)
    cepts[a[j - 1]].push_back(static_cast<std::uint32_t>(j));
  std::ptrdiff_t prev_center = 0;
  TokenId prev_word = kNullId;
  for (std::size_t i = 1; i <= l; ++i) {
    const auto& pos = cepts[i];
    if (pos.empty()) continue;
    visit(Displacement{true, std::ptrdiff_t(pos[0]) - prev_center,
                       cls.source_class(prev_word),
                       cls.target_class(f[pos[0] - 1]), pos[0]});
    for (std::size_t k = 1; k < pos.size(); ++k)
      visit(Displacement{false,
                         std::ptrdiff_t(pos[k]) - std::ptrdiff_t(pos[k - 1]),
                         0, cls.target_class(f[pos[k] - 1]), pos[k]});
    prev_center = detail::ceil_mean(pos);
    prev_word = e[i - 1];
  }
}

/// log P(f, a | e) under the view's stage, with the length factor P(m|e)
/// taken as 1. Returns -inf when any factor is zero.
///
///   M1: prod_j t(f_j|e_aj) / (l+1)^m
///   M2: prod_j t(f_j|e_aj) a(aj|j,l,m)
///   M3: null term * prod_i phi_i! n(phi_i|e_i) * prod_j t(f_j|e_aj)
///       * prod_{j: aj>0} d(j|aj,l,m)
///   M4: as M3 without phi_i!, with the distortion replaced by the head
///       displacement of each non-empty cept relative to the center of the
///       previous one, and the within-cept displacement of the other words.
inline double score_alignment(const StageView& view, std::span<const TokenId> e,
                              std::span<const TokenId> f,
                              std::span<const Cept> a) {
  check_alignment(e, f, a);
  const std::size_t l = e.size(), m = f.size();
  if (!view.use_null()) {
    for (auto i : a)
      if (i == 0) return kNegInf;
  }
  double logp = 0.0;
  for (std::size_t j = 1; j <= m; ++j)
    logp += std::log(view.t(source_at(e, a[j - 1]), f[j - 1]));

  switch (view.stage()) {
    case Stage::M1:
      return logp - double(m) * std::log(double(view.use_null() ? l + 1 : l));
    case Stage::M2:
      for (std::size_t j = 1; j <= m; ++j)
        logp += std::log(view.a(a[j - 1], j, l, m));
      return logp;
    case Stage::M3:
    case Stage::M4:
      break;
  }
  if (logp == kNegInf) return kNegInf;

  const FertilityTable& fert = view.fertility();
  std::vector<std::uint32_t> phi(l + 1, 0);
  for (auto i : a) ++phi[i];
  if (view.use_null()) {
    logp += detail::log_null_term(fert, m, phi[0]);
  }
  for (std::size_t i = 1; i <= l; ++i) {
    if (phi[i] > static_cast<std::uint32_t>(fert.max_fertility())) return kNegInf;
    logp += std::log(fert.prob(e[i - 1], static_cast<int>(phi[i])));
    if (view.stage() == Stage::M3) logp += std::lgamma(double(phi[i]) + 1);
  }
  if (logp == kNegInf) return kNegInf;

  if (view.stage() == Stage::M3) {
    const auto& d = view.distortion3();
    for (std::size_t j = 1; j <= m; ++j)
      if (a[j - 1] != 0) logp += std::log(d.prob(j, a[j - 1], l, m));
    return logp;
  }

  const auto& d = view.distortion4();
  for_each_displacement(e, f, a, view.classes(), [&](const Displacement& x) {
    logp += std::log(x.head ? d.head(x.dj, x.source_class, x.target_class)
                            : d.nonhead(x.dj, x.target_class));
  });
  return logp;
}

}  // namespace morphalign

#endif  // MORPHALIGN_SCORING_HPP
