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

#ifndef MORPHALIGN_TRAINING_HPP
#define MORPHALIGN_TRAINING_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "morphalign/aligner.hpp"
#include "morphalign/corpus.hpp"
#include "morphalign/errors.hpp"
#include "morphalign/model.hpp"
#include "morphalign/parallel.hpp"
#include "morphalign/scoring.hpp"
#include "morphalign/tables.hpp"

namespace morphalign {

struct IterationEvent {
  Stage stage;
  int iteration;  // 1-based within the stage
  double log_likelihood;
  const ModelParams& params;  // after the M-step
};

struct TrainOptions {
  ModelConfig config;
  ExecPolicy exec;
  // Displacement classes for Model 4; one universal class when unset.
  std::optional<DisplacementClasses> classes;
  std::function<void(const IterationEvent&)> on_iteration;
  std::function<void(const std::string&)> on_warning;
};

/// Model 1 parameters with t(f|e) uniform over the target tokens that
/// co-occur with e.
inline ModelParams init_uniform(const Bitext& bitext,
                                const ModelConfig& config = {}) {
  if (bitext.pairs.empty()) throw EmptyCorpus();
  ModelParams p;
  p.stage = Stage::M1;
  p.config = config;
  p.src_vocab_size = bitext.src_vocab.size();
  p.tgt_vocab_size = bitext.tgt_vocab.size();
  p.ttable[0] = TTable::from_cooccurrence(bitext, config.use_null);
  return p;
}

namespace detail {

struct LexicalCounts {
  CountBuffer t;
  CountBuffer a;
  double loglik = 0.0;

  void merge(const LexicalCounts& o) {
    add_into(t, o.t);
    add_into(a, o.a);
    loglik += o.loglik;
  }
};

inline void require_stage(const ModelParams& p, Stage s, const char* what) {
  if (p.stage != s)
    throw StageMismatch(std::string(what) + " needs a " + to_string(s) +
                        " model, got " + to_string(p.stage));
}

inline void check_finite(double loglik, std::size_t line_no) {
  if (std::isnan(loglik)) throw NumericUnderflow(line_no);
}

/// Exact E-step shared by Models 1 and 2: the posterior of a_j = i is
/// proportional to t(f_j|e_i) (times a(i|j,l,m) for Model 2).
inline LexicalCounts lexical_estep(const Bitext& bitext, const ModelParams& params,
                                   Stage stage, const ExecPolicy& exec) {
  const StageView view(params, stage);
  const TTable& tt = view.ttable();
  const ATable* at = stage == Stage::M2 ? &*params.atable : nullptr;
  const bool null = params.config.use_null;
  auto make = [&] {
    return LexicalCounts{tt.zero_counts(),
                         at ? at->zero_counts() : CountBuffer{}, 0.0};
  };
  return sharded_reduce<LexicalCounts>(
      bitext.pairs.size(), exec, make, [&](LexicalCounts& acc, std::size_t k) {
        const auto& p = bitext.pairs[k];
        const std::size_t l = p.source.size(), m = p.target.size();
        const std::size_t first = null ? 0 : 1;
        std::vector<double> w(l + 1, 0.0);
        double loglik = 0.0;
        for (std::size_t j = 1; j <= m; ++j) {
          const TokenId fj = p.target[j - 1];
          double denom = 0.0;
          for (std::size_t i = first; i <= l; ++i) {
            w[i] = view.t(source_at(p.source, i), fj);
            if (at) w[i] *= at->prob(i, j, l, m);
            denom += w[i];
          }
          loglik += clamped_log(denom);
          if (!(denom > 0.0)) continue;
          for (std::size_t i = first; i <= l; ++i) {
            const double post = w[i] / denom;
            const auto ti = tt.index(source_at(p.source, i), fj);
            if (ti >= 0) acc.t[static_cast<std::size_t>(ti)] += post;
            if (at) {
              const auto ai = at->index(i, j, l, m);
              if (ai >= 0) acc.a[static_cast<std::size_t>(ai)] += post;
            }
          }
        }
        if (!at) loglik -= double(m) * std::log(double(null ? l + 1 : l));
        check_finite(loglik, p.line_no);
        acc.loglik += loglik;
      });
}

}  // namespace detail

/// One EM iteration of Model 1. Updates the lexical table in place and
/// returns the corpus log-likelihood under the parameters it started from.
inline double m1_em_iteration(const Bitext& bitext, ModelParams& params,
                              const ExecPolicy& exec = {}) {
  detail::require_stage(params, Stage::M1, "m1 iteration");
  auto counts = detail::lexical_estep(bitext, params, Stage::M1, exec);
  params.ttable[0]->normalize(counts.t);
  return counts.loglik;
}

/// Starts Model 2 from a Model 1 model: copies the lexical table and
/// sets the alignment table uniform over i in 0..l.
inline void promote_to_m2(const Bitext& bitext, ModelParams& params) {
  detail::require_stage(params, Stage::M1, "m2 promotion");
  params.ttable[1] = params.ttable[0];
  params.atable = ATable::uniform_for(bitext, params.config.use_null);
  params.stage = Stage::M2;
}

/// One EM iteration of Model 2 (promoting a Model 1 model first).
inline double m2_em_iteration(const Bitext& bitext, ModelParams& params,
                              const ExecPolicy& exec = {}) {
  if (params.stage == Stage::M1) promote_to_m2(bitext, params);
  detail::require_stage(params, Stage::M2, "m2 iteration");
  auto counts = detail::lexical_estep(bitext, params, Stage::M2, exec);
  params.ttable[1]->normalize(counts.t);
  params.atable->normalize(counts.a);
  return counts.loglik;
}

/// Model 2 -> Model 3. Fertilities are relative frequencies over the
/// Model 2 Viterbi alignments; d(j|i,l,m) is a(i|j,l,m) normalized over j;
/// p1 starts at config.p1_init.
inline void transfer_to_m3(const Bitext& bitext, ModelParams& params) {
  detail::require_stage(params, Stage::M2, "m3 transfer");
  const StageView m2(params, Stage::M2);
  const int max_fert = params.config.max_fertility;
  FertilityTable fert(params.src_vocab_size, max_fert);
  CountBuffer counts = fert.zero_counts();
  for (const auto& p : bitext.pairs) {
    const auto a = viterbi_exact(m2, p.source, p.target);
    const auto phi = a.fertilities(p.source.size());
    for (std::size_t i = 1; i <= p.source.size(); ++i) {
      if (phi[i] <= static_cast<std::uint32_t>(max_fert) &&
          p.source[i - 1] < fert.rows())
        counts[fert.index(p.source[i - 1], static_cast<int>(phi[i]))] += 1.0;
    }
  }
  fert.normalize(counts, 0.0);
  fert.p1 = params.config.p1_init;
  fert.p0 = 1.0 - fert.p1;

  auto d3 = AbsoluteDistortion::uniform(LengthKeyedTable::lengths_of(bitext));
  for (const auto& [key, off] : d3.blocks()) {
    const auto [l, m] = key;
    for (std::size_t i = 1; i <= l; ++i) {
      double total = 0.0;
      for (std::size_t j = 1; j <= m; ++j) total += m2.a(i, j, l, m);
      if (!(total > 0.0)) continue;
      for (std::size_t j = 1; j <= m; ++j)
        d3.values()[off + AbsoluteDistortion::cell(j, i, m)] =
            m2.a(i, j, l, m) / total;
    }
  }

  params.ttable[2] = params.ttable[1];
  params.fertility[0] = std::move(fert);
  params.distortion3 = std::move(d3);
  params.stage = Stage::M3;
}

/// Model 3 -> Model 4. Lexical and fertility tables carry over; the
/// relative distortion tables start uniform over their support.
inline void transfer_to_m4(const Bitext& bitext, ModelParams& params,
                           const DisplacementClasses& classes = {}) {
  detail::require_stage(params, Stage::M3, "m4 transfer");
  std::size_t max_len = std::max<std::size_t>(params.config.max_len, 1);
  for (const auto& p : bitext.pairs)
    max_len = std::max({max_len, p.source.size(), p.target.size()});
  params.ttable[3] = params.ttable[2];
  params.fertility[1] = params.fertility[0];
  params.classes = classes;
  params.distortion4 =
      RelativeDistortion(max_len, classes.source_count, classes.target_count);
  params.stage = Stage::M4;
}

namespace detail {

struct FertilityCounts {
  CountBuffer t;
  CountBuffer n;
  CountBuffer d;          // Model 3 distortion or Model 4 head table
  CountBuffer d_nonhead;  // Model 4 only
  double c0 = 0.0;        // expected (m - 2 phi0)
  double c1 = 0.0;        // expected phi0
  double loglik = 0.0;

  void merge(const FertilityCounts& o) {
    add_into(t, o.t);
    add_into(n, o.n);
    add_into(d, o.d);
    add_into(d_nonhead, o.d_nonhead);
    c0 += o.c0;
    c1 += o.c1;
    loglik += o.loglik;
  }
};

inline void collect_fertility_counts(const StageView& view,
                                     std::span<const TokenId> e,
                                     std::span<const TokenId> f,
                                     std::span<const Cept> a, double w,
                                     FertilityCounts& acc) {
  const std::size_t l = e.size(), m = f.size();
  const TTable& tt = view.ttable();
  const FertilityTable& fert = view.fertility();
  std::vector<std::uint32_t> phi(l + 1, 0);
  for (std::size_t j = 1; j <= m; ++j) {
    ++phi[a[j - 1]];
    const auto ti = tt.index(source_at(e, a[j - 1]), f[j - 1]);
    if (ti >= 0) acc.t[static_cast<std::size_t>(ti)] += w;
  }
  acc.c1 += w * double(phi[0]);
  acc.c0 += w * (double(m) - 2.0 * double(phi[0]));
  for (std::size_t i = 1; i <= l; ++i) {
    if (e[i - 1] < fert.rows() &&
        phi[i] <= static_cast<std::uint32_t>(fert.max_fertility()))
      acc.n[fert.index(e[i - 1], static_cast<int>(phi[i]))] += w;
  }
  if (view.stage() == Stage::M3) {
    const auto& d3 = view.distortion3();
    for (std::size_t j = 1; j <= m; ++j) {
      if (a[j - 1] == 0) continue;
      const auto k = d3.index(j, a[j - 1], l, m);
      if (k >= 0) acc.d[static_cast<std::size_t>(k)] += w;
    }
    return;
  }
  const auto& d4 = view.distortion4();
  for_each_displacement(e, f, a, view.classes(), [&](const Displacement& x) {
    if (x.head) {
      const auto k = d4.head_index(x.dj, x.source_class, x.target_class);
      if (k >= 0) acc.d[static_cast<std::size_t>(k)] += w;
    } else {
      const auto k = d4.nonhead_index(x.dj, x.target_class);
      if (k >= 0) acc.d_nonhead[static_cast<std::size_t>(k)] += w;
    }
  });
}

/// Neighborhood E-step for Models 3 and 4: hill-climb from the Model 2
/// Viterbi alignment, then spread each pair's unit of mass over the local
/// optimum and its move/swap neighbors in proportion to P(f, a | e).
inline FertilityCounts fertility_estep(const Bitext& bitext,
                                       const ModelParams& params, Stage stage,
                                       const ExecPolicy& exec) {
  const StageView view(params, stage);
  auto make = [&] {
    FertilityCounts c;
    c.t = view.ttable().zero_counts();
    c.n = view.fertility().zero_counts();
    if (stage == Stage::M3) {
      c.d = view.distortion3().zero_counts();
    } else {
      c.d.assign(view.distortion4().head_values().size(), 0.0);
      c.d_nonhead.assign(view.distortion4().nonhead_values().size(), 0.0);
    }
    return c;
  };
  return sharded_reduce<FertilityCounts>(
      bitext.pairs.size(), exec, make, [&](FertilityCounts& acc, std::size_t k) {
        const auto& p = bitext.pairs[k];
        const std::span<const TokenId> e = p.source, f = p.target;
        Alignment best = hillclimb(view, e, f, hillclimb_start(view, e, f));

        std::vector<double> scores{best.score};
        std::vector<Cept> a = best.a;
        for_each_neighbor(a, e.size(), view.use_null(),
                          [&](const std::vector<Cept>& n) {
                            scores.push_back(score_alignment(view, e, f, n));
                          });
        const double total = log_sum_exp(scores);
        if (total == kNegInf) {
          acc.loglik += kLogClamp;
          return;
        }
        check_finite(total, p.line_no);
        acc.loglik += total;
        collect_fertility_counts(view, e, f, best.a,
                                 std::exp(best.score - total), acc);
        std::size_t idx = 1;
        for_each_neighbor(a, e.size(), view.use_null(),
                          [&](const std::vector<Cept>& n) {
                            const double w = std::exp(scores[idx++] - total);
                            if (w > 0.0)
                              collect_fertility_counts(view, e, f, n, w, acc);
                          });
      });
}

inline void fertility_mstep(ModelParams& params, Stage stage,
                            const FertilityCounts& counts) {
  const std::size_t s = static_cast<std::size_t>(index_of(stage));
  const double smoothing = params.config.smoothing;
  params.ttable[s]->normalize(counts.t);
  auto& fert = *params.fertility[s - 2];
  fert.normalize(counts.n, smoothing);
  if (counts.c0 + counts.c1 > 0.0) {
    fert.p1 = counts.c1 / (counts.c0 + counts.c1);
    fert.p0 = 1.0 - fert.p1;
  }
  if (stage == Stage::M3)
    params.distortion3->normalize(counts.d, smoothing);
  else
    params.distortion4->normalize(counts.d, counts.d_nonhead, smoothing);
}

}  // namespace detail

/// One neighborhood-EM iteration of Model 3. Returns the pseudo
/// log-likelihood (log of the summed probability of each pair's
/// neighborhood) under the parameters it started from.
inline double m3_em_iteration(const Bitext& bitext, ModelParams& params,
                              const ExecPolicy& exec = {}) {
  detail::require_stage(params, Stage::M3, "m3 iteration");
  auto counts = detail::fertility_estep(bitext, params, Stage::M3, exec);
  detail::fertility_mstep(params, Stage::M3, counts);
  return counts.loglik;
}

/// Model 4 counterpart of m3_em_iteration.
inline double m4_em_iteration(const Bitext& bitext, ModelParams& params,
                              const ExecPolicy& exec = {}) {
  detail::require_stage(params, Stage::M4, "m4 iteration");
  auto counts = detail::fertility_estep(bitext, params, Stage::M4, exec);
  detail::fertility_mstep(params, Stage::M4, counts);
  return counts.loglik;
}

inline double em_iteration(const Bitext& bitext, ModelParams& params,
                           const ExecPolicy& exec = {}) {
  switch (params.stage) {
    case Stage::M1: return m1_em_iteration(bitext, params, exec);
    case Stage::M2: return m2_em_iteration(bitext, params, exec);
    case Stage::M3: return m3_em_iteration(bitext, params, exec);
    case Stage::M4: return m4_em_iteration(bitext, params, exec);
  }
  return 0.0;
}

/// Moves `params` one stage up.
inline void promote(const Bitext& bitext, ModelParams& params,
                    const DisplacementClasses& classes = {}) {
  switch (params.stage) {
    case Stage::M1: promote_to_m2(bitext, params); break;
    case Stage::M2: transfer_to_m3(bitext, params); break;
    case Stage::M3: transfer_to_m4(bitext, params, classes); break;
    case Stage::M4: throw StageMismatch("m4 is the last stage");
  }
}

/// Runs the schedule in order, transferring parameters between stages.
/// A stage missing from the schedule is entered with transferred but
/// untrained tables, and a warning is emitted. Training involves no random
/// choices, so the result depends only on the bitext, schedule and options.
inline ModelParams train(const Bitext& bitext, const TrainSchedule& schedule,
                         const TrainOptions& options = {}) {
  schedule.validate();
  if (bitext.pairs.empty()) throw EmptyCorpus();
  auto warn = [&](const std::string& msg) {
    if (options.on_warning) options.on_warning(msg);
  };
  const DisplacementClasses classes = options.classes.value_or(DisplacementClasses{});
  ModelParams params = init_uniform(bitext, options.config);
  bool trained_current = false;
  for (const auto& [stage, iterations] : schedule.steps) {
    while (params.stage != stage) {
      if (!trained_current)
        warn("stage " + to_string(params.stage) +
             " has no iterations; continuing from its initial tables");
      promote(bitext, params, classes);
      trained_current = false;
    }
    for (int it = 1; it <= iterations; ++it) {
      const double ll = em_iteration(bitext, params, options.exec);
      if (options.on_iteration)
        options.on_iteration(IterationEvent{stage, it, ll, params});
    }
    trained_current = true;
  }
  return params;
}

}  // namespace morphalign

#endif  // MORPHALIGN_TRAINING_HPP
