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

#ifndef MORPHALIGN_MODEL_HPP
#define MORPHALIGN_MODEL_HPP

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "morphalign/corpus.hpp"
#include "morphalign/errors.hpp"
#include "morphalign/tables.hpp"

namespace morphalign {

enum class Stage : int { M1 = 0, M2 = 1, M3 = 2, M4 = 3 };

inline constexpr std::array<Stage, 4> kAllStages = {Stage::M1, Stage::M2,
                                                   Stage::M3, Stage::M4};

inline int index_of(Stage s) { return static_cast<int>(s); }

inline std::string to_string(Stage s) {
  return "m" + std::to_string(index_of(s) + 1);
}

/// Accepts "m1".."m4", "M1".."M4" or "1".."4".
inline Stage parse_stage(std::string_view text) {
  if (!text.empty() && (text.front() == 'm' || text.front() == 'M'))
    text.remove_prefix(1);
  if (text.size() == 1 && text[0] >= '1' && text[0] <= '4')
    return static_cast<Stage>(text[0] - '1');
  throw ScheduleError("invalid stage: " + std::string(text));
}

/// Ordered (stage, iterations) list.
struct TrainSchedule {
  std::vector<std::pair<Stage, int>> steps;

  static TrainSchedule standard() {
    return TrainSchedule{{{Stage::M1, 5}, {Stage::M2, 5}, {Stage::M3, 3},
                          {Stage::M4, 3}}};
  }

  void validate() const {
    if (steps.empty()) throw ScheduleError("empty schedule");
    for (std::size_t k = 0; k < steps.size(); ++k) {
      if (steps[k].second < 1)
        throw ScheduleError("iteration count must be >= 1 for stage " +
                            to_string(steps[k].first));
      if (k > 0 && index_of(steps[k].first) <= index_of(steps[k - 1].first))
        throw ScheduleError("stages must appear in ascending order");
    }
  }

  Stage final_stage() const { return steps.back().first; }

  /// "1:5,2:5,3:3,4:3" (stage prefixes m/M optional).
  static TrainSchedule parse(std::string_view text) {
    TrainSchedule s;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      auto comma = text.find(',', pos);
      if (comma == std::string_view::npos) comma = text.size();
      auto item = text.substr(pos, comma - pos);
      auto colon = item.find(':');
      if (colon == std::string_view::npos)
        throw ScheduleError("schedule item needs stage:iterations: " +
                            std::string(item));
      const Stage stage = parse_stage(item.substr(0, colon));
      const auto count_text = std::string(item.substr(colon + 1));
      int count = 0;
      try {
        std::size_t used = 0;
        count = std::stoi(count_text, &used);
        if (used != count_text.size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw ScheduleError("invalid iteration count: " + count_text);
      }
      s.steps.emplace_back(stage, count);
      pos = comma + 1;
    }
    s.validate();
    return s;
  }

  std::string str() const {
    std::string out;
    for (const auto& [stage, n] : steps) {
      if (!out.empty()) out += ',';
      out += std::to_string(index_of(stage) + 1) + ":" + std::to_string(n);
    }
    return out;
  }

  friend bool operator==(const TrainSchedule&, const TrainSchedule&) = default;
};

/// Settings that shape the model and are stored with it.
struct ModelConfig {
  bool use_null = true;
  int max_fertility = 9;
  std::size_t max_len = 100;
  // Lower bound applied to every lexical lookup; 0 disables it.
  double prob_floor = 0.0;
  // Interpolation weight with the uniform distribution for fertility and
  // distortion M-steps (Models 3 and 4).
  double smoothing = 1e-3;
  double p1_init = 0.05;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// All parameter tables. One lexical table is kept per trained stage so a
/// model can still be scored at an earlier stage.
struct ModelParams {
  Stage stage = Stage::M1;
  ModelConfig config;
  std::size_t src_vocab_size = 0;
  std::size_t tgt_vocab_size = 0;
  std::array<std::optional<TTable>, 4> ttable;
  std::optional<ATable> atable;
  // [0] as of Model 3, [1] as of Model 4.
  std::array<std::optional<FertilityTable>, 2> fertility;
  std::optional<AbsoluteDistortion> distortion3;
  std::optional<RelativeDistortion> distortion4;
  DisplacementClasses classes;

  bool has_stage(Stage s) const {
    if (!ttable[static_cast<std::size_t>(index_of(s))]) return false;
    switch (s) {
      case Stage::M1: return true;
      case Stage::M2: return atable.has_value();
      case Stage::M3: return fertility[0].has_value() && distortion3.has_value();
      case Stage::M4: return fertility[1].has_value() && distortion4.has_value();
    }
    return false;
  }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Read-only handle on the tables one stage scores with.
class StageView {
 public:
  StageView(const ModelParams& params, Stage stage)
      : params_(&params), stage_(stage) {
    if (!params.has_stage(stage))
      throw StageMismatch("model has no " + to_string(stage) + " tables (trained to " +
                          to_string(params.stage) + ")");
    ttable_ = &*params.ttable[static_cast<std::size_t>(index_of(stage))];
    if (params.atable) atable_ = &*params.atable;
    if (stage == Stage::M3) {
      fertility_ = &*params.fertility[0];
      distortion3_ = &*params.distortion3;
    } else if (stage == Stage::M4) {
      fertility_ = &*params.fertility[1];
      distortion4_ = &*params.distortion4;
    }
  }

  Stage stage() const { return stage_; }
  const ModelConfig& config() const { return params_->config; }
  bool use_null() const { return params_->config.use_null; }
  const TTable& ttable() const { return *ttable_; }
  const ATable* atable() const { return atable_; }
  const FertilityTable& fertility() const { return *fertility_; }
  const AbsoluteDistortion& distortion3() const { return *distortion3_; }
  const RelativeDistortion& distortion4() const { return *distortion4_; }
  const DisplacementClasses& classes() const { return params_->classes; }

  /// t(f|e). A target token outside the model vocabulary is generated by
  /// NULL with certainty; a source token outside it generates nothing.
  double t(TokenId e, TokenId f) const {
    double p;
    if (f >= params_->tgt_vocab_size)
      p = e == kNullId ? 1.0 : 0.0;
    else
      p = ttable_->prob(e, f);
    return std::max(p, params_->config.prob_floor);
  }

  /// a(i|j,l,m); uniform when the model has no alignment table.
  double a(std::size_t i, std::size_t j, std::size_t l, std::size_t m) const {
    if (atable_) return atable_->prob(i, j, l, m);
    if (use_null()) return 1.0 / static_cast<double>(l + 1);
    return i == 0 ? 0.0 : 1.0 / static_cast<double>(l);
  }

 private:
  const ModelParams* params_;
  Stage stage_;
  const TTable* ttable_ = nullptr;
  const ATable* atable_ = nullptr;
  const FertilityTable* fertility_ = nullptr;
  const AbsoluteDistortion* distortion3_ = nullptr;
  const RelativeDistortion* distortion4_ = nullptr;
};

/// A trained model together with what it was trained on.
struct Model {
  ModelParams params;
  Vocabulary src_vocab = Vocabulary::source();
  Vocabulary tgt_vocab = Vocabulary::target();
  TrainSchedule schedule = TrainSchedule::standard();
  std::string direction_label;
  std::uint64_t seed = 0;

  friend bool operator==(const Model&, const Model&) = default;
};

}  // namespace morphalign

#endif  // MORPHALIGN_MODEL_HPP
