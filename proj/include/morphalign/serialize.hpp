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

#ifndef MORPHALIGN_SERIALIZE_HPP
#define MORPHALIGN_SERIALIZE_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "morphalign/errors.hpp"
#include "morphalign/model.hpp"
#include "morphalign/tables.hpp"

namespace morphalign {

inline constexpr int kModelFormatVersion = 1;

// Model files are JSON. Every table is a list of
// [condition, outcome, probability] triples sorted lexicographically,
// where a condition is an integer or an integer array.

namespace detail {

using json = nlohmann::json;
using Ints = std::vector<std::int64_t>;

struct Triple {
  Ints condition;
  std::int64_t outcome;
  double prob;
  bool operator<(const Triple& o) const {
    return std::tie(condition, outcome) < std::tie(o.condition, o.outcome);
  }
};

inline json triples_json(std::vector<Triple> rows, bool scalar_condition) {
  std::sort(rows.begin(), rows.end());
  json out = json::array();
  for (const auto& r : rows) {
    json cond = scalar_condition ? json(r.condition[0]) : json(r.condition);
    out.push_back(json::array({cond, r.outcome, r.prob}));
  }
  return out;
}

inline std::vector<Triple> read_triples(const json& arr, std::size_t arity) {
  if (!arr.is_array()) throw ModelFormatError("table is not an array");
  std::vector<Triple> out;
  out.reserve(arr.size());
  for (const auto& row : arr) {
    if (!row.is_array() || row.size() != 3)
      throw ModelFormatError("table row is not a triple");
    Triple t;
    if (row[0].is_array())
      t.condition = row[0].get<Ints>();
    else
      t.condition = {row[0].get<std::int64_t>()};
    if (t.condition.size() != arity)
      throw ModelFormatError("table condition has wrong arity");
    t.outcome = row[1].get<std::int64_t>();
    t.prob = row[2].get<double>();
    out.push_back(std::move(t));
  }
  return out;
}

inline json vocab_json(const Vocabulary& v) {
  json out = json::array();
  for (std::size_t id = 1; id < v.size(); ++id)
    out.push_back(json::array({id, v.decode(static_cast<TokenId>(id)),
                               v.frequency(static_cast<TokenId>(id))}));
  return out;
}

inline Vocabulary vocab_from_json(const json& arr, bool source) {
  Vocabulary v = source ? Vocabulary::source() : Vocabulary::target();
  for (const auto& row : arr) {
    const auto id = row.at(0).get<std::size_t>();
    if (id != v.size()) throw ModelFormatError("vocabulary ids are not dense");
    v.add(row.at(1).get<std::string>(), row.at(2).get<std::uint64_t>());
  }
  return v;
}

inline json ttable_json(const TTable& t) {
  std::vector<Triple> rows;
  rows.reserve(t.size());
  for (std::size_t e = 0; e < t.rows(); ++e) {
    const auto cols = t.row_targets(static_cast<TokenId>(e));
    const auto probs = t.row_probs(static_cast<TokenId>(e));
    for (std::size_t k = 0; k < cols.size(); ++k)
      rows.push_back({{std::int64_t(e)}, cols[k], probs[k]});
  }
  return triples_json(std::move(rows), true);
}

inline TTable ttable_from_json(const json& arr, std::size_t rows) {
  std::vector<std::tuple<TokenId, TokenId, double>> cells;
  for (const auto& t : read_triples(arr, 1)) {
    if (t.condition[0] < 0 || std::size_t(t.condition[0]) >= rows || t.outcome < 0)
      throw ModelFormatError("lexical cell out of range");
    cells.emplace_back(static_cast<TokenId>(t.condition[0]),
                       static_cast<TokenId>(t.outcome), t.prob);
  }
  return TTable::from_cells(rows, std::move(cells));
}

inline LengthKeyedTable::KeySet lengths_from(const std::vector<Triple>& rows) {
  // Conditions are [x, l, m] for both length-keyed tables.
  LengthKeyedTable::KeySet keys;
  for (const auto& r : rows) {
    if (r.condition[1] < 1 || r.condition[2] < 1)
      throw ModelFormatError("length key out of range");
    keys.emplace(static_cast<std::uint32_t>(r.condition[1]),
                 static_cast<std::uint32_t>(r.condition[2]));
  }
  return keys;
}

inline json atable_json(const ATable& a) {
  std::vector<Triple> rows;
  for (const auto& [key, off] : a.blocks()) {
    const auto [l, m] = key;
    for (std::size_t j = 1; j <= m; ++j)
      for (std::size_t i = 0; i <= l; ++i)
        rows.push_back({{std::int64_t(j), l, m}, std::int64_t(i),
                        a.values()[off + ATable::cell(i, j, l)]});
  }
  return triples_json(std::move(rows), false);
}

inline ATable atable_from_json(const json& arr, bool with_null) {
  const auto rows = read_triples(arr, 3);
  ATable a = ATable::uniform(lengths_from(rows), with_null);
  for (const auto& r : rows) {
    const auto [j, l, m] = std::tuple(r.condition[0], r.condition[1], r.condition[2]);
    if (j < 1 || j > m || r.outcome < 0 || r.outcome > l)
      throw ModelFormatError("alignment cell out of range");
    a.values()[std::size_t(a.index(std::size_t(r.outcome), std::size_t(j),
                                   std::size_t(l), std::size_t(m)))] = r.prob;
  }
  return a;
}

inline json distortion3_json(const AbsoluteDistortion& d) {
  std::vector<Triple> rows;
  for (const auto& [key, off] : d.blocks()) {
    const auto [l, m] = key;
    for (std::size_t i = 1; i <= l; ++i)
      for (std::size_t j = 1; j <= m; ++j)
        rows.push_back({{std::int64_t(i), l, m}, std::int64_t(j),
                        d.values()[off + AbsoluteDistortion::cell(j, i, m)]});
  }
  return triples_json(std::move(rows), false);
}

inline AbsoluteDistortion distortion3_from_json(const json& arr) {
  const auto rows = read_triples(arr, 3);
  auto d = AbsoluteDistortion::uniform(lengths_from(rows));
  for (const auto& r : rows) {
    const auto [i, l, m] = std::tuple(r.condition[0], r.condition[1], r.condition[2]);
    if (i < 1 || i > l || r.outcome < 1 || r.outcome > m)
      throw ModelFormatError("distortion cell out of range");
    d.values()[std::size_t(d.index(std::size_t(r.outcome), std::size_t(i),
                                   std::size_t(l), std::size_t(m)))] = r.prob;
  }
  return d;
}

inline json fertility_json(const FertilityTable& n) {
  std::vector<Triple> rows;
  for (std::size_t e = 1; e < n.rows(); ++e)
    for (int phi = 0; phi <= n.max_fertility(); ++phi)
      rows.push_back({{std::int64_t(e)}, phi, n.prob(static_cast<TokenId>(e), phi)});
  return json{{"max_fertility", n.max_fertility()},
              {"p0", n.p0},
              {"p1", n.p1},
              {"cells", triples_json(std::move(rows), true)}};
}

inline FertilityTable fertility_from_json(const json& obj, std::size_t rows) {
  const int max_fert = obj.at("max_fertility").get<int>();
  if (max_fert < 0) throw ModelFormatError("negative max_fertility");
  FertilityTable n(rows, max_fert);
  n.p0 = obj.at("p0").get<double>();
  n.p1 = obj.at("p1").get<double>();
  for (const auto& r : read_triples(obj.at("cells"), 1)) {
    if (r.condition[0] < 1 || std::size_t(r.condition[0]) >= rows ||
        r.outcome < 0 || r.outcome > max_fert)
      throw ModelFormatError("fertility cell out of range");
    n.values()[n.index(static_cast<TokenId>(r.condition[0]),
                       static_cast<int>(r.outcome))] = r.prob;
  }
  return n;
}

inline json distortion4_json(const RelativeDistortion& d) {
  std::vector<Triple> head, nonhead;
  for (std::uint32_t a = 0; a < d.source_classes(); ++a)
    for (std::uint32_t b = 0; b < d.target_classes(); ++b)
      for (std::ptrdiff_t dj = d.min_head_displacement();
           dj < d.min_head_displacement() + std::ptrdiff_t(d.head_width()); ++dj)
        head.push_back({{a, b}, dj, d.head(dj, a, b)});
  for (std::uint32_t b = 0; b < d.target_classes(); ++b)
    for (std::ptrdiff_t dj = 1; dj <= std::ptrdiff_t(d.nonhead_width()); ++dj)
      nonhead.push_back({{b}, dj, d.nonhead(dj, b)});
  return json{{"max_len", d.max_len()},
              {"source_classes", d.source_classes()},
              {"target_classes", d.target_classes()},
              {"head", triples_json(std::move(head), false)},
              {"nonhead", triples_json(std::move(nonhead), false)}};
}

inline RelativeDistortion distortion4_from_json(const json& obj) {
  RelativeDistortion d(obj.at("max_len").get<std::size_t>(),
                       obj.at("source_classes").get<std::uint32_t>(),
                       obj.at("target_classes").get<std::uint32_t>());
  for (const auto& r : read_triples(obj.at("head"), 2)) {
    const auto k = d.head_index(r.outcome, std::uint32_t(r.condition[0]),
                                std::uint32_t(r.condition[1]));
    if (k < 0) throw ModelFormatError("head displacement out of range");
    d.head_values()[std::size_t(k)] = r.prob;
  }
  for (const auto& r : read_triples(obj.at("nonhead"), 1)) {
    const auto k = d.nonhead_index(r.outcome, std::uint32_t(r.condition[0]));
    if (k < 0) throw ModelFormatError("non-head displacement out of range");
    d.nonhead_values()[std::size_t(k)] = r.prob;
  }
  return d;
}

inline json class_map_json(const std::vector<std::uint32_t>& classes) {
  json out = json::array();
  for (std::size_t id = 0; id < classes.size(); ++id)
    if (classes[id] != 0) out.push_back(json::array({id, classes[id]}));
  return out;
}

inline std::vector<std::uint32_t> class_map_from_json(const json& arr,
                                                      std::size_t size) {
  std::vector<std::uint32_t> out;
  if (arr.empty()) return out;
  out.assign(size, 0);
  for (const auto& row : arr) {
    const auto id = row.at(0).get<std::size_t>();
    if (id >= size) throw ModelFormatError("class map id out of range");
    out[id] = row.at(1).get<std::uint32_t>();
  }
  return out;
}

}  // namespace detail

inline nlohmann::json model_to_json(const Model& model) {
  using detail::json;
  const auto& p = model.params;
  json schedule = json::array();
  for (const auto& [stage, n] : model.schedule.steps)
    schedule.push_back(json::array({to_string(stage), n}));
  json tables = json::object();
  json t = json::object();
  for (Stage s : kAllStages)
    if (const auto& tt = p.ttable[std::size_t(index_of(s))])
      t[to_string(s)] = detail::ttable_json(*tt);
  tables["t"] = std::move(t);
  if (p.atable) tables["a"] = detail::atable_json(*p.atable);
  if (p.fertility[0]) tables["n"]["m3"] = detail::fertility_json(*p.fertility[0]);
  if (p.fertility[1]) tables["n"]["m4"] = detail::fertility_json(*p.fertility[1]);
  if (p.distortion3) tables["d3"] = detail::distortion3_json(*p.distortion3);
  if (p.distortion4) tables["d4"] = detail::distortion4_json(*p.distortion4);

  return json{
      {"format_version", kModelFormatVersion},
      {"direction_label", model.direction_label},
      {"stage", to_string(p.stage)},
      {"seed", model.seed},
      {"schedule", std::move(schedule)},
      {"config",
       {{"use_null", p.config.use_null},
        {"max_fertility", p.config.max_fertility},
        {"max_len", p.config.max_len},
        {"prob_floor", p.config.prob_floor},
        {"smoothing", p.config.smoothing},
        {"p1_init", p.config.p1_init}}},
      {"vocabulary",
       {{"source", detail::vocab_json(model.src_vocab)},
        {"target", detail::vocab_json(model.tgt_vocab)}}},
      {"classes",
       {{"source_count", p.classes.source_count},
        {"target_count", p.classes.target_count},
        {"source", detail::class_map_json(p.classes.source)},
        {"target", detail::class_map_json(p.classes.target)}}},
      {"tables", std::move(tables)}};
}

inline Model model_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("format_version"))
    throw ModelFormatError("not a model file: missing format_version");
  const auto version = doc.at("format_version");
  if (!version.is_number_integer() || version.get<int>() != kModelFormatVersion)
    throw ModelFormatError("unsupported model format_version " + version.dump() +
                           " (expected " + std::to_string(kModelFormatVersion) + ")");
  try {
    Model model;
    model.direction_label = doc.at("direction_label").get<std::string>();
    model.seed = doc.at("seed").get<std::uint64_t>();
    model.schedule.steps.clear();
    for (const auto& step : doc.at("schedule"))
      model.schedule.steps.emplace_back(parse_stage(step.at(0).get<std::string>()),
                                        step.at(1).get<int>());
    if (model.schedule.steps.empty()) model.schedule = TrainSchedule::standard();
    model.src_vocab = detail::vocab_from_json(doc.at("vocabulary").at("source"), true);
    model.tgt_vocab = detail::vocab_from_json(doc.at("vocabulary").at("target"), false);

    auto& p = model.params;
    const auto& cfg = doc.at("config");
    p.config.use_null = cfg.at("use_null").get<bool>();
    p.config.max_fertility = cfg.at("max_fertility").get<int>();
    p.config.max_len = cfg.at("max_len").get<std::size_t>();
    p.config.prob_floor = cfg.at("prob_floor").get<double>();
    p.config.smoothing = cfg.at("smoothing").get<double>();
    p.config.p1_init = cfg.at("p1_init").get<double>();
    p.stage = parse_stage(doc.at("stage").get<std::string>());
    p.src_vocab_size = model.src_vocab.size();
    p.tgt_vocab_size = model.tgt_vocab.size();

    const auto& cls = doc.at("classes");
    p.classes.source_count = cls.at("source_count").get<std::uint32_t>();
    p.classes.target_count = cls.at("target_count").get<std::uint32_t>();
    p.classes.source = detail::class_map_from_json(cls.at("source"), p.src_vocab_size);
    p.classes.target = detail::class_map_from_json(cls.at("target"), p.tgt_vocab_size);

    const auto& tables = doc.at("tables");
    for (Stage s : kAllStages) {
      const auto key = to_string(s);
      if (tables.at("t").contains(key))
        p.ttable[std::size_t(index_of(s))] =
            detail::ttable_from_json(tables.at("t").at(key), p.src_vocab_size);
    }
    if (tables.contains("a"))
      p.atable = detail::atable_from_json(tables.at("a"), p.config.use_null);
    if (tables.contains("n")) {
      if (tables.at("n").contains("m3"))
        p.fertility[0] = detail::fertility_from_json(tables.at("n").at("m3"), p.src_vocab_size);
      if (tables.at("n").contains("m4"))
        p.fertility[1] = detail::fertility_from_json(tables.at("n").at("m4"), p.src_vocab_size);
    }
    if (tables.contains("d3"))
      p.distortion3 = detail::distortion3_from_json(tables.at("d3"));
    if (tables.contains("d4"))
      p.distortion4 = detail::distortion4_from_json(tables.at("d4"));
    if (!p.has_stage(p.stage))
      throw ModelFormatError("model declares stage " + to_string(p.stage) +
                             " but lacks its tables");
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw ModelFormatError(std::string("malformed model file: ") + e.what());
  } catch (const ScheduleError& e) {
    throw ModelFormatError(std::string("malformed model file: ") + e.what());
  }
}

inline std::string serialize_model(const Model& model) {
  return model_to_json(model).dump(1) + "\n";
}

inline Model parse_model(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ModelFormatError(std::string("model file is not JSON (format_version ") +
                           std::to_string(kModelFormatVersion) +
                           " expected): " + e.what());
  }
  return model_from_json(doc);
}

inline Model load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelFormatError("cannot open model file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

}  // namespace morphalign

#endif  // MORPHALIGN_SERIALIZE_HPP
