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

#ifndef MORPHALIGN_COMMANDS_HPP
#define MORPHALIGN_COMMANDS_HPP

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <iomanip>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "morphalign/aligner.hpp"
#include "morphalign/alignment_io.hpp"
#include "morphalign/analysis.hpp"
#include "morphalign/corpus.hpp"
#include "morphalign/errors.hpp"
#include "morphalign/model.hpp"
#include "morphalign/serialize.hpp"
#include "morphalign/training.hpp"

namespace morphalign::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kIngest = 2,
  kTrain = 3,
  kModel = 4,
  kCorpus = 5,
};

inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const IngestError*>(&e)) return kIngest;
  if (dynamic_cast<const CorpusMismatch*>(&e)) return kCorpus;
  if (dynamic_cast<const ModelFormatError*>(&e) ||
      dynamic_cast<const StageMismatch*>(&e) ||
      dynamic_cast<const UnknownToken*>(&e))
    return kModel;
  if (dynamic_cast<const TrainError*>(&e)) return kTrain;
  return kUsage;
}

/// Everything one invocation may need. `src`, `tgt` and `labels` hold one
/// entry per language pair; only `replicate` uses more than one.
struct RunConfig {
  std::vector<std::string> src;
  std::vector<std::string> tgt;
  std::string tsv;
  std::vector<std::string> labels;
  std::string schedule = "1:5,2:5,3:3,4:3";
  std::uint64_t seed = 0;
  std::optional<Stage> stage;
  std::string out_dir = ".";
  std::size_t top = 15;
  std::vector<ReportFormat> formats = {ReportFormat::Tsv, ReportFormat::Json,
                                       ReportFormat::Markdown};
  bool allow_unk = false;
  bool count_null_target = false;
  std::optional<double> prob_floor;
  std::size_t max_len = 100;
  std::string model_path;  // align; train writes here when set
  std::string dump_path;   // stats
  unsigned threads = 0;
  bool one_way = false;  // replicate: do not add the reverse directions
};

/// Output file names of one direction.
struct DirectionPaths {
  std::filesystem::path model, dump_text, dump_jsonl;
  std::filesystem::path report(ReportFormat f) const {
    return base.string() + ".report." + extension(f);
  }
  std::filesystem::path base;

  DirectionPaths(const std::string& out_dir, const std::string& label)
      : base(std::filesystem::path(out_dir) / label) {
    model = base.string() + ".model.json";
    dump_text = base.string() + ".align.txt";
    dump_jsonl = base.string() + ".align.jsonl";
  }
};

/// Writes through a temporary file and a rename, so a failed run never
/// leaves a partial file behind.
inline void write_file_atomic(const std::filesystem::path& path,
                              const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp);
      throw std::runtime_error("cannot write " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

/// "wixarika-spanish" -> "spanish-wixarika"; labels without '-' get
/// a "-reverse" suffix.
inline std::string reverse_label(const std::string& label) {
  const auto dash = label.find('-');
  if (dash == std::string::npos) return label + "-reverse";
  return label.substr(dash + 1) + "-" + label.substr(0, dash);
}

inline std::string default_label(const std::string& src, const std::string& tgt) {
  auto ext = [](const std::string& p) {
    auto e = std::filesystem::path(p).extension().string();
    if (!e.empty() && e[0] == '.') e.erase(0, 1);
    return e.empty() ? std::filesystem::path(p).stem().string() : e;
  };
  return ext(src) + "-" + ext(tgt);
}

inline std::string label_of(const RunConfig& cfg) {
  if (!cfg.labels.empty()) return cfg.labels[0];
  if (!cfg.tsv.empty()) return std::filesystem::path(cfg.tsv).stem().string();
  if (!cfg.src.empty() && !cfg.tgt.empty()) return default_label(cfg.src[0], cfg.tgt[0]);
  return "direction";
}

inline RawParallel read_inputs(const RunConfig& cfg) {
  if (!cfg.tsv.empty()) return read_parallel_tsv(cfg.tsv);
  if (cfg.src.empty() || cfg.tgt.empty())
    throw std::invalid_argument("--src and --tgt (or --tsv) are required");
  return read_parallel(cfg.src[0], cfg.tgt[0]);
}

using LineSink = std::function<void(const std::string&)>;

inline std::string format_telemetry(const IterationEvent& ev) {
  std::ostringstream os;
  os << to_string(ev.stage) << ' ' << ev.iteration << ' '
     << std::setprecision(12) << ev.log_likelihood;
  return os.str();
}

// ---------------------------------------------------------------------------
// Pipeline steps. These throw; the cmd_* wrappers turn errors into exit codes.

inline Model train_direction(const Bitext& bitext, const RunConfig& cfg,
                             const LineSink& telemetry) {
  const auto schedule = TrainSchedule::parse(cfg.schedule);
  for (const auto& w : bitext.warnings) telemetry("warning: " + w);
  TrainOptions opts;
  opts.config.max_len = cfg.max_len;
  opts.config.prob_floor = cfg.prob_floor.value_or(0.0);
  opts.exec.threads = cfg.threads;
  opts.on_iteration = [&](const IterationEvent& ev) { telemetry(format_telemetry(ev)); };
  opts.on_warning = [&](const std::string& w) { telemetry("warning: " + w); };
  Model model;
  model.params = train(bitext, schedule, opts);
  model.src_vocab = bitext.src_vocab;
  model.tgt_vocab = bitext.tgt_vocab;
  model.schedule = schedule;
  model.direction_label = bitext.direction_label;
  model.seed = cfg.seed;
  return model;
}

struct AlignOutput {
  Bitext bitext;
  AlignedCorpus aligned;
};

inline AlignOutput align_direction(Model model, const RawParallel& raw,
                                   const std::string& label, const RunConfig& cfg) {
  if (cfg.prob_floor) model.params.config.prob_floor = *cfg.prob_floor;
  AlignOutput out{encode_bitext(raw, model.src_vocab, model.tgt_vocab, label,
                                cfg.allow_unk, IngestOptions{cfg.max_len}),
                  {}};
  const Stage stage = cfg.stage.value_or(model.params.stage);
  out.aligned = align_corpus(out.bitext, model.params, stage, cfg.allow_unk,
                             ExecPolicy{cfg.threads, 8});
  return out;
}

inline void write_dumps(const DirectionPaths& paths, const AlignOutput& a) {
  std::ostringstream text, jsonl;
  write_alignment_text(text, a.aligned, a.bitext);
  write_alignment_jsonl(jsonl, a.aligned, a.bitext);
  write_file_atomic(paths.dump_text, text.str());
  write_file_atomic(paths.dump_jsonl, jsonl.str());
}

inline AlignmentDump read_dump(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileNotFound(path);
  const bool jsonl = std::filesystem::path(path).extension() == ".jsonl";
  return jsonl ? read_alignment_jsonl(in) : read_alignment_text(in);
}

inline AlignmentReport stats_direction(const AlignmentDump& dump,
                                       const Bitext& bitext, const RunConfig& cfg) {
  std::string stage = dump.stage;
  if (stage.empty()) stage = cfg.stage ? to_string(*cfg.stage) : "-";
  Stage parsed = Stage::M1;
  try {
    parsed = parse_stage(stage);
  } catch (const ScheduleError&) {
  }
  const auto aligned = aligned_from_dump(dump, bitext, parsed);
  return make_report(aligned, bitext, stage,
                     ReportOptions{cfg.count_null_target, cfg.top});
}

inline void write_reports(const DirectionPaths& paths, const AlignmentReport& r,
                          const std::vector<ReportFormat>& formats) {
  for (auto f : formats) write_file_atomic(paths.report(f), render_report(r, f));
}

inline std::string summary_tsv_header() {
  return "Direction\tTokens\tN.a. Tokens\tN.a. words\tN.a. morph.\tN.a./tokens\n";
}

inline std::string summary_tsv_row(const std::string& label, const DirectionStats& s) {
  std::ostringstream os;
  os << label << '\t' << s.tokens << '\t' << s.na_tokens << '\t' << s.na_words
     << '\t' << s.na_morphemes << '\t' << s.rate_text() << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// Commands

inline int report_failure(const std::exception& e, std::ostream& err) {
  err << "error: " << e.what() << '\n';
  return exit_code_for(e);
}

/// Trains one direction and writes `<out-dir>/<label>.model.json` (or
/// --model). Telemetry lines `stage iter loglik` go to `err`.
inline int cmd_train(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    const auto label = label_of(cfg);
    TrainSchedule::parse(cfg.schedule);
    const auto bitext = build_bitext(read_inputs(cfg), label, IngestOptions{cfg.max_len});
    const auto model = train_direction(bitext, cfg, [&](const std::string& line) {
      err << line << '\n';
    });
    const std::filesystem::path path =
        cfg.model_path.empty() ? DirectionPaths(cfg.out_dir, label).model
                               : std::filesystem::path(cfg.model_path);
    write_file_atomic(path, serialize_model(model));
    out << path.string() << '\n';
    return kOk;
  } catch (const std::exception& e) {
    return report_failure(e, err);
  }
}

/// Aligns a bitext with a stored model; writes the text and JSON-lines dumps.
inline int cmd_align(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.model_path.empty()) throw std::invalid_argument("--model is required");
    const auto model = load_model(cfg.model_path);
    const auto raw = read_inputs(cfg);
    const auto label = cfg.labels.empty() ? model.direction_label : cfg.labels[0];
    const auto result = align_direction(model, raw, label, cfg);
    const DirectionPaths paths(cfg.out_dir, label);
    write_dumps(paths, result);
    out << paths.dump_text.string() << '\n' << paths.dump_jsonl.string() << '\n';
    return kOk;
  } catch (const std::exception& e) {
    return report_failure(e, err);
  }
}

/// Counts non-aligned tokens from a dump and writes the reports; the
/// direction summary goes to `out`.
inline int cmd_stats(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.dump_path.empty()) throw std::invalid_argument("--dump is required");
    const auto label = label_of(cfg);
    const auto bitext = build_bitext(read_inputs(cfg), label, IngestOptions{cfg.max_len});
    const auto report = stats_direction(read_dump(cfg.dump_path), bitext, cfg);
    write_reports(DirectionPaths(cfg.out_dir, label), report, cfg.formats);
    out << summary_tsv_header() << summary_tsv_row(label, report.stats);
    return kOk;
  } catch (const std::exception& e) {
    return report_failure(e, err);
  }
}

struct DirectionSpec {
  std::string label, src, tgt;
};

struct DirectionOutcome {
  DirectionSpec spec;
  int exit_code = kOk;
  std::string message;
  DirectionStats stats;
};

/// The direction list of `replicate`: each (src, tgt, label) entry yields
/// the forward direction and, unless `one_way`, its reverse. A single --tgt
/// is shared by all sources.
inline std::vector<DirectionSpec> replicate_directions(const RunConfig& cfg) {
  if (cfg.src.empty()) throw std::invalid_argument("replicate needs at least one --src");
  if (cfg.tgt.size() != 1 && cfg.tgt.size() != cfg.src.size())
    throw std::invalid_argument("replicate needs one --tgt, or one per --src");
  if (!cfg.labels.empty() && cfg.labels.size() != cfg.src.size())
    throw std::invalid_argument("replicate needs one --label per --src");
  std::vector<DirectionSpec> out;
  for (std::size_t k = 0; k < cfg.src.size(); ++k) {
    const auto& tgt = cfg.tgt.size() == 1 ? cfg.tgt[0] : cfg.tgt[k];
    const auto label = cfg.labels.empty() ? default_label(cfg.src[k], tgt) : cfg.labels[k];
    out.push_back({label, cfg.src[k], tgt});
    if (!cfg.one_way) out.push_back({reverse_label(label), tgt, cfg.src[k]});
  }
  return out;
}

/// train -> align -> stats for one direction, through the files the
/// single commands would write.
inline DirectionOutcome run_direction(const DirectionSpec& spec, const RunConfig& base,
                                      const LineSink& telemetry) {
  DirectionOutcome outcome{spec, kOk, {}, {}};
  try {
    RunConfig cfg = base;
    cfg.src = {spec.src};
    cfg.tgt = {spec.tgt};
    cfg.tsv.clear();
    cfg.labels = {spec.label};
    const DirectionPaths paths(cfg.out_dir, spec.label);

    const auto raw = read_inputs(cfg);
    const auto bitext = build_bitext(raw, spec.label, IngestOptions{cfg.max_len});
    const auto model = train_direction(bitext, cfg, telemetry);
    write_file_atomic(paths.model, serialize_model(model));

    const auto aligned = align_direction(load_model(paths.model.string()), raw,
                                         spec.label, cfg);
    write_dumps(paths, aligned);

    const auto report = stats_direction(read_dump(paths.dump_jsonl.string()), bitext, cfg);
    write_reports(paths, report, cfg.formats);
    outcome.stats = report.stats;
  } catch (const std::exception& e) {
    outcome.exit_code = exit_code_for(e);
    outcome.message = e.what();
  }
  return outcome;
}

inline std::string render_summary_tsv(const std::vector<DirectionOutcome>& rows) {
  std::string out = "Direction\tTokens\tN.a. Tokens\tN.a. words\tN.a. morph.\tN.a./tokens\tStatus\n";
  for (const auto& r : rows) {
    if (r.exit_code == kOk) {
      auto row = summary_tsv_row(r.spec.label, r.stats);
      row.pop_back();
      out += row + "\tok\n";
    } else {
      out += r.spec.label + "\t-\t-\t-\t-\t-\terror: " + r.message + "\n";
    }
  }
  return out;
}

inline std::string render_summary_markdown(const std::vector<DirectionOutcome>& rows) {
  std::string out =
      "| Direction | Tokens | N.a. Tokens | N.a. words | N.a. morph. | N.a./tokens |\n"
      "|:---|---:|---:|---:|---:|---:|\n";
  std::string errors;
  for (const auto& r : rows) {
    if (r.exit_code == kOk)
      out += markdown_stats_row(r.stats, r.spec.label);
    else
      out += "| " + detail::md_escape(r.spec.label) + " | - | - | - | - | - |\n",
          errors += "- " + r.spec.label + ": " + r.message + "\n";
  }
  if (!errors.empty()) out += "\nErrors:\n\n" + errors;
  return out;
}

/// Runs every direction (concurrently), then writes summary.tsv and
/// summary.md in direction order. A failing direction becomes an error row;
/// the exit code is the largest per-direction code.
inline int cmd_replicate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  std::vector<DirectionSpec> specs;
  try {
    TrainSchedule::parse(cfg.schedule);
    specs = replicate_directions(cfg);
  } catch (const std::exception& e) {
    return report_failure(e, err);
  }
  std::mutex err_mutex;
  std::vector<std::future<DirectionOutcome>> jobs;
  for (const auto& spec : specs) {
    jobs.push_back(std::async(std::launch::async, [&, spec] {
      return run_direction(spec, cfg, [&](const std::string& line) {
        std::lock_guard<std::mutex> lock(err_mutex);
        err << '[' << spec.label << "] " << line << '\n';
      });
    }));
  }
  std::vector<DirectionOutcome> rows;
  for (auto& j : jobs) rows.push_back(j.get());
  int code = kOk;
  for (const auto& r : rows) {
    if (r.exit_code != kOk) {
      err << "error: [" << r.spec.label << "] " << r.message << '\n';
      code = std::max(code, r.exit_code);
    }
  }
  try {
    const auto dir = std::filesystem::path(cfg.out_dir);
    write_file_atomic(dir / "summary.tsv", render_summary_tsv(rows));
    write_file_atomic(dir / "summary.md", render_summary_markdown(rows));
  } catch (const std::exception& e) {
    return report_failure(e, err);
  }
  out << render_summary_tsv(rows);
  return code;
}

}  // namespace morphalign::cli

#endif  // MORPHALIGN_COMMANDS_HPP
