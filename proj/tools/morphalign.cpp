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

// morphalign: train IBM alignment models over morpheme-segmented bitexts
// and report which tokens stay unaligned.

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "morphalign/commands.hpp"

namespace {

using morphalign::cli::RunConfig;

struct Flags {
  std::string stage;
  std::string formats = "tsv,json,md";
  std::string prob_floor;
};

void add_corpus_flags(CLI::App* cmd, RunConfig& cfg, Flags& flags) {
  cmd->add_option("--src", cfg.src, "Source-side corpus, one sentence per line");
  cmd->add_option("--tgt", cfg.tgt, "Target-side corpus, line-aligned with --src");
  cmd->add_option("--tsv", cfg.tsv, "Single file with source<TAB>target lines");
  cmd->add_option("--label", cfg.labels, "Direction label, e.g. wixarika-spanish");
  cmd->add_option("--max-len", cfg.max_len, "Skip pairs longer than this")
      ->capture_default_str();
  cmd->add_option("--out-dir", cfg.out_dir, "Output directory")->capture_default_str();
  cmd->add_option("--threads", cfg.threads, "Worker threads (0 = MORPHALIGN_THREADS or auto)");
  cmd->add_option("--prob-floor", flags.prob_floor,
                  "Lower bound on t(f|e); bare flag means 1e-12")
      ->expected(0, 1)
      ->default_str("1e-12");
}

void add_train_flags(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--schedule", cfg.schedule, "Stages and iterations, e.g. 1:5,2:5,3:3,4:3")
      ->capture_default_str();
  cmd->add_option("--seed", cfg.seed, "Seed recorded in the model file")->capture_default_str();
}

void add_stats_flags(CLI::App* cmd, RunConfig& cfg, Flags& flags) {
  cmd->add_option("--top", cfg.top, "Rows per report (0 = all)")->capture_default_str();
  cmd->add_option("--format", flags.formats, "Comma-separated report formats: tsv,json,md")
      ->capture_default_str();
  cmd->add_flag("--count-null-target", cfg.count_null_target,
                "Count NULL-aligned target tokens instead of fertility-0 source tokens");
}

std::vector<morphalign::ReportFormat> parse_formats(const std::string& s) {
  std::vector<morphalign::ReportFormat> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(morphalign::parse_report_format(item));
  if (out.empty()) throw std::invalid_argument("--format lists no formats");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Morpheme alignment with IBM Models 1-4"};
  app.require_subcommand(1);
  RunConfig cfg;
  Flags flags;

  auto* train = app.add_subcommand("train", "Train a direction model");
  add_corpus_flags(train, cfg, flags);
  add_train_flags(train, cfg);
  train->add_option("--model", cfg.model_path, "Model output path");

  auto* align = app.add_subcommand("align", "Write Viterbi alignments for a bitext");
  add_corpus_flags(align, cfg, flags);
  align->add_option("--model", cfg.model_path, "Trained model file")->required();
  align->add_option("--stage", flags.stage, "Model stage to align with (default: final)");
  align->add_flag("--allow-unk", cfg.allow_unk, "NULL-align tokens unseen in training");

  auto* stats = app.add_subcommand("stats", "Count non-aligned tokens from a dump");
  add_corpus_flags(stats, cfg, flags);
  add_stats_flags(stats, cfg, flags);
  stats->add_option("--dump", cfg.dump_path, "Alignment dump (.align.txt or .align.jsonl)")
      ->required();
  stats->add_option("--stage", flags.stage, "Stage label for dumps that carry none");

  auto* replicate = app.add_subcommand("replicate", "train, align and stats per direction");
  add_corpus_flags(replicate, cfg, flags);
  add_train_flags(replicate, cfg);
  add_stats_flags(replicate, cfg, flags);
  replicate->add_option("--stage", flags.stage, "Stage to align and count (default: final)");
  replicate->add_flag("--one-way", cfg.one_way, "Do not add the reverse of each pair");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : morphalign::cli::kUsage;
  }

  try {
    if (!flags.stage.empty()) cfg.stage = morphalign::parse_stage(flags.stage);
    if (!flags.prob_floor.empty()) cfg.prob_floor = std::stod(flags.prob_floor);
    cfg.formats = parse_formats(flags.formats);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return morphalign::cli::kUsage;
  }

  if (*train) return morphalign::cli::cmd_train(cfg, std::cout, std::cerr);
  if (*align) return morphalign::cli::cmd_align(cfg, std::cout, std::cerr);
  if (*stats) return morphalign::cli::cmd_stats(cfg, std::cout, std::cerr);
  return morphalign::cli::cmd_replicate(cfg, std::cout, std::cerr);
}
