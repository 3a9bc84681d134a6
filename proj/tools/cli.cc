// tools/cli.cc

// Copyright 2026  The spkmix Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "cli.h"

#include <exception>
#include <ostream>

#include "CLI11.hpp"
#include "commands.h"
#include "spkmix/error.h"

namespace spkmix::cli {

namespace {

void AddSadOptions(CLI::App *cmd, SadParams &p) {
  cmd->add_option("--sad-frame", p.frame_s, "SAD frame length (s)");
  cmd->add_option("--sad-step", p.step_s, "SAD frame step (s)");
  cmd->add_option("--sad-on-db", p.on_db, "onset threshold vs. peak frame (dB)");
  cmd->add_option("--sad-off-db", p.off_db, "offset threshold vs. peak frame (dB)");
  cmd->add_option("--sad-hangover", p.hangover_s, "hangover (s)");
  cmd->add_option("--sad-min-pause", p.min_pause_s, "pauses shorter than this are bridged (s)");
  cmd->add_option("--sad-min-speech", p.min_speech_s, "drop speech runs shorter than this (s)");
  cmd->add_option("--sad-abs-floor-db", p.abs_floor_db, "absolute energy floor (dBFS)");
}

int ExitCodeFor(ErrorKind kind) {
  return kind == ErrorKind::kConfig ? kExitUsage : kExitData;
}

}  // namespace

int Run(const std::vector<std::string> &args, std::ostream &out,
        std::ostream &err) {
  CLI::App app{"Speaker-mixture corpus tools", "spkmix"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "INI config file; one section per subcommand");
  app.allow_config_extras(CLI::config_extras_mode::error);

  CommonOptions common;
  app.add_option("--seed", common.seed, "master random seed");
  app.add_option("--jobs,-j", common.jobs, "worker threads")
      ->check(CLI::PositiveNumber);

  SegmentOptions seg;
  auto *segment = app.add_subcommand("segment", "cut single-speaker utterances");
  segment->add_option("--mode", seg.mode, "transcript or energy")
      ->check(CLI::IsMember({"transcript", "energy"}));
  segment->add_option("--annotations", seg.annotations, "speaker turns (.json or TSV)");
  segment->add_option("--recordings", seg.recordings, "TSV: recording path [channel]");
  segment->add_option("--channels", seg.channels, "TSV: recording speaker target other");
  segment->add_option("--sad", seg.sad, "auto, energy, labels or none")
      ->check(CLI::IsMember({"auto", "energy", "labels", "none"}));
  segment->add_option("--sad-labels", seg.sad_labels, "frame label file keyed by recording");
  AddSadOptions(segment, seg.sad_params);
  segment->add_option("--energy-floor-db", seg.energy_floor_db);
  segment->add_option("--ratio-min-db", seg.ratio_min_db);
  segment->add_option("--energy-frame", seg.energy_frame_s);
  segment->add_option("--min-length", seg.min_length_s, "minimum utterance length (s)");
  segment->add_option("--out", seg.out, "segments TSV");
  segment->add_option("--audio-dir", seg.audio_dir, "write <utt_id>.wav files here");
  segment->add_option("--segments-in", seg.segments_in, "extract audio for existing segments");
  segment->add_option("--sample-rate", seg.sample_rate, "rate of extracted audio");

  VerifyOptions ver;
  auto *verify = app.add_subcommand("verify", "reject mislabeled segments");
  verify->add_option("--segments", ver.segments);
  verify->add_option("--audio-dir", ver.audio_dir);
  verify->add_option("--threshold", ver.threshold, "keep scores >= threshold");
  verify->add_option("--scores", ver.scores, "external scores: utt_id score");
  verify->add_option("--min-enroll", ver.min_enroll_s, "enrollment audio per speaker (s)");
  verify->add_option("--out", ver.out, "kept segments TSV");
  verify->add_option("--report", ver.report, "per-segment scores");

  PairOptions pr;
  auto *pair = app.add_subcommand("pair", "generate mixture lists");
  pair->add_option("--segments", pr.segments);
  pair->add_option("--audio-dir", pr.audio_dir, "list entries become <dir>/<utt_id>.wav");
  pair->add_option("--target", pr.target, "mixtures to generate");
  pair->add_option("--out", pr.out, "mixture list");
  pair->add_option("--out-dir", pr.out_dir, "speaker-disjoint tr/cv/tt lists");
  pair->add_option("--test-speakers", pr.test_speakers);
  pair->add_option("--cv-speakers", pr.cv_speakers);
  pair->add_option("--train-speakers", pr.train_speakers, "default: remaining speakers");
  pair->add_option("--train-mixes", pr.train_mixes);
  pair->add_option("--cv-mixes", pr.cv_mixes);
  pair->add_option("--test-mixes", pr.test_mixes);
  pair->add_option("--snr-low", pr.snr_low_db);
  pair->add_option("--snr-high", pr.snr_high_db);
  pair->add_flag("--trace", pr.trace, "write the per-pair decision trace");

  MixOptions mx;
  auto *mix = app.add_subcommand("mix", "render mixtures from a list");
  mix->add_option("--list", mx.list);
  mix->add_option("--out-dir", mx.out_dir);
  mix->add_option("--mode", mx.mode, "min, max or both")
      ->check(CLI::IsMember({"min", "max", "both"}));
  mix->add_flag("--float", mx.float32, "write 32-bit float WAV");
  mix->add_option("--sample-rate", mx.sample_rate, "0 keeps the source rate");
  mix->add_option("--sad-labels", mx.sad_labels, "frame labels keyed by file stem");
  mix->add_option("--label-step", mx.label_step_s);

  SeparateOptions sp;
  auto *separate = app.add_subcommand("separate", "oracle or external mask separation");
  separate->add_option("--mix-dir", sp.mix_dir, "contains mix/, s1/, s2/");
  separate->add_option("--out-dir", sp.out_dir, "default: --mix-dir");
  separate->add_option("--mask", sp.mask, "irm, ibm or external")
      ->check(CLI::IsMember({"irm", "ibm", "external"}));
  separate->add_option("--masks-dir", sp.masks_dir, "<name>.bin mask tensors");
  separate->add_flag("--float", sp.float32);

  EvalOptions ev;
  auto *eval = app.add_subcommand("eval", "SI-SDR evaluation");
  eval->add_option("--mix-dir", ev.mix_dir);
  eval->add_option("--est-dir", ev.est_dir, "contains est1/, est2/; default: --mix-dir");
  eval->add_option("--out", ev.out);
  eval->add_flag("--csv", ev.csv);

  StatsOptions st;
  auto *stats = app.add_subcommand("stats", "corpus and list statistics");
  stats->add_option("--segments", st.segments);
  stats->add_option("--list", st.lists, "repeatable");
  stats->add_option("--format", st.format)->check(CLI::IsMember({"table", "tsv"}));
  stats->add_option("--name", st.name);
  stats->add_option("--out", st.out);

  RetargetOptions rt;
  auto *retarget = app.add_subcommand("retarget", "rewrite list paths to another channel");
  retarget->add_option("--list", rt.list);
  retarget->add_option("--map", rt.map, "from=to substring rewrite");
  retarget->add_option("--map-file", rt.map_file, "TSV: old_path new_path");
  retarget->add_option("--out", rt.out);

  try {
    // CLI11 consumes arguments from the back and skips the program name.
    std::vector<std::string> reversed;
    if (!args.empty()) reversed.assign(args.rbegin(), args.rend() - 1);
    app.parse(reversed);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    err << "error: usage: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*segment) RunSegment(common, seg, out);
    else if (*verify) RunVerify(common, ver, out);
    else if (*pair) RunPair(common, pr, out);
    else if (*mix) RunMix(common, mx, out);
    else if (*separate) RunSeparate(common, sp, out);
    else if (*eval) RunEval(common, ev, out);
    else if (*stats) RunStats(common, st, out);
    else if (*retarget) RunRetarget(common, rt, out);
  } catch (const Error &e) {
    err << "error: " << ErrorKindName(e.kind()) << ": " << e.what() << "\n";
    return ExitCodeFor(e.kind());
  } catch (const std::exception &e) {
    err << "error: internal: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace spkmix::cli
