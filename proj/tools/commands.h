// tools/commands.h

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

#ifndef SPKMIX_TOOLS_COMMANDS_H_
#define SPKMIX_TOOLS_COMMANDS_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "spkmix/segmenter.h"

namespace spkmix::cli {

struct CommonOptions {
  std::uint64_t seed = 0;
  int jobs = 1;
};

struct SegmentOptions {
  std::string mode = "transcript";  // transcript | energy
  std::string annotations;          // .json or TSV
  std::string recordings;           // TSV: recording path [channel]
  std::string channels;             // TSV: recording speaker target other
  std::string sad = "auto";         // auto | energy | labels | none
  std::string sad_labels;
  SadParams sad_params;
  double energy_floor_db = -40.0;
  double ratio_min_db = 6.0;
  double energy_frame_s = 0.01;
  double min_length_s = kMinUtteranceSeconds;
  std::string out;
  std::string audio_dir;
  std::string segments_in;
  int sample_rate = 8000;
};

struct VerifyOptions {
  std::string segments;
  std::string audio_dir;
  std::optional<double> threshold;
  std::string scores;
  double min_enroll_s = 10.0;
  std::string out;
  std::string report;
};

struct PairOptions {
  std::string segments;
  std::string audio_dir;
  std::size_t target = 20000;
  std::string out;
  std::string out_dir;  // split mode
  std::optional<std::size_t> test_speakers, cv_speakers, train_speakers;
  std::size_t train_mixes = 20000, cv_mixes = 5000, test_mixes = 4000;
  double snr_low_db = 0.0, snr_high_db = 5.0;
  bool trace = false;
};

struct MixOptions {
  std::string list;
  std::string out_dir;
  std::string mode = "min";  // min | max | both
  bool float32 = false;
  int sample_rate = 8000;  // 0 keeps the file rate
  std::string sad_labels;
  double label_step_s = 0.01;
};

struct SeparateOptions {
  std::string mix_dir;
  std::string out_dir;
  std::string mask = "irm";  // irm | ibm | external
  std::string masks_dir;
  bool float32 = false;
};

struct EvalOptions {
  std::string mix_dir;
  std::string est_dir;
  std::string out;
  bool csv = false;
};

struct StatsOptions {
  std::string segments;
  std::vector<std::string> lists;
  std::string format = "table";  // table | tsv
  std::string out;
  std::string name = "corpus";
};

struct RetargetOptions {
  std::string list;
  std::string map;  // from=to
  std::string map_file;
  std::string out;
};

void RunSegment(const CommonOptions &common, const SegmentOptions &opts,
                std::ostream &out);
void RunVerify(const CommonOptions &common, const VerifyOptions &opts,
               std::ostream &out);
void RunPair(const CommonOptions &common, const PairOptions &opts,
             std::ostream &out);
void RunMix(const CommonOptions &common, const MixOptions &opts,
            std::ostream &out);
void RunSeparate(const CommonOptions &common, const SeparateOptions &opts,
                 std::ostream &out);
void RunEval(const CommonOptions &common, const EvalOptions &opts,
             std::ostream &out);
void RunStats(const CommonOptions &common, const StatsOptions &opts,
              std::ostream &out);
void RunRetarget(const CommonOptions &common, const RetargetOptions &opts,
                 std::ostream &out);

}  // namespace spkmix::cli

#endif  // SPKMIX_TOOLS_COMMANDS_H_
