// include/spkmix/segmenter.h

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

#ifndef SPKMIX_SEGMENTER_H_
#define SPKMIX_SEGMENTER_H_

#include <map>
#include <span>
#include <string>
#include <vector>

#include "spkmix/audio.h"

namespace spkmix {

// Minimum utterance length kept for mixing, in seconds.
inline constexpr double kMinUtteranceSeconds = 1.3;

struct AnnotationSegment {
  std::string speaker;
  std::string recording;
  double start_s = 0.0;
  double end_s = 0.0;
};

enum class SegmentSource { kTranscript, kEnergy };

struct CandidateSegment {
  std::string recording;
  std::string speaker;
  double start_s = 0.0;
  double end_s = 0.0;
  SegmentSource source = SegmentSource::kTranscript;

  double duration() const { return end_s - start_s; }
  bool operator==(const CandidateSegment &) const = default;
};

/// Maximal intervals during which exactly one speaker is annotated as
/// talking. Overlapping annotations of the same speaker count once. Output is
/// sorted by start time and disjoint. Every annotation must belong to
/// `recording` (kConfig otherwise).
std::vector<CandidateSegment> SingleSpeakerRegions(
    std::span<const AnnotationSegment> annotations,
    const std::string &recording);

struct EnergyRegionOptions {
  std::string recording;
  std::string speaker;
  double energy_floor_db = -40.0;  // target frame energy vs. loudest frame
  double ratio_min_db = 6.0;       // target vs. other channel, same frame
  double frame_s = 0.01;
};

/// Frames where the target close-talk channel is loud (relative to its own
/// loudest frame) and dominates the other speaker's channel, merged into
/// intervals. Frames do not overlap.
std::vector<CandidateSegment> EnergyRegions(const Waveform &target,
                                            const Waveform &other,
                                            const EnergyRegionOptions &opts);

struct SadParams {
  double frame_s = 0.025;
  double step_s = 0.010;
  // Hysteresis thresholds, dB relative to the loudest frame of the recording.
  double on_db = -30.0;
  double off_db = -40.0;
  // Below-off stretches shorter than this do not end a speech run.
  double hangover_s = 0.2;
  // Pauses at least this long split a region.
  double min_pause_s = 0.3;
  // Speech runs shorter than this are dropped.
  double min_speech_s = 0.05;
  // Frames quieter than this (dBFS, mean square) are never speech.
  double abs_floor_db = -100.0;
};

/// Per-frame speech decisions for a whole recording from an external detector;
/// label i covers [i * step_s, (i + 1) * step_s).
struct FrameLabels {
  double step_s = 0.01;
  std::vector<bool> speech;
};

/// Energy SAD with hysteresis inside each region: drops non-speech and splits
/// at pauses of at least min_pause_s. Never extends a segment past its region.
std::vector<CandidateSegment> SadRefine(
    const Waveform &wave, std::span<const CandidateSegment> regions,
    const SadParams &params = {});

/// Same post-processing as SadRefine, driven by externally supplied labels.
std::vector<CandidateSegment> SadRefineWithLabels(
    const FrameLabels &labels, std::span<const CandidateSegment> regions,
    const SadParams &params = {});

/// Keeps segments with duration >= min_s (inclusive).
std::vector<CandidateSegment> LengthFilter(
    std::span<const CandidateSegment> segments,
    double min_s = kMinUtteranceSeconds);

/// `<speaker>_<recording>_<start-ms>_<end-ms>`, milliseconds zero-padded to
/// seven digits so lexicographic order follows time order.
std::string UtteranceId(const CandidateSegment &seg);

// Annotations: JSON object mapping recording -> [{speaker, start_s, end_s}],
// or TSV lines `recording speaker start_s end_s`.
std::vector<AnnotationSegment> ReadAnnotationsJson(const std::string &path);
std::vector<AnnotationSegment> ReadAnnotationsTsv(const std::string &path);

// Segments TSV: `utt_id recording speaker start_s end_s`.
std::string FormatSegmentsTsv(std::span<const CandidateSegment> segments);
void WriteSegmentsTsv(const std::string &path,
                      std::span<const CandidateSegment> segments);

struct SegmentRow {
  std::string utt_id;
  CandidateSegment segment;
};
std::vector<SegmentRow> ReadSegmentsTsv(const std::string &path);

// Frame-label file: `<key> <0|1> <0|1> ...`, one key per line.
std::map<std::string, std::vector<bool>> ReadFrameLabelFile(
    const std::string &path);

}  // namespace spkmix

#endif  // SPKMIX_SEGMENTER_H_
