// include/spkmix/seg_verify.h

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

#ifndef SPKMIX_SEG_VERIFY_H_
#define SPKMIX_SEG_VERIFY_H_

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "spkmix/audio.h"
#include "spkmix/segmenter.h"

namespace spkmix {

// Speaker-consistency check for segments. The reference embedding is the
// per-bin mean and standard deviation of the log-magnitude STFT (length 2F),
// compared by cosine similarity. Scores from an external speaker-verification
// system can be substituted through ReadExternalScores / VerifyScores.

struct SegmentEmbedding {
  std::vector<double> values;
  std::size_t n_frames = 0;
};

struct SpeakerProfile {
  std::string speaker;
  std::vector<double> embedding;
  std::size_t n_frames = 0;
};

struct SegmentAudio {
  std::string utt_id;
  CandidateSegment segment;
  Waveform audio;
};

struct EnrollOptions {
  double min_total_s = 10.0;
};

// kDegenerateInput for all-zero audio; kTooShort below one STFT window.
SegmentEmbedding EmbedSegment(const Waveform &audio);

// Frame-weighted mean of the segment embeddings. kEnrollment when the total
// audio is under opts.min_total_s; kConfig if a segment belongs to another
// speaker.
SpeakerProfile Enroll(const std::string &speaker,
                      std::span<const SegmentAudio> segments,
                      const EnrollOptions &opts = {});

// Cosine similarity in [-1, 1]. kDegenerateInput on a zero-norm embedding.
double CosineSimilarity(std::span<const double> a, std::span<const double> b);
double Score(const SpeakerProfile &profile, const Waveform &segment_audio);

struct ScoredSegment {
  std::string utt_id;
  CandidateSegment segment;
  double score = 0.0;
};

struct VerificationResult {
  std::vector<ScoredSegment> kept;      // score >= threshold
  std::vector<ScoredSegment> rejected;  // score < threshold
};

// Scores every segment against its speaker's profile and partitions by
// threshold. Input order is preserved within each side. kConfig when a
// speaker has no profile.
VerificationResult Verify(const std::map<std::string, SpeakerProfile> &profiles,
                          std::span<const SegmentAudio> segments,
                          double threshold, int jobs = 1);

// Partition of already-scored segments.
VerificationResult VerifyScores(std::span<const ScoredSegment> scored,
                                double threshold);

// External scores TSV: `utt_id score`.
std::map<std::string, double> ReadExternalScores(const std::string &path);

// Report TSV: `utt_id score kept|rejected`, in input order.
std::string FormatVerificationReport(std::span<const ScoredSegment> in_order,
                                     double threshold);

}  // namespace spkmix

#endif  // SPKMIX_SEG_VERIFY_H_
