// src/seg_verify.cc

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

#include "spkmix/seg_verify.h"

#include <algorithm>
#include <cmath>

#include "spkmix/error.h"
#include "spkmix/io_util.h"
#include "spkmix/parallel.h"
#include "spkmix/stft.h"

namespace spkmix {

namespace {
constexpr double kLogFloor = 1e-10;
}

SegmentEmbedding EmbedSegment(const Waveform &audio) {
  bool silent = std::all_of(audio.samples().begin(), audio.samples().end(),
                            [](double v) { return v == 0.0; });
  if (silent) Fail(ErrorKind::kDegenerateInput, "segment has zero energy");
  const RealMatrix mag = Magnitude(Stft(audio));
  const std::size_t frames = mag.rows(), bins = mag.cols();

  std::vector<double> mean(bins, 0.0), sq(bins, 0.0);
  for (std::size_t t = 0; t < frames; ++t) {
    auto row = mag.Row(t);
    for (std::size_t k = 0; k < bins; ++k) {
      double v = std::log(row[k] + kLogFloor);
      mean[k] += v;
      sq[k] += v * v;
    }
  }
  SegmentEmbedding emb;
  emb.n_frames = frames;
  emb.values.resize(2 * bins);
  for (std::size_t k = 0; k < bins; ++k) {
    double m = mean[k] / frames;
    double var = std::max(0.0, sq[k] / frames - m * m);
    emb.values[k] = m;
    emb.values[bins + k] = std::sqrt(var);
  }
  return emb;
}

SpeakerProfile Enroll(const std::string &speaker,
                      std::span<const SegmentAudio> segments,
                      const EnrollOptions &opts) {
  double total_s = 0.0;
  for (const auto &s : segments) {
    if (s.segment.speaker != speaker)
      Fail(ErrorKind::kConfig, "segment " + s.utt_id + " belongs to '" +
                                   s.segment.speaker + "', not '" + speaker +
                                   "'");
    total_s += s.audio.duration_s();
  }
  if (segments.empty() || total_s < opts.min_total_s)
    Fail(ErrorKind::kEnrollment,
         "speaker '" + speaker + "' has " + FormatFixed(total_s, 2) +
             " s of audio, need " + FormatFixed(opts.min_total_s, 2));

  SpeakerProfile profile;
  profile.speaker = speaker;
  for (const auto &s : segments) {
    auto emb = EmbedSegment(s.audio);
    if (profile.embedding.empty()) profile.embedding.assign(emb.values.size(), 0.0);
    if (emb.values.size() != profile.embedding.size())
      Fail(ErrorKind::kConfig, "segments of '" + speaker +
                                   "' have different sample rates");
    for (std::size_t i = 0; i < emb.values.size(); ++i)
      profile.embedding[i] += emb.values[i] * static_cast<double>(emb.n_frames);
    profile.n_frames += emb.n_frames;
  }
  for (double &v : profile.embedding) v /= static_cast<double>(profile.n_frames);
  return profile;
}

double CosineSimilarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    Fail(ErrorKind::kConfig, "embedding dimensions differ");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0)
    Fail(ErrorKind::kDegenerateInput, "zero-norm embedding");
  return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

double Score(const SpeakerProfile &profile, const Waveform &segment_audio) {
  return CosineSimilarity(profile.embedding,
                          EmbedSegment(segment_audio).values);
}

VerificationResult VerifyScores(std::span<const ScoredSegment> scored,
                                double threshold) {
  VerificationResult result;
  for (const auto &s : scored)
    (s.score >= threshold ? result.kept : result.rejected).push_back(s);
  return result;
}

VerificationResult Verify(const std::map<std::string, SpeakerProfile> &profiles,
                          std::span<const SegmentAudio> segments,
                          double threshold, int jobs) {
  for (const auto &s : segments)
    if (!profiles.count(s.segment.speaker))
      Fail(ErrorKind::kConfig, "no enrolled profile for speaker '" +
                                   s.segment.speaker + "'");
  std::vector<ScoredSegment> scored(segments.size());
  ParallelFor(segments.size(), jobs, [&](std::size_t i) {
    const auto &s = segments[i];
    scored[i] = {s.utt_id, s.segment,
                 Score(profiles.at(s.segment.speaker), s.audio)};
  });
  return VerifyScores(scored, threshold);
}

std::map<std::string, double> ReadExternalScores(const std::string &path) {
  std::map<std::string, double> out;
  for (const auto &line : ReadDataLines(path)) {
    auto f = SplitFields(line);
    if (f.size() != 2)
      Fail(ErrorKind::kFormat, path + ": expected `utt_id score`: " + line);
    if (!out.emplace(f[0], ParseDouble(f[1], "score")).second)
      Fail(ErrorKind::kFormat, path + ": duplicate utterance " + f[0]);
  }
  return out;
}

std::string FormatVerificationReport(std::span<const ScoredSegment> in_order,
                                     double threshold) {
  std::string out;
  for (const auto &s : in_order) {
    out += s.utt_id + '\t' + FormatFixed(s.score, 6) + '\t' +
           (s.score >= threshold ? "kept" : "rejected") + '\n';
  }
  return out;
}

}  // namespace spkmix
