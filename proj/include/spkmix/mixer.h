// include/spkmix/mixer.h

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

#ifndef SPKMIX_MIXER_H_
#define SPKMIX_MIXER_H_

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spkmix/audio.h"
#include "spkmix/mixture_list.h"

namespace spkmix {

// kMin truncates the longer source at the tail; kMax zero-pads the shorter.
enum class LengthMode { kMin, kMax };

std::string_view LengthModeName(LengthMode mode);
LengthMode ParseLengthMode(std::string_view name);

// Peak of the rendered mixture after the joint output scale.
inline constexpr double kMaxMixturePeak = 0.9;

// Loads the audio for a list reference; should throw kMissingAudio when the
// reference cannot be resolved.
using AudioResolver = std::function<Waveform(const std::string &ref)>;

// Optional per-sample speech activity for a reference; std::nullopt means no
// labels, so the whole utterance counts as speech.
using ActivityProvider = std::function<std::optional<std::vector<bool>>(
    const std::string &ref, std::size_t num_samples)>;

struct RenderedMixture {
  Waveform mixture;
  std::array<Waveform, 2> sources;   // after gain, length rule and scale
  std::array<double, 2> applied_gains{};  // per-source gain before scaling
  double output_scale = 1.0;
  LengthMode mode = LengthMode::kMin;
  std::array<std::size_t, 2> source_lengths{};  // before the length rule
  // Samples that count toward speech-level power, per rendered source.
  std::array<std::vector<bool>, 2> active;
};

// Mean square over active samples, or over all samples when `active` is
// empty. Returns 0 when no sample is active.
double SpeechLevelPower(std::span<const double> x,
                        const std::vector<bool> &active = {});

// Scales each source so that the ratio of their speech-level powers equals
// snr1_db - snr2_db, applies the length rule, then scales everything by
// min(1, 0.9 / peak) so the mixture never exceeds 0.9. The mixture is the
// sample-wise sum of the two emitted sources.
//
// Errors: kMissingAudio from the resolver, kConfig on sample-rate mismatch,
// kDegenerateInput for a source with no speech-level energy.
RenderedMixture Render(const MixtureSpec &spec, const AudioResolver &resolve,
                       LengthMode mode = LengthMode::kMin,
                       const ActivityProvider &activity = nullptr);

// Reads references as WAV paths, resampling to target_hz when given.
AudioResolver WavFileResolver(std::optional<int> target_hz = std::nullopt);

// Expands frame labels (label i covers [i*step_s, (i+1)*step_s)) to samples.
std::vector<bool> FrameLabelsToSamples(const std::vector<bool> &labels,
                                       double step_s, int sample_rate,
                                       std::size_t num_samples);

// Writes <outdir>/{mix,s1,s2}/<name>.wav.
void WriteRenderedMixture(const std::string &outdir, const std::string &name,
                          const RenderedMixture &rendered,
                          SampleEncoding encoding = SampleEncoding::kPcm16);

// Metadata TSV row for one rendered mixture.
std::string MixMetadataHeader();
std::string MixMetadataRow(const std::string &name, const MixtureSpec &spec,
                           const RenderedMixture &rendered);

}  // namespace spkmix

#endif  // SPKMIX_MIXER_H_
