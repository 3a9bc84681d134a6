// src/mixer.cc

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

#include "spkmix/mixer.h"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "spkmix/error.h"
#include "spkmix/io_util.h"

namespace spkmix {

std::string_view LengthModeName(LengthMode mode) {
  return mode == LengthMode::kMin ? "min" : "max";
}

LengthMode ParseLengthMode(std::string_view name) {
  if (name == "min") return LengthMode::kMin;
  if (name == "max") return LengthMode::kMax;
  Fail(ErrorKind::kConfig, "length mode must be min or max, got '" +
                               std::string(name) + "'");
}

double SpeechLevelPower(std::span<const double> x,
                        const std::vector<bool> &active) {
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!active.empty() && !(i < active.size() && active[i])) continue;
    acc += x[i] * x[i];
    ++count;
  }
  return count ? acc / static_cast<double>(count) : 0.0;
}

RenderedMixture Render(const MixtureSpec &spec, const AudioResolver &resolve,
                       LengthMode mode, const ActivityProvider &activity) {
  std::array<Waveform, 2> raw{resolve(spec.utt1), resolve(spec.utt2)};
  const std::array<const std::string *, 2> refs{&spec.utt1, &spec.utt2};
  const std::array<double, 2> snrs{spec.snr1_db, spec.snr2_db};
  if (raw[0].sample_rate() != raw[1].sample_rate())
    Fail(ErrorKind::kConfig, "sample rates differ: " + spec.utt1 + " (" +
                                 std::to_string(raw[0].sample_rate()) +
                                 " Hz) vs " + spec.utt2 + " (" +
                                 std::to_string(raw[1].sample_rate()) + " Hz)");
  const int sr = raw[0].sample_rate();

  RenderedMixture out;
  out.mode = mode;
  out.source_lengths = {raw[0].size(), raw[1].size()};
  const std::size_t len = mode == LengthMode::kMin
                              ? std::min(raw[0].size(), raw[1].size())
                              : std::max(raw[0].size(), raw[1].size());

  std::array<std::vector<double>, 2> scaled;
  for (int s = 0; s < 2; ++s) {
    std::vector<double> x(len, 0.0);
    const std::size_t n = std::min(len, raw[s].size());
    std::copy_n(raw[s].samples().begin(), n, x.begin());

    // Padding is never active; labels, when present, further restrict it.
    std::vector<bool> act(len, false);
    std::optional<std::vector<bool>> labels;
    if (activity) labels = activity(*refs[s], raw[s].size());
    for (std::size_t i = 0; i < n; ++i)
      act[i] = !labels || (i < labels->size() && (*labels)[i]);
    double power = SpeechLevelPower(x, act);
    if (labels && power == 0.0) {
      // No labelled speech in the rendered span: fall back to plain RMS.
      for (std::size_t i = 0; i < n; ++i) act[i] = true;
      power = SpeechLevelPower(x, act);
    }
    if (!(power > 0.0))
      Fail(ErrorKind::kDegenerateInput,
           "source " + *refs[s] + " has no energy in the rendered span");

    const double gain = std::pow(10.0, snrs[s] / 20.0) / std::sqrt(power);
    for (double &v : x) v *= gain;
    out.applied_gains[s] = gain;
    out.active[s] = std::move(act);
    scaled[s] = std::move(x);
  }

  double peak = 0.0;
  for (std::size_t i = 0; i < len; ++i)
    peak = std::max(peak, std::abs(scaled[0][i] + scaled[1][i]));
  double scale = peak > kMaxMixturePeak ? kMaxMixturePeak / peak : 1.0;

  std::array<std::vector<double>, 2> src;
  std::vector<double> mix(len);
  for (;;) {
    for (int s = 0; s < 2; ++s) {
      src[s] = scaled[s];
      for (double &v : src[s]) v *= scale;
    }
    double mix_peak = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
      mix[i] = src[0][i] + src[1][i];
      mix_peak = std::max(mix_peak, std::abs(mix[i]));
    }
    // Rounding in the per-source products can overshoot by an ulp.
    if (mix_peak <= kMaxMixturePeak) break;
    scale = std::nextafter(scale, 0.0);
  }

  out.output_scale = scale;
  out.sources = {Waveform(std::move(src[0]), sr), Waveform(std::move(src[1]), sr)};
  out.mixture = Waveform(std::move(mix), sr);
  return out;
}

AudioResolver WavFileResolver(std::optional<int> target_hz) {
  return [target_hz](const std::string &ref) {
    if (!std::filesystem::exists(ref))
      Fail(ErrorKind::kMissingAudio, "cannot resolve audio: " + ref);
    Waveform w = ReadWav(ref);
    if (target_hz && w.sample_rate() != *target_hz)
      w = ResampleTo(w, *target_hz);
    return w;
  };
}

std::vector<bool> FrameLabelsToSamples(const std::vector<bool> &labels,
                                       double step_s, int sample_rate,
                                       std::size_t num_samples) {
  if (!(step_s > 0.0) || sample_rate <= 0)
    Fail(ErrorKind::kConfig, "frame labels need a positive step and rate");
  std::vector<bool> out(num_samples, false);
  const double samples_per_frame = step_s * sample_rate;
  for (std::size_t i = 0; i < num_samples; ++i) {
    const auto frame = static_cast<std::size_t>(
        std::floor(static_cast<double>(i) / samples_per_frame + 1e-9));
    out[i] = frame < labels.size() && labels[frame];
  }
  return out;
}

void WriteRenderedMixture(const std::string &outdir, const std::string &name,
                          const RenderedMixture &rendered,
                          SampleEncoding encoding) {
  const std::filesystem::path dir(outdir);
  WriteWav((dir / "mix" / (name + ".wav")).string(), rendered.mixture, encoding);
  WriteWav((dir / "s1" / (name + ".wav")).string(), rendered.sources[0],
           encoding);
  WriteWav((dir / "s2" / (name + ".wav")).string(), rendered.sources[1],
           encoding);
}

std::string MixMetadataHeader() {
  return "mixname\tutt1\tutt2\tsnr1_db\tsnr2_db\tgain1\tgain2\toutput_scale\t"
         "mode\tlen1\tlen2\tout_len\n";
}

std::string MixMetadataRow(const std::string &name, const MixtureSpec &spec,
                           const RenderedMixture &r) {
  return name + '\t' + spec.utt1 + '\t' + spec.utt2 + '\t' +
         FormatFixed(spec.snr1_db, 6) + '\t' + FormatFixed(spec.snr2_db, 6) +
         '\t' + FormatFixed(r.applied_gains[0], 9) + '\t' +
         FormatFixed(r.applied_gains[1], 9) + '\t' +
         FormatFixed(r.output_scale, 9) + '\t' +
         std::string(LengthModeName(r.mode)) + '\t' +
         std::to_string(r.source_lengths[0]) + '\t' +
         std::to_string(r.source_lengths[1]) + '\t' +
         std::to_string(r.mixture.size()) + '\n';
}

}  // namespace spkmix
