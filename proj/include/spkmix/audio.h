// include/spkmix/audio.h

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

#ifndef SPKMIX_AUDIO_H_
#define SPKMIX_AUDIO_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace spkmix {

/// Mono audio at a fixed sample rate. Amplitudes are nominally in [-1, 1] but
/// are not clamped, so gain staging has headroom. Immutable once built.
class Waveform {
 public:
  Waveform() = default;
  /// Throws kConfig if sample_rate_hz <= 0 or any sample is not finite.
  Waveform(std::vector<double> samples, int sample_rate_hz);

  std::span<const double> samples() const { return samples_; }
  int sample_rate() const { return sample_rate_hz_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  double operator[](std::size_t i) const { return samples_[i]; }
  double duration_s() const;

  /// Copy of [begin, begin + count), clipped to the signal.
  Waveform Slice(std::size_t begin, std::size_t count) const;
  /// Samples covering [start_s, end_s), rounded to the nearest sample.
  Waveform SliceSeconds(double start_s, double end_s) const;
  Waveform Scaled(double gain) const;

  /// Moves the samples out, leaving this object empty.
  std::vector<double> Release() &&;

 private:
  std::vector<double> samples_;
  int sample_rate_hz_ = 0;
};

enum class SampleEncoding { kPcm16, kFloat32 };

/// Reads a RIFF/WAVE file (16-bit PCM or 32-bit IEEE float). Multi-channel
/// files require an explicit channel index; there is no implicit downmix.
Waveform ReadWav(const std::string &path,
                 std::optional<int> channel = std::nullopt);

/// Writes mono audio. The file is written to a temporary name and renamed
/// into place, so a failed write never leaves a partial file behind.
void WriteWav(const std::string &path, const Waveform &wave,
              SampleEncoding encoding = SampleEncoding::kPcm16);

/// In-memory variants used by the file functions above.
Waveform DecodeWav(std::span<const unsigned char> bytes,
                   std::optional<int> channel = std::nullopt);
std::vector<unsigned char> EncodeWav(const Waveform &wave,
                                     SampleEncoding encoding);

struct ResamplerOptions {
  double kaiser_beta = 8.6;
  int taps_per_phase = 64;
};

/// Band-limited rational resampling with a polyphase Kaiser-windowed sinc.
/// The output has round(size * target / source) samples and output sample n
/// sits at input time n * source / target. The cutoff is at the lower of the
/// two Nyquist frequencies.
Waveform ResampleTo(const Waveform &wave, int target_hz,
                    const ResamplerOptions &opts = {});

}  // namespace spkmix

#endif  // SPKMIX_AUDIO_H_
