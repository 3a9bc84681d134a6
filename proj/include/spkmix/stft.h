// include/spkmix/stft.h

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

#ifndef SPKMIX_STFT_H_
#define SPKMIX_STFT_H_

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "spkmix/audio.h"
#include "spkmix/matrix.h"

namespace spkmix {

inline constexpr std::size_t kDefaultWindowLength = 512;
inline constexpr std::size_t kDefaultHop = 128;

// In-place radix-2 complex FFT of a fixed power-of-two size.
class Fft {
 public:
  explicit Fft(std::size_t n);
  std::size_t size() const { return n_; }
  void Forward(std::span<std::complex<double>> data) const;
  // Unnormalized inverse; divide by size() to invert Forward.
  void Inverse(std::span<std::complex<double>> data) const;

 private:
  void Transform(std::span<std::complex<double>> data, bool inverse) const;

  std::size_t n_;
  std::vector<std::size_t> bitrev_;
  std::vector<std::complex<double>> twiddle_;
};

// Periodic square-root Hann window; its square overlap-adds to a constant at
// hop = length / 4.
std::vector<double> SqrtHannWindow(std::size_t length);

class Spectrogram {
 public:
  Spectrogram(ComplexMatrix frames, std::size_t window_len, std::size_t hop,
              int sample_rate_hz);

  const ComplexMatrix &frames() const { return frames_; }
  std::size_t num_frames() const { return frames_.rows(); }
  std::size_t num_bins() const { return frames_.cols(); }
  std::size_t window_len() const { return window_len_; }
  std::size_t hop() const { return hop_; }
  int sample_rate() const { return sample_rate_hz_; }

  bool SameGeometry(const Spectrogram &other) const;
  Spectrogram Scaled(double gain) const;
  // Elementwise real gain per bin; `gains` must be num_frames x num_bins.
  Spectrogram Masked(const RealMatrix &gains) const;

 private:
  ComplexMatrix frames_;
  std::size_t window_len_;
  std::size_t hop_;
  int sample_rate_hz_;
};

// Frames lie fully inside the signal: T = floor((len - window_len) / hop) + 1.
// Throws kTooShort if the signal is shorter than one window and kConfig if
// window_len is not a power of two or hop does not divide it.
Spectrogram Stft(const Waveform &wave, std::size_t window_len = kDefaultWindowLength,
                 std::size_t hop = kDefaultHop);

// Weighted overlap-add with the same square-root Hann window, normalized by
// the summed squared window. Samples no frame covers come out as zero.
// out_len must be within one window of T * hop + window_len (kGeometry).
Waveform Istft(const Spectrogram &spec, std::size_t out_len);

RealMatrix Magnitude(const Spectrogram &spec);

}  // namespace spkmix

#endif  // SPKMIX_STFT_H_
