// src/stft.cc

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

#include "spkmix/stft.h"

#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "spkmix/error.h"

namespace spkmix {

Fft::Fft(std::size_t n) : n_(n) {
  if (n == 0 || !std::has_single_bit(n))
    Fail(ErrorKind::kConfig, "FFT size must be a power of two");
  const int bits = std::countr_zero(n);
  bitrev_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = 0;
    for (int b = 0; b < bits; ++b)
      if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
    bitrev_[i] = r;
  }
  twiddle_.resize(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    double angle = -2.0 * std::numbers::pi * static_cast<double>(k) /
                   static_cast<double>(n);
    twiddle_[k] = {std::cos(angle), std::sin(angle)};
  }
}

void Fft::Forward(std::span<std::complex<double>> data) const {
  Transform(data, false);
}

void Fft::Inverse(std::span<std::complex<double>> data) const {
  Transform(data, true);
}

void Fft::Transform(std::span<std::complex<double>> data, bool inverse) const {
  for (std::size_t i = 0; i < n_; ++i)
    if (i < bitrev_[i]) std::swap(data[i], data[bitrev_[i]]);
  for (std::size_t len = 2; len <= n_; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n_ / len;
    for (std::size_t start = 0; start < n_; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        std::complex<double> w = twiddle_[k * stride];
        if (inverse) w = std::conj(w);
        std::complex<double> a = data[start + k];
        std::complex<double> b = data[start + k + half] * w;
        data[start + k] = a + b;
        data[start + k + half] = a - b;
      }
    }
  }
}

std::vector<double> SqrtHannWindow(std::size_t length) {
  std::vector<double> w(length);
  for (std::size_t n = 0; n < length; ++n)
    w[n] = std::sin(std::numbers::pi * static_cast<double>(n) /
                    static_cast<double>(length));
  return w;
}

Spectrogram::Spectrogram(ComplexMatrix frames, std::size_t window_len,
                         std::size_t hop, int sample_rate_hz)
    : frames_(std::move(frames)),
      window_len_(window_len),
      hop_(hop),
      sample_rate_hz_(sample_rate_hz) {
  if (window_len_ == 0 || hop_ == 0 || frames_.cols() != window_len_ / 2 + 1)
    Fail(ErrorKind::kGeometry,
         "spectrogram has " + std::to_string(frames_.cols()) +
             " bins, expected window_len/2+1 = " +
             std::to_string(window_len_ / 2 + 1));
  for (const auto &c : frames_.data()) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      Fail(ErrorKind::kConfig, "spectrogram contains a non-finite entry");
  }
}

bool Spectrogram::SameGeometry(const Spectrogram &other) const {
  return frames_.SameShape(other.frames_) && window_len_ == other.window_len_ &&
         hop_ == other.hop_ && sample_rate_hz_ == other.sample_rate_hz_;
}

Spectrogram Spectrogram::Scaled(double gain) const {
  ComplexMatrix out = frames_;
  for (auto &c : out.data()) c *= gain;
  return Spectrogram(std::move(out), window_len_, hop_, sample_rate_hz_);
}

Spectrogram Spectrogram::Masked(const RealMatrix &gains) const {
  if (gains.rows() != frames_.rows() || gains.cols() != frames_.cols())
    Fail(ErrorKind::kGeometry, "mask shape does not match spectrogram");
  ComplexMatrix out = frames_;
  auto dst = out.data();
  auto g = gains.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] *= g[i];
  return Spectrogram(std::move(out), window_len_, hop_, sample_rate_hz_);
}

namespace {

void CheckGeometry(std::size_t window_len, std::size_t hop) {
  if (window_len < 2 || !std::has_single_bit(window_len))
    Fail(ErrorKind::kConfig, "window length must be a power of two");
  if (hop == 0 || window_len % hop != 0)
    Fail(ErrorKind::kConfig, "hop must divide the window length");
}

}  // namespace

Spectrogram Stft(const Waveform &wave, std::size_t window_len,
                 std::size_t hop) {
  CheckGeometry(window_len, hop);
  if (wave.size() < window_len)
    Fail(ErrorKind::kTooShort, "signal of " + std::to_string(wave.size()) +
                                   " samples is shorter than one window (" +
                                   std::to_string(window_len) + ")");
  const std::size_t num_frames = (wave.size() - window_len) / hop + 1;
  const std::size_t num_bins = window_len / 2 + 1;
  const auto window = SqrtHannWindow(window_len);
  const Fft fft(window_len);
  const auto x = wave.samples();

  ComplexMatrix frames(num_frames, num_bins);
  std::vector<std::complex<double>> buf(window_len);
  for (std::size_t t = 0; t < num_frames; ++t) {
    const std::size_t offset = t * hop;
    for (std::size_t n = 0; n < window_len; ++n)
      buf[n] = {x[offset + n] * window[n], 0.0};
    fft.Forward(buf);
    auto row = frames.Row(t);
    for (std::size_t k = 0; k < num_bins; ++k) row[k] = buf[k];
  }
  return Spectrogram(std::move(frames), window_len, hop, wave.sample_rate());
}

Waveform Istft(const Spectrogram &spec, std::size_t out_len) {
  const std::size_t window_len = spec.window_len();
  const std::size_t hop = spec.hop();
  CheckGeometry(window_len, hop);
  const std::size_t num_frames = spec.num_frames();
  const std::size_t nominal = num_frames * hop + window_len;
  const std::size_t lo = nominal > window_len ? nominal - window_len : 0;
  if (out_len < lo || out_len > nominal + window_len)
    Fail(ErrorKind::kGeometry,
         "output length " + std::to_string(out_len) +
             " is not within one window of " + std::to_string(nominal));

  const std::size_t num_bins = spec.num_bins();
  const auto window = SqrtHannWindow(window_len);
  const Fft fft(window_len);
  const std::size_t span_len = (num_frames - 1) * hop + window_len;
  std::vector<double> acc(std::max(span_len, out_len), 0.0);
  std::vector<double> envelope(acc.size(), 0.0);
  std::vector<std::complex<double>> buf(window_len);
  const double inv_n = 1.0 / static_cast<double>(window_len);

  for (std::size_t t = 0; t < num_frames; ++t) {
    auto row = spec.frames().Row(t);
    for (std::size_t k = 0; k < num_bins; ++k) buf[k] = row[k];
    for (std::size_t k = num_bins; k < window_len; ++k)
      buf[k] = std::conj(row[window_len - k]);
    fft.Inverse(buf);
    const std::size_t offset = t * hop;
    for (std::size_t n = 0; n < window_len; ++n) {
      acc[offset + n] += buf[n].real() * inv_n * window[n];
      envelope[offset + n] += window[n] * window[n];
    }
  }

  std::vector<double> out(out_len, 0.0);
  for (std::size_t i = 0; i < out_len; ++i)
    if (envelope[i] > 1e-10) out[i] = acc[i] / envelope[i];
  return Waveform(std::move(out), spec.sample_rate());
}

RealMatrix Magnitude(const Spectrogram &spec) {
  const auto &frames = spec.frames();
  RealMatrix mag(frames.rows(), frames.cols());
  auto src = frames.data();
  auto dst = mag.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = std::abs(src[i]);
  return mag;
}

}  // namespace spkmix
