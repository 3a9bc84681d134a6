// src/audio.cc

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

#include "spkmix/audio.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <numbers>
#include <numeric>

#include "spkmix/error.h"
#include "spkmix/io_util.h"

namespace spkmix {

Waveform::Waveform(std::vector<double> samples, int sample_rate_hz)
    : samples_(std::move(samples)), sample_rate_hz_(sample_rate_hz) {
  if (sample_rate_hz_ <= 0)
    Fail(ErrorKind::kConfig,
         "sample rate must be positive, got " + std::to_string(sample_rate_hz));
  for (double v : samples_) {
    if (!std::isfinite(v))
      Fail(ErrorKind::kConfig, "waveform contains a non-finite sample");
  }
}

double Waveform::duration_s() const {
  return sample_rate_hz_ > 0
             ? static_cast<double>(samples_.size()) / sample_rate_hz_
             : 0.0;
}

Waveform Waveform::Slice(std::size_t begin, std::size_t count) const {
  begin = std::min(begin, samples_.size());
  count = std::min(count, samples_.size() - begin);
  return Waveform(std::vector<double>(samples_.begin() + begin,
                                      samples_.begin() + begin + count),
                  sample_rate_hz_);
}

Waveform Waveform::SliceSeconds(double start_s, double end_s) const {
  auto to_index = [&](double t) {
    double idx = std::round(t * sample_rate_hz_);
    return idx <= 0 ? std::size_t{0} : static_cast<std::size_t>(idx);
  };
  std::size_t b = to_index(start_s), e = to_index(end_s);
  return Slice(b, e > b ? e - b : 0);
}

Waveform Waveform::Scaled(double gain) const {
  std::vector<double> out(samples_);
  for (double &v : out) v *= gain;
  return Waveform(std::move(out), sample_rate_hz_);
}

std::vector<double> Waveform::Release() && {
  sample_rate_hz_ = 0;
  return std::move(samples_);
}

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t Le16(const unsigned char *p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t Le32(const unsigned char *p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

void Put16(std::vector<unsigned char> *out, std::uint16_t v) {
  out->push_back(static_cast<unsigned char>(v & 0xff));
  out->push_back(static_cast<unsigned char>(v >> 8));
}

void Put32(std::vector<unsigned char> *out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i)
    out->push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xff));
}

void PutTag(std::vector<unsigned char> *out, const char *tag) {
  out->insert(out->end(), tag, tag + 4);
}

}  // namespace

Waveform DecodeWav(std::span<const unsigned char> bytes,
                   std::optional<int> channel) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    Fail(ErrorKind::kFormat, "not a RIFF/WAVE file");

  bool have_fmt = false;
  std::uint16_t format = 0, num_channels = 0, bits = 0, block_align = 0;
  std::uint32_t sample_rate = 0;
  const unsigned char *data = nullptr;
  std::size_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char *chunk = bytes.data() + pos;
    std::uint32_t size = Le32(chunk + 4);
    std::size_t avail = bytes.size() - pos - 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || size > avail)
        Fail(ErrorKind::kFormat, "malformed fmt chunk");
      format = Le16(chunk + 8);
      num_channels = Le16(chunk + 10);
      sample_rate = Le32(chunk + 12);
      block_align = Le16(chunk + 20);
      bits = Le16(chunk + 22);
      if (format == kFormatExtensible) {
        if (size < 40) Fail(ErrorKind::kFormat, "malformed extensible fmt");
        format = Le16(chunk + 8 + 24);  // first two bytes of SubFormat GUID
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      // Streamed writers leave the size unset; take what is there.
      data_size = std::min<std::size_t>(size, avail);
      break;
    }
    pos += 8 + static_cast<std::size_t>(size) + (size & 1u);
  }
  if (!have_fmt) Fail(ErrorKind::kFormat, "missing fmt chunk");
  if (data == nullptr) Fail(ErrorKind::kFormat, "missing data chunk");
  if (num_channels == 0 || sample_rate == 0)
    Fail(ErrorKind::kFormat, "fmt chunk declares zero channels or rate");

  bool pcm16 = format == kFormatPcm && bits == 16;
  bool float32 = format == kFormatFloat && bits == 32;
  if (!pcm16 && !float32)
    Fail(ErrorKind::kUnsupportedFormat,
         "unsupported encoding: format tag " + std::to_string(format) + ", " +
             std::to_string(bits) + " bits");
  std::size_t bytes_per_sample = bits / 8;
  if (block_align != bytes_per_sample * num_channels)
    Fail(ErrorKind::kFormat, "inconsistent block alignment");

  int ch = 0;
  if (num_channels > 1) {
    if (!channel)
      Fail(ErrorKind::kConfig, std::to_string(num_channels) +
                                   "-channel file needs a channel index");
    ch = *channel;
  } else if (channel) {
    ch = *channel;
  }
  if (ch < 0 || ch >= num_channels)
    Fail(ErrorKind::kConfig, "channel index " + std::to_string(ch) +
                                 " out of range for " +
                                 std::to_string(num_channels) + " channels");

  std::size_t num_frames = data_size / block_align;
  std::vector<double> samples(num_frames);
  for (std::size_t i = 0; i < num_frames; ++i) {
    const unsigned char *p = data + i * block_align + ch * bytes_per_sample;
    if (pcm16) {
      samples[i] = static_cast<std::int16_t>(Le16(p)) / 32768.0;
    } else {
      std::uint32_t raw = Le32(p);
      float f;
      std::memcpy(&f, &raw, sizeof(f));
      if (!std::isfinite(f))
        Fail(ErrorKind::kFormat, "non-finite float sample");
      samples[i] = f;
    }
  }
  return Waveform(std::move(samples), static_cast<int>(sample_rate));
}

std::vector<unsigned char> EncodeWav(const Waveform &wave,
                                     SampleEncoding encoding) {
  const bool pcm = encoding == SampleEncoding::kPcm16;
  const std::uint16_t bytes_per_sample = pcm ? 2 : 4;
  const auto data_size =
      static_cast<std::uint32_t>(wave.size() * bytes_per_sample);
  const std::uint32_t fmt_size = pcm ? 16 : 18;
  const std::uint32_t fact_size = pcm ? 0 : 12;

  std::vector<unsigned char> out;
  out.reserve(44 + fact_size + data_size + 2);
  PutTag(&out, "RIFF");
  Put32(&out, 4 + (8 + fmt_size) + fact_size + (8 + data_size));
  PutTag(&out, "WAVE");
  PutTag(&out, "fmt ");
  Put32(&out, fmt_size);
  Put16(&out, pcm ? kFormatPcm : kFormatFloat);
  Put16(&out, 1);
  Put32(&out, static_cast<std::uint32_t>(wave.sample_rate()));
  Put32(&out, static_cast<std::uint32_t>(wave.sample_rate()) * bytes_per_sample);
  Put16(&out, bytes_per_sample);
  Put16(&out, static_cast<std::uint16_t>(bytes_per_sample * 8));
  if (!pcm) {
    Put16(&out, 0);  // cbSize
    PutTag(&out, "fact");
    Put32(&out, 4);
    Put32(&out, static_cast<std::uint32_t>(wave.size()));
  }
  PutTag(&out, "data");
  Put32(&out, data_size);
  for (double v : wave.samples()) {
    if (pcm) {
      double q = std::clamp(std::round(v * 32768.0), -32768.0, 32767.0);
      Put16(&out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
    } else {
      float f = static_cast<float>(v);
      std::uint32_t raw;
      std::memcpy(&raw, &f, sizeof(raw));
      Put32(&out, raw);
    }
  }
  return out;
}

Waveform ReadWav(const std::string &path, std::optional<int> channel) {
  auto bytes = ReadFileBytes(path);
  try {
    return DecodeWav(bytes, channel);
  } catch (const Error &e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

void WriteWav(const std::string &path, const Waveform &wave,
              SampleEncoding encoding) {
  AtomicWriteFile(path, EncodeWav(wave, encoding));
}

namespace {

double Sinc(double x) {
  if (x == 0.0) return 1.0;
  double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

}  // namespace

Waveform ResampleTo(const Waveform &wave, int target_hz,
                    const ResamplerOptions &opts) {
  if (target_hz <= 0)
    Fail(ErrorKind::kConfig, "target sample rate must be positive");
  const int source_hz = wave.sample_rate();
  if (target_hz == source_hz) return wave;

  const std::int64_t g = std::gcd(source_hz, target_hz);
  const std::int64_t up = target_hz / g;    // L
  const std::int64_t down = source_hz / g;  // M
  const auto in_len = static_cast<std::int64_t>(wave.size());
  const std::int64_t out_len = (2 * in_len * up + down) / (2 * down);

  // Cutoff relative to the input Nyquist; the kernel is stretched when
  // downsampling so the number of zero crossings stays fixed.
  const double cutoff = std::min(1.0, static_cast<double>(target_hz) / source_hz);
  const double half_width = 0.5 * opts.taps_per_phase / cutoff;
  const auto reach = static_cast<std::int64_t>(std::ceil(half_width));
  const std::size_t taps = static_cast<std::size_t>(2 * reach);
  const double i0_beta = std::cyl_bessel_i(0.0, opts.kaiser_beta);

  // Phase p holds coefficients for input offsets (-reach, reach], evaluated at
  // fractional position p / up. Phases are filled on first use.
  std::vector<std::vector<double>> table(static_cast<std::size_t>(up));
  auto phase_taps = [&](std::int64_t p) -> const std::vector<double> & {
    auto &h = table[static_cast<std::size_t>(p)];
    if (!h.empty()) return h;
    h.resize(taps);
    const double frac = static_cast<double>(p) / up;
    double sum = 0.0;
    for (std::size_t j = 0; j < taps; ++j) {
      double x = static_cast<double>(static_cast<std::int64_t>(j) - reach + 1) -
                 frac;
      double r = x / half_width;
      double w = 0.0;
      if (std::abs(r) < 1.0)
        w = std::cyl_bessel_i(0.0, opts.kaiser_beta * std::sqrt(1.0 - r * r)) /
            i0_beta;
      h[j] = cutoff * Sinc(cutoff * x) * w;
      sum += h[j];
    }
    // Unit DC gain per phase.
    for (double &c : h) c /= sum;
    return h;
  };

  auto in = wave.samples();
  std::vector<double> out(static_cast<std::size_t>(out_len));
  for (std::int64_t n = 0; n < out_len; ++n) {
    const std::int64_t pos = n * down;
    const std::int64_t base = pos / up;
    const std::int64_t phase = pos % up;
    const auto &h = phase_taps(phase);
    double acc = 0.0;
    const std::int64_t first = base - reach + 1;
    const std::int64_t lo = std::max<std::int64_t>(0, first);
    const std::int64_t hi = std::min<std::int64_t>(in_len, first + reach * 2);
    for (std::int64_t k = lo; k < hi; ++k)
      acc += h[static_cast<std::size_t>(k - first)] *
             in[static_cast<std::size_t>(k)];
    out[static_cast<std::size_t>(n)] = acc;
  }
  return Waveform(std::move(out), target_hz);
}

}  // namespace spkmix
