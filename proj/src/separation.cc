// src/separation.cc

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

#include "spkmix/separation.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <numeric>

#include "spkmix/error.h"
#include "spkmix/io_util.h"

namespace spkmix {

MaskKind ParseMaskKind(std::string_view name) {
  if (name == "irm") return MaskKind::kIrm;
  if (name == "ibm") return MaskKind::kIbm;
  Fail(ErrorKind::kConfig,
       "mask kind must be irm or ibm, got '" + std::string(name) + "'");
}

MaskSet::MaskSet(std::vector<RealMatrix> masks) : masks_(std::move(masks)) {
  if (masks_.empty()) Fail(ErrorKind::kGeometry, "mask set is empty");
  for (const auto &m : masks_) {
    if (!m.SameShape(masks_.front()))
      Fail(ErrorKind::kGeometry, "masks have different shapes");
    for (double v : m.data())
      if (!(v >= 0.0 && v <= 1.0))
        Fail(ErrorKind::kConfig, "mask entry outside [0, 1]");
  }
}

MaskSet MaskSet::Permuted(std::span<const std::size_t> perm) const {
  std::vector<RealMatrix> out;
  out.reserve(perm.size());
  for (std::size_t p : perm) out.push_back(masks_.at(p));
  return MaskSet(std::move(out));
}

void SourceMagnitudes::Validate() const {
  for (const auto &s : sources)
    if (!s.SameShape(mixture))
      Fail(ErrorKind::kGeometry, "source magnitude shape differs from mixture");
  auto check = [](const RealMatrix &m) {
    for (double v : m.data())
      if (!(v >= 0.0) || !std::isfinite(v))
        Fail(ErrorKind::kConfig, "magnitudes must be finite and non-negative");
  };
  check(mixture);
  for (const auto &s : sources) check(s);
}

SourceMagnitudes MagnitudesOf(const Spectrogram &mixture,
                              std::span<const Spectrogram> sources) {
  SourceMagnitudes out;
  out.mixture = Magnitude(mixture);
  for (const auto &s : sources) {
    if (!s.SameGeometry(mixture))
      Fail(ErrorKind::kGeometry, "source spectrogram geometry differs");
    out.sources.push_back(Magnitude(s));
  }
  return out;
}

MaskSet IdealMasks(const SourceMagnitudes &refs, MaskKind kind) {
  refs.Validate();
  const std::size_t num = refs.sources.size();
  if (num < 2) Fail(ErrorKind::kConfig, "ideal masks need at least 2 sources");
  const std::size_t rows = refs.mixture.rows(), cols = refs.mixture.cols();
  std::vector<RealMatrix> masks(num, RealMatrix(rows, cols));
  const std::size_t size = rows * cols;

  for (std::size_t i = 0; i < size; ++i) {
    if (kind == MaskKind::kIbm) {
      std::size_t best = 0;
      for (std::size_t s = 1; s < num; ++s)
        if (refs.sources[s].data()[i] > refs.sources[best].data()[i]) best = s;
      masks[best].data()[i] = 1.0;
      continue;
    }
    double total = 0.0;
    for (std::size_t s = 0; s < num; ++s) total += refs.sources[s].data()[i];
    for (std::size_t s = 0; s < num; ++s) {
      masks[s].data()[i] =
          total < kIrmEpsilon
              ? 1.0 / static_cast<double>(num)
              : std::min(1.0, refs.sources[s].data()[i] / total);
    }
  }
  return MaskSet(std::move(masks));
}

std::vector<Waveform> ApplyMasks(const Spectrogram &mixture,
                                 const MaskSet &masks, std::size_t out_len) {
  if (masks.rows() != mixture.num_frames() || masks.cols() != mixture.num_bins())
    Fail(ErrorKind::kGeometry,
         "mask shape " + std::to_string(masks.rows()) + "x" +
             std::to_string(masks.cols()) + " does not match spectrogram " +
             std::to_string(mixture.num_frames()) + "x" +
             std::to_string(mixture.num_bins()));
  std::vector<Waveform> out;
  out.reserve(masks.num_sources());
  for (std::size_t s = 0; s < masks.num_sources(); ++s)
    out.push_back(Istft(mixture.Masked(masks[s]), out_len));
  return out;
}

namespace {

void CheckLossInputs(const MaskSet &masks, const SourceMagnitudes &refs) {
  refs.Validate();
  if (masks.num_sources() != refs.sources.size())
    Fail(ErrorKind::kGeometry, "mask count does not match source count");
  if (masks.rows() != refs.mixture.rows() || masks.cols() != refs.mixture.cols())
    Fail(ErrorKind::kGeometry, "mask shape does not match magnitudes");
}

void CheckPermutation(std::span<const std::size_t> perm, std::size_t n) {
  std::vector<bool> seen(n, false);
  if (perm.size() != n)
    Fail(ErrorKind::kConfig, "permutation has the wrong length");
  for (std::size_t p : perm) {
    if (p >= n || seen[p]) Fail(ErrorKind::kConfig, "invalid permutation");
    seen[p] = true;
  }
}

double SquaredError(const RealMatrix &mask, const RealMatrix &mix,
                    const RealMatrix &ref) {
  double acc = 0.0;
  auto m = mask.data(), a = mix.data(), r = ref.data();
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double d = m[i] * a[i] - r[i];
    acc += d * d;
  }
  return acc;
}

}  // namespace

double UpitLoss(const MaskSet &masks, const SourceMagnitudes &refs,
                std::span<const std::size_t> perm) {
  CheckLossInputs(masks, refs);
  const std::size_t num = refs.sources.size();
  CheckPermutation(perm, num);
  double total = 0.0;
  for (std::size_t s = 0; s < num; ++s)
    total += SquaredError(masks[perm[s]], refs.mixture, refs.sources[s]);
  const double coefficients =
      static_cast<double>(num * refs.mixture.rows() * refs.mixture.cols());
  return coefficients > 0 ? total / coefficients : 0.0;
}

PermutationResult BestPermutation(const MaskSet &masks,
                                  const SourceMagnitudes &refs) {
  CheckLossInputs(masks, refs);
  const std::size_t num = refs.sources.size();
  if (num > kMaxPermutationSources)
    Fail(ErrorKind::kSizeLimit, std::to_string(num) +
                                    " sources exceed the permutation limit of " +
                                    std::to_string(kMaxPermutationSources));
  // cost[j][s]: mask j against reference s. Every candidate sums the same
  // cached terms in source order, so relabelling the masks reproduces the
  // exact same set of candidate losses.
  std::vector<std::vector<double>> cost(num, std::vector<double>(num));
  for (std::size_t j = 0; j < num; ++j)
    for (std::size_t s = 0; s < num; ++s)
      cost[j][s] = SquaredError(masks[j], refs.mixture, refs.sources[s]);
  const double coefficients =
      static_cast<double>(num * refs.mixture.rows() * refs.mixture.cols());

  Permutation perm(num);
  std::iota(perm.begin(), perm.end(), 0);
  PermutationResult best;
  bool first = true;
  do {
    double total = 0.0;
    for (std::size_t s = 0; s < num; ++s) total += cost[perm[s]][s];
    const double loss = coefficients > 0 ? total / coefficients : 0.0;
    if (first || loss < best.loss) {
      best.perm = perm;
      best.loss = loss;
      first = false;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

namespace {

void PutU32(std::vector<unsigned char> *out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i)
    out->push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xff));
}

std::uint32_t GetU32(const unsigned char *p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

void WriteMaskTensor(const std::string &path, const MaskSet &masks) {
  std::vector<unsigned char> out;
  const std::size_t s = masks.num_sources(), t = masks.rows(), f = masks.cols();
  out.reserve(12 + 4 * s * t * f);
  PutU32(&out, static_cast<std::uint32_t>(s));
  PutU32(&out, static_cast<std::uint32_t>(t));
  PutU32(&out, static_cast<std::uint32_t>(f));
  for (std::size_t k = 0; k < s; ++k) {
    for (double v : masks[k].data()) {
      float x = static_cast<float>(v);
      std::uint32_t raw;
      std::memcpy(&raw, &x, sizeof(raw));
      PutU32(&out, raw);
    }
  }
  AtomicWriteFile(path, out);
}

MaskSet ReadMaskTensor(const std::string &path) {
  const auto bytes = ReadFileBytes(path);
  if (bytes.size() < 12) Fail(ErrorKind::kFormat, path + ": truncated header");
  const std::uint64_t s = GetU32(bytes.data()), t = GetU32(bytes.data() + 4),
                      f = GetU32(bytes.data() + 8);
  if (s == 0 || t == 0 || f == 0)
    Fail(ErrorKind::kFormat, path + ": zero dimension in header");
  if (bytes.size() != 12 + 4 * s * t * f)
    Fail(ErrorKind::kFormat, path + ": size does not match header dims");
  std::vector<RealMatrix> masks;
  const unsigned char *p = bytes.data() + 12;
  for (std::uint64_t k = 0; k < s; ++k) {
    RealMatrix m(t, f);
    for (double &v : m.data()) {
      std::uint32_t raw = GetU32(p);
      p += 4;
      float x;
      std::memcpy(&x, &raw, sizeof(x));
      if (!(x >= 0.0f && x <= 1.0f))
        Fail(ErrorKind::kFormat, path + ": mask value outside [0, 1]");
      v = x;
    }
    masks.push_back(std::move(m));
  }
  return MaskSet(std::move(masks));
}

}  // namespace spkmix
