// include/spkmix/separation.h

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

#ifndef SPKMIX_SEPARATION_H_
#define SPKMIX_SEPARATION_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "spkmix/audio.h"
#include "spkmix/matrix.h"
#include "spkmix/stft.h"

namespace spkmix {

inline constexpr double kIrmEpsilon = 1e-8;
inline constexpr std::size_t kMaxPermutationSources = 8;

enum class MaskKind { kIbm, kIrm };
MaskKind ParseMaskKind(std::string_view name);

// S time-frequency masks of identical shape with entries in [0, 1].
class MaskSet {
 public:
  MaskSet() = default;
  // kGeometry if shapes differ or the set is empty; kConfig for entries
  // outside [0, 1].
  explicit MaskSet(std::vector<RealMatrix> masks);

  std::size_t num_sources() const { return masks_.size(); }
  const RealMatrix &operator[](std::size_t s) const { return masks_[s]; }
  std::size_t rows() const { return masks_.front().rows(); }
  std::size_t cols() const { return masks_.front().cols(); }

  // masks()[perm[s]] becomes entry s.
  MaskSet Permuted(std::span<const std::size_t> perm) const;

 private:
  std::vector<RealMatrix> masks_;
};

// Mixture magnitude and the reference source magnitudes.
struct SourceMagnitudes {
  RealMatrix mixture;
  std::vector<RealMatrix> sources;

  // kGeometry unless every matrix has the mixture's shape; kConfig for
  // negative or non-finite entries.
  void Validate() const;
};

SourceMagnitudes MagnitudesOf(const Spectrogram &mixture,
                              std::span<const Spectrogram> sources);

// irm: A_s / sum_j A_j, with 1/S in bins whose total is below kIrmEpsilon.
// ibm: 1 for the loudest source in each bin, ties to the lower index.
MaskSet IdealMasks(const SourceMagnitudes &refs, MaskKind kind);

// istft(mask_s * mixture) per source, reusing the mixture phase.
std::vector<Waveform> ApplyMasks(const Spectrogram &mixture,
                                 const MaskSet &masks, std::size_t out_len);

// perm[s] is the mask assigned to reference s.
using Permutation = std::vector<std::size_t>;

// (1/B) sum_s || mask_{perm[s]} * A_mix - A_s ||_F^2 with B = S * T * F.
double UpitLoss(const MaskSet &masks, const SourceMagnitudes &refs,
                std::span<const std::size_t> perm);

struct PermutationResult {
  Permutation perm;
  double loss = 0.0;
};

// Exhaustive search over all S! assignments in lexicographic order; the
// first minimum wins. kSizeLimit when S > 8.
PermutationResult BestPermutation(const MaskSet &masks,
                                  const SourceMagnitudes &refs);

// Mask tensor file: little-endian uint32 S, T, F followed by S*T*F float32
// values, row-major (source, frame, bin).
void WriteMaskTensor(const std::string &path, const MaskSet &masks);
MaskSet ReadMaskTensor(const std::string &path);

}  // namespace spkmix

#endif  // SPKMIX_SEPARATION_H_
