// include/spkmix/metrics.h

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

#ifndef SPKMIX_METRICS_H_
#define SPKMIX_METRICS_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "spkmix/audio.h"

namespace spkmix {

// Reports clamp to +-100 dB instead of producing infinities.
inline constexpr double kSdrCapDb = 100.0;

// Scale-invariant SDR: the estimate is projected onto the reference with a
// single gain and the residual counts as distortion. This is not BSS-eval SDR
// (no distortion filter). kDegenerateInput for an all-zero reference;
// kConfig for unequal lengths. An all-zero estimate scores -100 dB.
double SiSdr(std::span<const double> ref, std::span<const double> est);
double SiSdr(const Waveform &ref, const Waveform &est);

struct EvalRow {
  std::string mix_id;
  std::vector<std::size_t> perm;  // perm[s]: estimate assigned to reference s
  std::vector<double> sdr_per_source;  // in reference order
  std::vector<double> sdri_per_source;
  double sdr_mean = 0.0;
  double sdri_mean = 0.0;
};

struct EvalSummary {
  std::size_t count = 0;
  double mean = 0.0;    // of sdri_mean
  double median = 0.0;
  double stddev = 0.0;  // population
};

struct EvalReport {
  std::vector<EvalRow> rows;
  EvalSummary summary;
};

// Signals are truncated to the shortest; a spread above 1% of the longest
// length is a kConfig error, as is a reference/estimate count mismatch. The
// assignment maximizing mean SI-SDR is chosen (first in lexicographic order on
// ties); improvement is measured against the mixture as estimate.
EvalRow EvalSeparation(const std::string &mix_id,
                       std::span<const Waveform> refs,
                       std::span<const Waveform> ests, const Waveform &mix);

EvalSummary Summarize(std::span<const EvalRow> rows);

// Per-mixture rows, then a `# summary` block. Comma-separated when csv.
std::string FormatEvalReport(const EvalReport &report, bool csv = false);

}  // namespace spkmix

#endif  // SPKMIX_METRICS_H_
