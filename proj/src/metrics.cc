// src/metrics.cc

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

#include "spkmix/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spkmix/error.h"
#include "spkmix/io_util.h"
#include "spkmix/separation.h"

namespace spkmix {

double SiSdr(std::span<const double> ref, std::span<const double> est) {
  if (ref.size() != est.size())
    Fail(ErrorKind::kConfig, "SI-SDR needs equal lengths (" +
                                 std::to_string(ref.size()) + " vs " +
                                 std::to_string(est.size()) + ")");
  double rr = 0.0, er = 0.0, ee = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    rr += ref[i] * ref[i];
    er += est[i] * ref[i];
    ee += est[i] * est[i];
  }
  if (rr == 0.0) Fail(ErrorKind::kDegenerateInput, "reference has zero energy");
  if (ee == 0.0) return -kSdrCapDb;

  const double alpha = er / rr;
  double target = 0.0, noise = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double t = alpha * ref[i];
    const double n = est[i] - t;
    target += t * t;
    noise += n * n;
  }
  if (noise == 0.0) return kSdrCapDb;
  if (target == 0.0) return -kSdrCapDb;
  return std::clamp(10.0 * std::log10(target / noise), -kSdrCapDb, kSdrCapDb);
}

double SiSdr(const Waveform &ref, const Waveform &est) {
  return SiSdr(ref.samples(), est.samples());
}

EvalRow EvalSeparation(const std::string &mix_id,
                       std::span<const Waveform> refs,
                       std::span<const Waveform> ests, const Waveform &mix) {
  const std::size_t num = refs.size();
  if (num == 0 || ests.size() != num)
    Fail(ErrorKind::kConfig, mix_id + ": " + std::to_string(num) +
                                 " references but " +
                                 std::to_string(ests.size()) + " estimates");
  if (num > kMaxPermutationSources)
    Fail(ErrorKind::kSizeLimit, mix_id + ": too many sources");

  std::size_t shortest = mix.size(), longest = mix.size();
  for (const auto *group : {&refs, &ests})
    for (const auto &w : *group) {
      shortest = std::min(shortest, w.size());
      longest = std::max(longest, w.size());
    }
  if (static_cast<double>(longest - shortest) > 0.01 * static_cast<double>(longest))
    Fail(ErrorKind::kConfig, mix_id + ": signal lengths differ by more than 1% (" +
                                 std::to_string(shortest) + " vs " +
                                 std::to_string(longest) + ")");
  auto head = [shortest](const Waveform &w) {
    return w.samples().first(shortest);
  };

  std::vector<std::vector<double>> sdr(num, std::vector<double>(num));
  std::vector<double> baseline(num);
  for (std::size_t s = 0; s < num; ++s) {
    baseline[s] = SiSdr(head(refs[s]), head(mix));
    for (std::size_t e = 0; e < num; ++e)
      sdr[s][e] = SiSdr(head(refs[s]), head(ests[e]));
  }

  std::vector<std::size_t> perm(num);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::size_t> best_perm;
  double best = 0.0;
  do {
    double total = 0.0;
    for (std::size_t s = 0; s < num; ++s) total += sdr[s][perm[s]];
    if (best_perm.empty() || total > best) {
      best = total;
      best_perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  EvalRow row;
  row.mix_id = mix_id;
  row.perm = best_perm;
  for (std::size_t s = 0; s < num; ++s) {
    row.sdr_per_source.push_back(sdr[s][best_perm[s]]);
    row.sdri_per_source.push_back(sdr[s][best_perm[s]] - baseline[s]);
  }
  row.sdr_mean = std::accumulate(row.sdr_per_source.begin(),
                                 row.sdr_per_source.end(), 0.0) / num;
  row.sdri_mean = std::accumulate(row.sdri_per_source.begin(),
                                  row.sdri_per_source.end(), 0.0) / num;
  return row;
}

EvalSummary Summarize(std::span<const EvalRow> rows) {
  EvalSummary out;
  out.count = rows.size();
  if (rows.empty()) return out;
  std::vector<double> v;
  v.reserve(rows.size());
  for (const auto &r : rows) v.push_back(r.sdri_mean);
  out.mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  double var = 0.0;
  for (double x : v) var += (x - out.mean) * (x - out.mean);
  out.stddev = std::sqrt(var / v.size());
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  out.median = v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
  return out;
}

std::string FormatEvalReport(const EvalReport &report, bool csv) {
  const char sep = csv ? ',' : '\t';
  std::size_t num = 0;
  for (const auto &r : report.rows) num = std::max(num, r.sdr_per_source.size());

  std::string out = "mix_id";
  out += sep;
  out += "perm";
  for (std::size_t s = 0; s < num; ++s) {
    out += sep + std::string("sdr_") + std::to_string(s + 1);
  }
  for (std::size_t s = 0; s < num; ++s) {
    out += sep + std::string("sdri_") + std::to_string(s + 1);
  }
  out += sep + std::string("sdr_mean") + sep + "sdri_mean\n";

  for (const auto &r : report.rows) {
    std::string perm;
    for (std::size_t i = 0; i < r.perm.size(); ++i) {
      if (i) perm += '-';
      perm += std::to_string(r.perm[i] + 1);
    }
    out += r.mix_id + sep + perm;
    for (double v : r.sdr_per_source) out += sep + FormatFixed(v, 6);
    for (double v : r.sdri_per_source) out += sep + FormatFixed(v, 6);
    out += sep + FormatFixed(r.sdr_mean, 6) + sep + FormatFixed(r.sdri_mean, 6) +
           '\n';
  }
  const auto &s = report.summary;
  out += "# summary\n";
  out += "# count" + std::string(1, sep) + std::to_string(s.count) + '\n';
  out += "# sdri_mean" + std::string(1, sep) + FormatFixed(s.mean, 6) + '\n';
  out += "# sdri_median" + std::string(1, sep) + FormatFixed(s.median, 6) + '\n';
  out += "# sdri_std" + std::string(1, sep) + FormatFixed(s.stddev, 6) + '\n';
  return out;
}

}  // namespace spkmix
