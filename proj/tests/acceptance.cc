// tests/acceptance.cc

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

// Acceptance gate. Prints one PASS/FAIL line per criterion and exits nonzero
// if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli.h"
#include "corpus.h"
#include "spkmix/audio.h"
#include "spkmix/error.h"
#include "spkmix/io_util.h"
#include "spkmix/metrics.h"
#include "spkmix/mixer.h"
#include "spkmix/mixture_list.h"
#include "spkmix/pairer.h"
#include "spkmix/rng.h"
#include "spkmix/segmenter.h"
#include "spkmix/separation.h"
#include "spkmix/stft.h"
#include "synth.h"

using namespace spkmix;
using namespace spkmix::testing;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances and limits.
constexpr double kStftRelTol = 1e-6;
constexpr double kStftTimeLimitS = 10.0;
constexpr double kSnrTolDb = 0.01;
constexpr double kLossTol = 1e-12;
constexpr double kOracleSdriFloorDb = 10.0;
// Mean IRM-oracle SI-SDR improvement measured on the corpus below, and the
// allowed drift from it.
constexpr double kOracleSdriPinnedDb = 24.7698;
constexpr double kOracleSdriPinTolDb = 0.05;
constexpr double kSegF1Floor = 0.95;
constexpr double kSegBoundaryTolS = 0.050;
constexpr double kScaleInvTolDb = 1e-9;
constexpr double kMetricTolDb = 1e-6;
constexpr double kPipelineTimeLimitS = 120.0;

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string Fmt(const char *fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

// ---------------------------------------------------------------- 1
Outcome StftRoundTrip() {
  Rng rng(StreamSeed(1, "acceptance-stft"));
  double worst = 0.0;
  const auto t0 = Clock::now();
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 4 * kDefaultWindowLength + rng.Below(20000);
    std::vector<double> x(n);
    for (double &v : x) v = rng.Uniform(-1.0, 1.0);
    const Waveform w(x, 8000);
    const Waveform y = Istft(Stft(w), n);
    // Interior: at least one full window away from both ends.
    double err = 0.0, peak = 0.0;
    for (std::size_t i = kDefaultWindowLength; i + kDefaultWindowLength < n; ++i) {
      err = std::max(err, std::abs(y[i] - x[i]));
      peak = std::max(peak, std::abs(x[i]));
    }
    worst = std::max(worst, err / peak);
  }
  const double secs = Seconds(t0);
  return {worst <= kStftRelTol && secs < kStftTimeLimitS,
          "max_rel_err=" + Fmt("%.3e", worst) + " (tol 1e-6), time=" +
              Fmt("%.2f", secs) + "s (limit 10s)"};
}

// ---------------------------------------------------------------- 2
Outcome MixingSnr() {
  constexpr int kSr = 8000;
  Rng rng(StreamSeed(1, "acceptance-mixer"));
  // 40 utterances with leading and trailing silence plus frame labels.
  std::map<std::string, Waveform> audio;
  std::map<std::string, std::vector<bool>> labels;
  std::vector<std::string> refs;
  for (int u = 0; u < 40; ++u) {
    Voice v{rng.Uniform(90, 260), rng.Uniform(-5, -1), 3500};
    const auto lead = static_cast<std::size_t>(rng.Uniform(0.1, 0.5) * kSr);
    const auto body = static_cast<std::size_t>(rng.Uniform(1.3, 4.0) * kSr);
    const auto tail = static_cast<std::size_t>(rng.Uniform(0.1, 0.5) * kSr);
    auto x = Concat({Noise(rng, lead, 1e-4),
                     Speech(rng, v, body, kSr, rng.Uniform(0.01, 0.3)),
                     Noise(rng, tail, 1e-4)});
    const std::string ref = "spk" + std::to_string(u % 10) + "_u" + std::to_string(u);
    std::vector<bool> lab;
    for (std::size_t f = 0; f * 80 < x.size(); ++f)
      lab.push_back(f * 80 >= lead && f * 80 < lead + body);
    labels[ref] = lab;
    audio.emplace(ref, Waveform(std::move(x), kSr));
    refs.push_back(ref);
  }
  AudioResolver resolve = [&audio](const std::string &r) { return audio.at(r); };
  ActivityProvider activity = [&labels](const std::string &r, std::size_t n)
      -> std::optional<std::vector<bool>> {
    return FrameLabelsToSamples(labels.at(r), 0.01, kSr, n);
  };

  std::vector<MixtureSpec> specs;
  for (int k = 0; k < 1000; ++k) {
    std::size_t a = rng.Below(refs.size()), b = rng.Below(refs.size());
    while (a % 10 == b % 10) b = rng.Below(refs.size());
    specs.push_back({refs[a], refs[b], 0, 0});
  }
  specs = AssignSnrs(specs, StreamSeed(1, "acceptance-mixer-snr"));

  double worst = 0.0;
  std::size_t not_additive = 0;
  for (std::size_t k = 0; k < specs.size(); ++k) {
    const LengthMode mode = k % 2 ? LengthMode::kMax : LengthMode::kMin;
    const bool use_labels = k % 4 < 2;
    const auto r = Render(specs[k], resolve, mode, use_labels ? activity : nullptr);
    // Independent measurement: active samples come from our own labels.
    double level[2];
    for (int s = 0; s < 2; ++s) {
      const auto &ref = s ? specs[k].utt2 : specs[k].utt1;
      const auto n_raw = audio.at(ref).size();
      std::vector<bool> act(r.mixture.size(), false);
      auto lab = FrameLabelsToSamples(labels.at(ref), 0.01, kSr, n_raw);
      for (std::size_t i = 0; i < std::min(act.size(), n_raw); ++i)
        act[i] = use_labels ? bool(lab[i]) : true;
      double sum = 0.0;
      std::size_t cnt = 0;
      for (std::size_t i = 0; i < act.size(); ++i)
        if (act[i]) {
          sum += r.sources[s][i] * r.sources[s][i];
          ++cnt;
        }
      level[s] = 10.0 * std::log10(sum / cnt);
    }
    const double got = level[0] - level[1];
    const double want = specs[k].snr1_db - specs[k].snr2_db;
    worst = std::max(worst, std::abs(got - want));
    for (std::size_t i = 0; i < r.mixture.size(); ++i)
      if (r.mixture[i] != r.sources[0][i] + r.sources[1][i]) {
        ++not_additive;
        break;
      }
  }
  return {worst <= kSnrTolDb && not_additive == 0,
          "mixtures=1000, max_snr_err=" + Fmt("%.3e", worst) +
              " dB (tol 0.01), non_additive=" + std::to_string(not_additive)};
}

// ---------------------------------------------------------------- 3
std::vector<UtteranceRecord> RandomCorpus(Rng &rng, bool *all_have_two) {
  const int speakers = 3 + static_cast<int>(rng.Below(48));
  std::vector<UtteranceRecord> utts;
  *all_have_two = true;
  char buf[64];
  for (int s = 0; s < speakers; ++s) {
    const int n = 1 + static_cast<int>(rng.Below(40));
    *all_have_two &= n >= 2;
    for (int u = 0; u < n; ++u) {
      UtteranceRecord r;
      std::snprintf(buf, sizeof(buf), "s%02d_u%02d", s, u);
      r.utt_id = buf;
      std::snprintf(buf, sizeof(buf), "s%02d", s);
      r.speaker = buf;
      r.length_s = std::round(rng.Uniform(1.3, 15.0) * 100.0) / 100.0;
      utts.push_back(r);
    }
  }
  return utts;
}

Outcome PairerConformance() {
  std::size_t same_speaker = 0, not_min = 0, nondeterministic = 0;
  std::size_t balance_checked = 0, balance_violations = 0, worst_gap = 0;
  std::size_t total_mixes = 0;
  for (int k = 0; k < 50; ++k) {
    Rng rng(StreamSeed(1, "acceptance-pairer") + static_cast<std::uint64_t>(k));
    bool all_two = false;
    const auto utts = RandomCorpus(rng, &all_two);
    std::map<std::string, std::string> speaker_of;
    for (const auto &u : utts) speaker_of[u.utt_id] = u.speaker;
    // Targets: below, at and above one mixture per utterance.
    for (const std::size_t target : {utts.size() / 2 + 1, utts.size(), 3 * utts.size()}) {
      const auto res = GenerateMixtureList(utts, target, true);
      total_mixes += res.mixes.size();
      std::map<std::string, int> usage;
      for (const auto &u : utts) usage[u.utt_id] = 0;
      for (std::size_t m = 0; m < res.mixes.size(); ++m) {
        const auto &mix = res.mixes[m];
        same_speaker += speaker_of.at(mix.utt1) == speaker_of.at(mix.utt2);
        int lo = usage.begin()->second;
        for (const auto &[id, c] : usage) lo = std::min(lo, c);
        not_min += usage.at(mix.utt1) != lo || res.trace[m].min_usage != lo ||
                   res.trace[m].u1 != mix.utt1;
        ++usage[mix.utt1];
        ++usage[mix.utt2];
      }
      if (target == utts.size() && all_two) {
        int lo = 1 << 30, hi = 0;
        for (const auto &[id, c] : usage) {
          lo = std::min(lo, c);
          hi = std::max(hi, c);
        }
        ++balance_checked;
        worst_gap = std::max<std::size_t>(worst_gap, hi - lo);
        balance_violations += hi - lo > 2;
      }
      const std::uint64_t seed = 1000 + k;
      const auto a = FormatMixtureList(AssignSnrs(res.mixes, seed));
      const auto again = GenerateMixtureList(utts, target, false);
      const auto b = FormatMixtureList(AssignSnrs(again.mixes, seed));
      nondeterministic += a != b;
    }
  }

  // Hand trace: A 3.0 s, B 2.0 s, C 1.9 s, target 3.
  std::vector<UtteranceRecord> abc(3);
  const char *ids[] = {"A", "B", "C"};
  const double lens[] = {3.0, 2.0, 1.9};
  for (int i = 0; i < 3; ++i) {
    abc[i].utt_id = abc[i].speaker = ids[i];
    abc[i].length_s = lens[i];
  }
  const auto hand = GenerateMixtureList(abc, 3).mixes;
  const bool trace_ok = hand.size() == 3 && hand[0].utt1 == "A" &&
                        hand[0].utt2 == "B" && hand[1].utt1 == "C" &&
                        hand[1].utt2 == "B" && hand[2].utt1 == "A" &&
                        hand[2].utt2 == "C";

  const bool pass = same_speaker == 0 && not_min == 0 && nondeterministic == 0 &&
                    balance_violations == 0 && trace_ok;
  return {pass,
          "corpora=50, mixtures=" + std::to_string(total_mixes) +
              ", (a) same_speaker=" + std::to_string(same_speaker) +
              ", (b) u1_not_min=" + std::to_string(not_min) +
              ", (c) balance_violations=" + std::to_string(balance_violations) +
              "/" + std::to_string(balance_checked) +
              " (target=N, worst_gap=" + std::to_string(worst_gap) + ")" +
              ", (d) nondeterministic=" + std::to_string(nondeterministic) +
              ", (e) hand_trace=" + (trace_ok ? "match" : "MISMATCH")};
}

// ---------------------------------------------------------------- 4
double LoopLoss(const std::vector<RealMatrix> &m, const RealMatrix &mix,
                const std::vector<RealMatrix> &src, const std::vector<std::size_t> &p) {
  const std::size_t S = src.size(), T = mix.rows(), F = mix.cols();
  double total = 0.0;
  for (std::size_t s = 0; s < S; ++s)
    for (std::size_t t = 0; t < T; ++t)
      for (std::size_t f = 0; f < F; ++f) {
        const double d = m[p[s]](t, f) * mix(t, f) - src[s](t, f);
        total += d * d;
      }
  return total / static_cast<double>(S * T * F);
}

Outcome UpitOracle() {
  Rng rng(StreamSeed(1, "acceptance-upit"));
  double worst = 0.0;
  std::size_t perm_mismatch = 0, asym = 0;
  for (int k = 0; k < 200; ++k) {
    const std::size_t S = 2 + rng.Below(2), T = 1 + rng.Below(8), F = 1 + rng.Below(8);
    std::vector<RealMatrix> masks, src;
    RealMatrix mix(T, F);
    for (std::size_t s = 0; s < S; ++s) {
      RealMatrix m(T, F), a(T, F);
      for (double &v : m.data()) v = rng.Uniform01();
      for (double &v : a.data()) v = rng.Uniform(0, 2);
      masks.push_back(m);
      src.push_back(a);
    }
    for (double &v : mix.data()) v = rng.Uniform(0, 3);
    SourceMagnitudes refs{mix, src};
    const MaskSet set(masks);

    std::vector<std::size_t> p(S);
    std::iota(p.begin(), p.end(), 0);
    std::vector<std::size_t> best_p;
    double best = 0.0;
    do {
      const double oracle = LoopLoss(masks, mix, src, p);
      worst = std::max(worst, std::abs(oracle - UpitLoss(set, refs, p)));
      if (best_p.empty() || oracle < best) {
        best = oracle;
        best_p = p;
      }
    } while (std::next_permutation(p.begin(), p.end()));
    const auto got = BestPermutation(set, refs);
    perm_mismatch += got.perm != best_p || std::abs(got.loss - best) > kLossTol;

    std::vector<std::size_t> sigma(S);
    std::iota(sigma.begin(), sigma.end(), 0);
    while (std::next_permutation(sigma.begin(), sigma.end())) {
      const auto permuted = BestPermutation(set.Permuted(sigma), refs);
      asym += permuted.loss != got.loss;
    }
  }
  return {worst <= kLossTol && perm_mismatch == 0 && asym == 0,
          "instances=200, max_loss_err=" + Fmt("%.3e", worst) +
              " (tol 1e-12), perm_mismatch=" + std::to_string(perm_mismatch) +
              ", symmetry_violations=" + std::to_string(asym)};
}

// ---------------------------------------------------------------- 5
Outcome OracleSeparation() {
  constexpr int kSr = 8000;
  Rng rng(StreamSeed(1, "acceptance-oracle"));
  std::vector<MixtureSpec> specs(500);
  specs = AssignSnrs(specs, StreamSeed(1, "acceptance-oracle-snr"));
  double irm_sum = 0.0, ibm_sum = 0.0;
  for (std::size_t k = 0; k < specs.size(); ++k) {
    // Two non-overlapping bands with a guard gap between them.
    const double split = rng.Uniform(900, 2600);
    const auto n1 = static_cast<std::size_t>(rng.Uniform(1.3, 3.0) * kSr);
    const auto n2 = static_cast<std::size_t>(rng.Uniform(1.3, 3.0) * kSr);
    Waveform low(BandSignal(rng, 100, split - 150, n1, kSr), kSr);
    Waveform high(BandSignal(rng, split + 150, 3900, n2, kSr), kSr);
    const bool swap = k % 2;
    std::map<std::string, Waveform> audio{{"a", swap ? high : low},
                                          {"b", swap ? low : high}};
    specs[k].utt1 = "a";
    specs[k].utt2 = "b";
    const auto r = Render(specs[k], [&audio](const std::string &ref) {
      return audio.at(ref);
    });
    const Spectrogram mix = Stft(r.mixture);
    const std::vector<Spectrogram> srcs{Stft(r.sources[0]), Stft(r.sources[1])};
    const auto mags = MagnitudesOf(mix, srcs);
    const std::vector<Waveform> refs{r.sources[0], r.sources[1]};
    for (MaskKind kind : {MaskKind::kIrm, MaskKind::kIbm}) {
      const auto ests = ApplyMasks(mix, IdealMasks(mags, kind), r.mixture.size());
      const auto row = EvalSeparation("m", refs, ests, r.mixture);
      (kind == MaskKind::kIrm ? irm_sum : ibm_sum) += row.sdri_mean;
    }
  }
  const double irm = irm_sum / specs.size(), ibm = ibm_sum / specs.size();
  const bool pinned = std::abs(irm - kOracleSdriPinnedDb) <= kOracleSdriPinTolDb;
  return {irm > kOracleSdriFloorDb && pinned,
          "mixtures=500, irm_mean_sdri=" + Fmt("%.4f", irm) + " dB (> 10, pinned " +
              Fmt("%.4f", kOracleSdriPinnedDb) + " +- 0.05), ibm_mean_sdri=" +
              Fmt("%.4f", ibm) + " dB (reported only)"};
}

// ---------------------------------------------------------------- 6
struct Interval {
  double start, end;
};

Outcome Segmentation() {
  constexpr int kSr = 16000;
  Rng rng(StreamSeed(1, "acceptance-segment"));
  std::size_t tp = 0, n_pred = 0, n_truth = 0;
  for (int rec = 0; rec < 20; ++rec) {
    const Voice va{rng.Uniform(90, 150), -3, 3500}, vb{rng.Uniform(180, 260), -2, 3500};
    std::vector<double> ca = Noise(rng, kSr / 2, 1e-4), cb = Noise(rng, kSr / 2, 1e-4);
    std::vector<Interval> truth;
    auto pos = [&] { return static_cast<double>(ca.size()) / kSr; };
    for (int t = 0; t < 10; ++t) {
      const int who = static_cast<int>(rng.Below(3));  // 0: A, 1: B, 2: both
      // Some solo turns are too short to keep.
      const double len = rng.Below(5) == 0 ? rng.Uniform(0.6, 1.2) : rng.Uniform(1.5, 4.0);
      const auto n = static_cast<std::size_t>(len * kSr);
      std::vector<double> a(n, 0.0), b(n, 0.0);
      if (who != 1) a = Speech(rng, va, n, kSr, 0.1);
      if (who != 0) b = Speech(rng, vb, n, kSr, 0.1);
      if (who == 0 && len >= kMinUtteranceSeconds) truth.push_back({pos(), pos() + len});
      for (std::size_t i = 0; i < n; ++i) {
        // Each close-talk channel picks up the other talker 20 dB down.
        ca.push_back(a[i] + 0.1 * b[i] + rng.Uniform(-1e-4, 1e-4));
        cb.push_back(b[i] + 0.1 * a[i] + rng.Uniform(-1e-4, 1e-4));
      }
      const auto gap = static_cast<std::size_t>(rng.Uniform(0.5, 1.0) * kSr);
      auto ga = Noise(rng, gap, 1e-4), gb = Noise(rng, gap, 1e-4);
      ca.insert(ca.end(), ga.begin(), ga.end());
      cb.insert(cb.end(), gb.begin(), gb.end());
    }
    const Waveform wa(ca, kSr), wb(cb, kSr);
    EnergyRegionOptions eo;
    eo.recording = "rec" + std::to_string(rec);
    eo.speaker = "A";
    const auto regions = EnergyRegions(wa, wb, eo);
    const auto pred = LengthFilter(SadRefine(wa, regions));
    n_pred += pred.size();
    n_truth += truth.size();
    std::vector<bool> used(truth.size(), false);
    for (const auto &p : pred)
      for (std::size_t i = 0; i < truth.size(); ++i)
        if (!used[i] && std::abs(p.start_s - truth[i].start) <= kSegBoundaryTolS &&
            std::abs(p.end_s - truth[i].end) <= kSegBoundaryTolS) {
          used[i] = true;
          ++tp;
          break;
        }
  }
  const double precision = n_pred ? double(tp) / n_pred : 0.0;
  const double recall = n_truth ? double(tp) / n_truth : 0.0;
  const double f1 = precision + recall > 0 ? 2 * precision * recall / (precision + recall) : 0.0;

  // Length filter boundary: exactly the segments below 1.3 s go.
  std::vector<CandidateSegment> segs;
  std::size_t expected_kept = 0;
  Rng lr(StreamSeed(1, "acceptance-length"));
  for (int i = 0; i < 2000; ++i) {
    double d = i < 6 ? std::vector<double>{1.3, std::nextafter(1.3, 0.0),
                                           std::nextafter(1.3, 2.0), 1.2999,
                                           1.3001, 0.0}[i]
                     : lr.Uniform(0.0, 3.0);
    segs.push_back({"r", "s", 10.0 * i, 10.0 * i + d});
    // Durations as the filter sees them.
    expected_kept += segs.back().duration() >= kMinUtteranceSeconds;
  }
  const auto kept = LengthFilter(segs);
  bool exact = kept.size() == expected_kept;
  for (const auto &s : kept) exact &= s.duration() >= kMinUtteranceSeconds;

  return {f1 >= kSegF1Floor && exact,
          "recordings=20, truth=" + std::to_string(n_truth) + ", predicted=" +
              std::to_string(n_pred) + ", f1=" + Fmt("%.4f", f1) +
              " (>= 0.95 at 50 ms), length_filter=" + (exact ? "exact" : "WRONG") +
              " (" + std::to_string(kept.size()) + "/2000 kept)"};
}

// ---------------------------------------------------------------- 7
int RunCli(std::vector<std::string> args, std::string *out = nullptr) {
  args.insert(args.begin(), "spkmix");
  std::ostringstream o, e;
  const int code = cli::Run(args, o, e);
  if (out) *out = o.str();
  if (code != 0) std::fprintf(stderr, "%s", e.str().c_str());
  return code;
}

Outcome SplitDiscipline() {
  TempDir dir("acceptance-split");
  Rng rng(StreamSeed(1, "acceptance-split"));
  // 546 speakers, 20 utterances each.
  std::vector<CandidateSegment> segs;
  char buf[32];
  for (int s = 0; s < 546; ++s) {
    std::snprintf(buf, sizeof(buf), "spk%03d", s);
    double t = 0.0;
    for (int u = 0; u < 20; ++u) {
      const double len = std::round(rng.Uniform(1.3, 12.0) * 1000) / 1000;
      segs.push_back({"rec" + std::string(buf), buf, t, t + len});
      t += len + 1.0;
    }
  }
  WriteSegmentsTsv(dir / "segments.tsv", segs);
  const auto t0 = Clock::now();
  const int code = RunCli({"--seed", "3", "pair", "--segments", dir / "segments.tsv",
                           "--out-dir", dir / "lists", "--test-speakers", "45",
                           "--cv-speakers", "50"});
  const double secs = Seconds(t0);
  if (code != 0) return {false, "pair exited with " + std::to_string(code)};

  std::map<std::string, std::string> subset_of;
  std::size_t overlap = 0;
  std::map<std::string, std::size_t> lines, speakers;
  for (const char *tag : {"tr", "cv", "tt"}) {
    const auto list = ReadMixtureList(dir / (std::string("lists/mix_2_spk_") + tag + ".txt"));
    lines[tag] = list.size();
    std::set<std::string> mine;
    for (const auto &m : list)
      for (const auto *ref : {&m.utt1, &m.utt2}) mine.insert(ref->substr(0, ref->find('_')));
    speakers[tag] = mine.size();
    for (const auto &s : mine)
      if (!subset_of.emplace(s, tag).second) ++overlap;
  }
  const bool sizes = lines["tr"] == kDefaultTrainMixes && lines["cv"] == kDefaultCvMixes &&
                     lines["tt"] == kDefaultTestMixes;
  return {overlap == 0 && sizes,
          "speakers tr/cv/tt=" + std::to_string(speakers["tr"]) + "/" +
              std::to_string(speakers["cv"]) + "/" + std::to_string(speakers["tt"]) +
              ", shared=" + std::to_string(overlap) + ", mixtures tr/cv/tt=" +
              std::to_string(lines["tr"]) + "/" + std::to_string(lines["cv"]) + "/" +
              std::to_string(lines["tt"]) + " (want 20000/5000/4000), time=" +
              Fmt("%.1f", secs) + "s"};
}

// ---------------------------------------------------------------- 8
Outcome MetricIdentities() {
  Rng rng(StreamSeed(1, "acceptance-metrics"));
  double scale_err = 0.0, ortho_err = 0.0, mix_err = 0.0;
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 1000 + rng.Below(8000);
    std::vector<double> ref(n), est(n), noise(n);
    for (std::size_t i = 0; i < n; ++i) {
      ref[i] = rng.Uniform(-1, 1);
      est[i] = ref[i] + rng.Uniform(-0.5, 0.5);
      noise[i] = rng.Uniform(-1, 1);
    }
    const double base = SiSdr(ref, est);
    for (double g : {1e-3, 0.5, 7.0, 1e3}) {
      std::vector<double> scaled(est);
      for (double &v : scaled) v *= g;
      scale_err = std::max(scale_err, std::abs(SiSdr(ref, scaled) - base));
    }
    // Noise orthogonal to the reference at one tenth of its amplitude.
    double rr = 0.0, nr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      rr += ref[i] * ref[i];
      nr += noise[i] * ref[i];
    }
    double nn = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      noise[i] -= nr / rr * ref[i];
      nn += noise[i] * noise[i];
    }
    std::vector<double> noisy(n);
    for (std::size_t i = 0; i < n; ++i) noisy[i] = ref[i] + noise[i] * std::sqrt(rr / nn) * 0.1;
    ortho_err = std::max(ortho_err, std::abs(SiSdr(ref, noisy) - 20.0));

    std::vector<double> other(n), mix(n);
    for (std::size_t i = 0; i < n; ++i) {
      other[i] = rng.Uniform(-1, 1);
      mix[i] = ref[i] + other[i];
    }
    const std::vector<Waveform> refs{Waveform(ref, 8000), Waveform(other, 8000)};
    const Waveform m(mix, 8000);
    const std::vector<Waveform> ests{m, m};
    const auto row = EvalSeparation("m", refs, ests, m);
    for (double v : row.sdri_per_source) mix_err = std::max(mix_err, std::abs(v));
  }
  return {scale_err <= kScaleInvTolDb && ortho_err <= kMetricTolDb && mix_err <= kMetricTolDb,
          "scale_invariance_err=" + Fmt("%.3e", scale_err) + " dB (tol 1e-9), orthogonal_20db_err=" +
              Fmt("%.3e", ortho_err) + " dB (tol 1e-6), mixture_sdri=" + Fmt("%.3e", mix_err) +
              " dB (tol 1e-6)"};
}

// ---------------------------------------------------------------- 9
// Runs the whole pipeline into dir/out and returns every report and manifest
// keyed by relative path, plus a digest of each audio output.
std::map<std::string, std::string> Pipeline(const TempDir &dir, const MicroCorpus &c,
                                            const std::string &jobs, bool *ok) {
  const std::string out = dir / "out";
  fs::remove_all(out);
  const std::string o = out + "/";
  *ok = RunCli({"--seed", "9", "--jobs", jobs, "segment", "--annotations", c.annotations,
                "--recordings", c.recordings, "--out", o + "segments.tsv",
                "--audio-dir", o + "utt"}) == 0 &&
        RunCli({"--seed", "9", "--jobs", jobs, "verify", "--segments", o + "segments.tsv",
                "--audio-dir", o + "utt", "--threshold", "0.95", "--min-enroll", "8",
                "--out", o + "kept.tsv", "--report", o + "scores.tsv"}) == 0 &&
        RunCli({"--seed", "9", "--jobs", jobs, "pair", "--segments", o + "kept.tsv",
                "--audio-dir", o + "utt", "--target", "40", "--out", o + "list.txt",
                "--trace"}) == 0 &&
        RunCli({"--seed", "9", "--jobs", jobs, "mix", "--list", o + "list.txt",
                "--out-dir", o + "mix", "--mode", "both"}) == 0 &&
        RunCli({"--seed", "9", "--jobs", jobs, "separate", "--mix-dir", o + "mix/min",
                "--mask", "irm"}) == 0 &&
        RunCli({"--seed", "9", "--jobs", jobs, "eval", "--mix-dir", o + "mix/min",
                "--out", o + "eval.tsv"}) == 0;
  std::map<std::string, std::string> files;
  if (!*ok) return files;
  for (const auto &e : fs::recursive_directory_iterator(out)) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), out).string();
    files[rel] = ReadFileText(e.path().string());
  }
  return files;
}

Outcome EndToEnd() {
  TempDir dir("acceptance-e2e");
  const auto corpus = MakeMicroCorpus(dir / "corpus", StreamSeed(1, "acceptance-e2e"));
  bool ok1 = false, ok2 = false;
  auto t0 = Clock::now();
  const auto first = Pipeline(dir, corpus, "4", &ok1);
  const double secs1 = Seconds(t0);
  t0 = Clock::now();
  const auto second = Pipeline(dir, corpus, "1", &ok2);
  const double secs2 = Seconds(t0);
  if (!ok1 || !ok2) return {false, "a pipeline stage failed"};

  std::size_t manifests = 0, differing = 0;
  for (const auto &[name, body] : first) {
    manifests += name.ends_with("manifest.json");
    auto it = second.find(name);
    differing += it == second.end() || it->second != body;
  }
  differing += second.size() != first.size();
  const bool pass = differing == 0 && manifests > 0 &&
                    std::max(secs1, secs2) < kPipelineTimeLimitS;
  return {pass, "files=" + std::to_string(first.size()) + " (manifests " +
                    std::to_string(manifests) + "), differing=" + std::to_string(differing) +
                    ", wall=" + Fmt("%.1f", secs1) + "s/" + Fmt("%.1f", secs2) +
                    "s (limit 120s each)"};
}

}  // namespace

int main() {
  struct Criterion {
    const char *name;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"stft-roundtrip", StftRoundTrip},       {"mixing-snr", MixingSnr},
      {"pairer-conformance", PairerConformance}, {"upit-oracle", UpitOracle},
      {"oracle-separation", OracleSeparation}, {"segmentation", Segmentation},
      {"split-discipline", SplitDiscipline},   {"metric-identities", MetricIdentities},
      {"end-to-end-determinism", EndToEnd},
  };
  int failures = 0, index = 0;
  for (const auto &c : criteria) {
    ++index;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", index, c.name,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", index - failures, index);
  return failures == 0 ? 0 : 1;
}
