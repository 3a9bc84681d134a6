// src/segmenter.cc

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

#include "spkmix/segmenter.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "spkmix/error.h"
#include "spkmix/io_util.h"

namespace spkmix {

namespace {

void CheckAnnotation(const AnnotationSegment &a) {
  if (!(a.start_s >= 0.0) || !(a.end_s > a.start_s))
    Fail(ErrorKind::kConfig, "annotation for speaker '" + a.speaker +
                                 "' has invalid bounds [" +
                                 std::to_string(a.start_s) + ", " +
                                 std::to_string(a.end_s) + "]");
}

}  // namespace

std::vector<CandidateSegment> SingleSpeakerRegions(
    std::span<const AnnotationSegment> annotations,
    const std::string &recording) {
  struct Event {
    double time;
    int delta;
    const std::string *speaker;
  };
  std::vector<Event> events;
  events.reserve(2 * annotations.size());
  for (const auto &a : annotations) {
    if (a.recording != recording)
      Fail(ErrorKind::kConfig, "annotation for recording '" + a.recording +
                                   "' passed while segmenting '" + recording +
                                   "'");
    CheckAnnotation(a);
    events.push_back({a.start_s, +1, &a.speaker});
    events.push_back({a.end_s, -1, &a.speaker});
  }
  std::sort(events.begin(), events.end(),
            [](const Event &x, const Event &y) { return x.time < y.time; });

  std::map<std::string, int> active;
  std::vector<CandidateSegment> out;
  for (std::size_t i = 0; i < events.size();) {
    const double t = events[i].time;
    for (; i < events.size() && events[i].time == t; ++i) {
      int &count = active[*events[i].speaker];
      count += events[i].delta;
      if (count == 0) active.erase(*events[i].speaker);
    }
    if (i == events.size() || active.size() != 1) continue;
    const double next = events[i].time;
    const std::string &spk = active.begin()->first;
    if (!out.empty() && out.back().speaker == spk && out.back().end_s == t) {
      out.back().end_s = next;
    } else {
      out.push_back({recording, spk, t, next, SegmentSource::kTranscript});
    }
  }
  return out;
}

namespace {

std::vector<double> FrameMeanSquares(std::span<const double> x,
                                     std::size_t frame_len, std::size_t step,
                                     std::size_t num_frames) {
  std::vector<double> energy(num_frames, 0.0);
  for (std::size_t f = 0; f < num_frames; ++f) {
    double acc = 0.0;
    const std::size_t off = f * step;
    for (std::size_t n = 0; n < frame_len; ++n) acc += x[off + n] * x[off + n];
    energy[f] = acc / static_cast<double>(frame_len);
  }
  return energy;
}

double ToDb(double ratio) { return 10.0 * std::log10(std::max(ratio, 1e-300)); }

}  // namespace

std::vector<CandidateSegment> EnergyRegions(const Waveform &target,
                                            const Waveform &other,
                                            const EnergyRegionOptions &opts) {
  if (target.sample_rate() != other.sample_rate())
    Fail(ErrorKind::kConfig, "channel sample rates differ: " +
                                 std::to_string(target.sample_rate()) +
                                 " vs " + std::to_string(other.sample_rate()));
  if (!(opts.frame_s > 0.0)) Fail(ErrorKind::kConfig, "frame_s must be > 0");
  const int sr = target.sample_rate();
  const auto frame_len =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(opts.frame_s * sr)));
  const std::size_t len_t = target.size(), len_o = other.size();
  if ((len_t > len_o ? len_t - len_o : len_o - len_t) > frame_len)
    Fail(ErrorKind::kConfig, "channel lengths differ by more than one frame");
  const std::size_t num_frames = std::min(len_t, len_o) / frame_len;

  auto et = FrameMeanSquares(target.samples(), frame_len, frame_len, num_frames);
  auto eo = FrameMeanSquares(other.samples(), frame_len, frame_len, num_frames);
  const double peak = et.empty() ? 0.0 : *std::max_element(et.begin(), et.end());
  std::vector<CandidateSegment> out;
  if (peak <= 0.0) return out;

  const double frame_dur = static_cast<double>(frame_len) / sr;
  constexpr double kTiny = 1e-20;
  std::size_t f = 0;
  auto is_speech = [&](std::size_t i) {
    return et[i] > 0.0 && ToDb(et[i] / peak) > opts.energy_floor_db &&
           ToDb((et[i] + kTiny) / (eo[i] + kTiny)) > opts.ratio_min_db;
  };
  while (f < num_frames) {
    if (!is_speech(f)) {
      ++f;
      continue;
    }
    std::size_t g = f;
    while (g < num_frames && is_speech(g)) ++g;
    out.push_back({opts.recording, opts.speaker, f * frame_dur, g * frame_dur,
                   SegmentSource::kEnergy});
    f = g;
  }
  return out;
}

namespace {

struct Interval {
  double start, end;
};

// Bridges pauses shorter than min_pause_s, drops runs shorter than
// min_speech_s and clips to the region.
std::vector<CandidateSegment> FinishRegion(std::vector<Interval> runs,
                                           const CandidateSegment &region,
                                           const SadParams &params) {
  std::vector<Interval> merged;
  for (const auto &r : runs) {
    Interval c{std::max(r.start, region.start_s), std::min(r.end, region.end_s)};
    if (!(c.end > c.start)) continue;
    if (!merged.empty() && c.start - merged.back().end < params.min_pause_s) {
      merged.back().end = std::max(merged.back().end, c.end);
    } else {
      merged.push_back(c);
    }
  }
  std::vector<CandidateSegment> out;
  for (const auto &m : merged) {
    if (m.end - m.start < params.min_speech_s) continue;
    CandidateSegment seg = region;
    seg.start_s = m.start;
    seg.end_s = m.end;
    out.push_back(std::move(seg));
  }
  return out;
}

void SortSegments(std::vector<CandidateSegment> *segs) {
  std::sort(segs->begin(), segs->end(),
            [](const CandidateSegment &a, const CandidateSegment &b) {
              if (a.recording != b.recording) return a.recording < b.recording;
              if (a.start_s != b.start_s) return a.start_s < b.start_s;
              if (a.end_s != b.end_s) return a.end_s < b.end_s;
              return a.speaker < b.speaker;
            });
}

}  // namespace

std::vector<CandidateSegment> SadRefine(
    const Waveform &wave, std::span<const CandidateSegment> regions,
    const SadParams &params) {
  if (!(params.step_s > 0.0) || params.frame_s < params.step_s)
    Fail(ErrorKind::kConfig, "SAD needs 0 < step_s <= frame_s");
  if (params.off_db > params.on_db)
    Fail(ErrorKind::kConfig, "SAD off threshold must not exceed on threshold");
  const int sr = wave.sample_rate();
  const auto frame_len = static_cast<std::size_t>(std::lround(params.frame_s * sr));
  const auto step = static_cast<std::size_t>(std::lround(params.step_s * sr));
  if (frame_len == 0 || step == 0)
    Fail(ErrorKind::kConfig, "SAD frame shorter than one sample");

  const std::size_t num_frames =
      wave.size() >= frame_len ? (wave.size() - frame_len) / step + 1 : 0;
  const auto energy =
      FrameMeanSquares(wave.samples(), frame_len, step, num_frames);
  const double peak =
      energy.empty() ? 0.0 : *std::max_element(energy.begin(), energy.end());
  const double abs_floor = std::pow(10.0, params.abs_floor_db / 10.0);
  const double step_dur = static_cast<double>(step) / sr;
  const double frame_dur = static_cast<double>(frame_len) / sr;
  const auto hangover =
      static_cast<std::size_t>(std::lround(params.hangover_s / step_dur));

  auto level_db = [&](std::size_t f) {
    return energy[f] <= abs_floor || peak <= 0.0 ? -1e300
                                                 : ToDb(energy[f] / peak);
  };
  // A speech run over frames [a, b] maps to frame centres +- half a step.
  auto run_interval = [&](std::size_t a, std::size_t b) {
    return Interval{a * step_dur + 0.5 * (frame_dur - step_dur),
                    b * step_dur + 0.5 * (frame_dur + step_dur)};
  };

  std::vector<CandidateSegment> out;
  for (const auto &region : regions) {
    const double first_sample = std::ceil(region.start_s * sr - 1e-9);
    const double last_sample = std::floor(region.end_s * sr + 1e-9);
    if (last_sample - first_sample < static_cast<double>(frame_len)) continue;
    const auto f_begin = static_cast<std::size_t>(
        std::ceil(std::max(0.0, first_sample) / static_cast<double>(step)));
    std::size_t f_end = f_begin;  // exclusive
    while (f_end < num_frames &&
           static_cast<double>(f_end * step + frame_len) <= last_sample)
      ++f_end;

    std::vector<Interval> runs;
    bool in_speech = false;
    std::size_t run_start = 0, last_speech = 0;
    for (std::size_t f = f_begin; f < f_end; ++f) {
      const double db = level_db(f);
      if (!in_speech) {
        if (db > params.on_db) {
          in_speech = true;
          run_start = last_speech = f;
        }
      } else if (db >= params.off_db) {
        last_speech = f;
      } else if (f - last_speech > hangover) {
        runs.push_back(run_interval(run_start, last_speech));
        in_speech = false;
      }
    }
    if (in_speech) runs.push_back(run_interval(run_start, last_speech));
    auto refined = FinishRegion(std::move(runs), region, params);
    out.insert(out.end(), refined.begin(), refined.end());
  }
  SortSegments(&out);
  return out;
}

std::vector<CandidateSegment> SadRefineWithLabels(
    const FrameLabels &labels, std::span<const CandidateSegment> regions,
    const SadParams &params) {
  if (!(labels.step_s > 0.0)) Fail(ErrorKind::kConfig, "label step must be > 0");
  std::vector<Interval> runs;
  const auto &s = labels.speech;
  for (std::size_t i = 0; i < s.size();) {
    if (!s[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < s.size() && s[j]) ++j;
    runs.push_back({i * labels.step_s, j * labels.step_s});
    i = j;
  }
  std::vector<CandidateSegment> out;
  for (const auto &region : regions) {
    std::vector<Interval> inside;
    for (const auto &r : runs)
      if (r.end > region.start_s && r.start < region.end_s) inside.push_back(r);
    auto refined = FinishRegion(std::move(inside), region, params);
    out.insert(out.end(), refined.begin(), refined.end());
  }
  SortSegments(&out);
  return out;
}

std::vector<CandidateSegment> LengthFilter(
    std::span<const CandidateSegment> segments, double min_s) {
  // Absorb rounding in end - start so a nominal 1.3 s segment is kept.
  constexpr double kSlack = 1e-9;
  std::vector<CandidateSegment> out;
  for (const auto &s : segments)
    if (s.duration() + kSlack >= min_s) out.push_back(s);
  return out;
}

namespace {

// Same rounding as the id, so a reread segment reproduces its id.
std::string MillisecondString(double t) {
  const long long ms = std::llround(t * 1000.0);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s%lld.%03lld", ms < 0 ? "-" : "",
                std::llabs(ms) / 1000, std::llabs(ms) % 1000);
  return buf;
}

}  // namespace

std::string UtteranceId(const CandidateSegment &seg) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "_%07lld_%07lld",
                static_cast<long long>(std::llround(seg.start_s * 1000.0)),
                static_cast<long long>(std::llround(seg.end_s * 1000.0)));
  return seg.speaker + "_" + seg.recording + buf;
}

std::vector<AnnotationSegment> ReadAnnotationsJson(const std::string &path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(ReadFileText(path));
  } catch (const nlohmann::json::parse_error &e) {
    Fail(ErrorKind::kFormat, path + ": " + e.what());
  }
  if (!doc.is_object())
    Fail(ErrorKind::kFormat,
         path + ": expected an object mapping recording to annotations");
  std::vector<AnnotationSegment> out;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!it.value().is_array())
      Fail(ErrorKind::kFormat, path + ": recording '" + it.key() +
                                   "' must map to an array");
    for (const auto &item : it.value()) {
      if (!item.is_object() || item.size() != 3 || !item.contains("speaker") ||
          !item.contains("start_s") || !item.contains("end_s") ||
          !item["speaker"].is_string() || !item["start_s"].is_number() ||
          !item["end_s"].is_number())
        Fail(ErrorKind::kFormat,
             path + ": annotation must be {speaker, start_s, end_s}, got " +
                 item.dump());
      AnnotationSegment a{item["speaker"].get<std::string>(), it.key(),
                          item["start_s"].get<double>(),
                          item["end_s"].get<double>()};
      CheckAnnotation(a);
      out.push_back(std::move(a));
    }
  }
  return out;
}

std::vector<AnnotationSegment> ReadAnnotationsTsv(const std::string &path) {
  std::vector<AnnotationSegment> out;
  for (const auto &line : ReadDataLines(path)) {
    auto f = SplitFields(line);
    if (f.size() != 4)
      Fail(ErrorKind::kFormat, path + ": expected 4 fields: " + line);
    AnnotationSegment a{f[1], f[0], ParseDouble(f[2], "start_s"),
                        ParseDouble(f[3], "end_s")};
    CheckAnnotation(a);
    out.push_back(std::move(a));
  }
  return out;
}

std::string FormatSegmentsTsv(std::span<const CandidateSegment> segments) {
  std::string out;
  for (const auto &s : segments) {
    out += UtteranceId(s) + '\t' + s.recording + '\t' + s.speaker + '\t' +
           MillisecondString(s.start_s) + '\t' + MillisecondString(s.end_s) +
           '\n';
  }
  return out;
}

void WriteSegmentsTsv(const std::string &path,
                      std::span<const CandidateSegment> segments) {
  AtomicWriteFile(path, FormatSegmentsTsv(segments));
}

std::vector<SegmentRow> ReadSegmentsTsv(const std::string &path) {
  std::vector<SegmentRow> out;
  for (const auto &line : ReadDataLines(path)) {
    auto f = SplitFields(line);
    if (f.size() != 5)
      Fail(ErrorKind::kFormat, path + ": expected 5 fields: " + line);
    CandidateSegment seg{f[1], f[2], ParseDouble(f[3], "start_s"),
                         ParseDouble(f[4], "end_s"),
                         SegmentSource::kTranscript};
    if (!(seg.end_s > seg.start_s))
      Fail(ErrorKind::kFormat, path + ": empty segment: " + line);
    out.push_back({f[0], std::move(seg)});
  }
  return out;
}

std::map<std::string, std::vector<bool>> ReadFrameLabelFile(
    const std::string &path) {
  std::map<std::string, std::vector<bool>> out;
  for (const auto &line : ReadDataLines(path)) {
    auto f = SplitFields(line);
    std::vector<bool> labels;
    labels.reserve(f.size() - 1);
    for (std::size_t i = 1; i < f.size(); ++i) {
      if (f[i] != "0" && f[i] != "1")
        Fail(ErrorKind::kFormat, path + ": labels must be 0 or 1: " + f[0]);
      labels.push_back(f[i] == "1");
    }
    if (!out.emplace(f[0], std::move(labels)).second)
      Fail(ErrorKind::kFormat, path + ": duplicate key " + f[0]);
  }
  return out;
}

}  // namespace spkmix
