// tools/commands.cc

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

#include "commands.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <mutex>
#include <ostream>
#include <set>

#include "json.hpp"
#include "spkmix/audio.h"
#include "spkmix/error.h"
#include "spkmix/io_util.h"
#include "spkmix/metrics.h"
#include "spkmix/mixer.h"
#include "spkmix/mixture_list.h"
#include "spkmix/pairer.h"
#include "spkmix/parallel.h"
#include "spkmix/rng.h"
#include "spkmix/seg_verify.h"
#include "spkmix/segmenter.h"
#include "spkmix/separation.h"
#include "spkmix/stats.h"
#include "spkmix/stft.h"

namespace spkmix::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char *kToolVersion = "spkmix 1.0";

void Require(const std::string &value, const std::string &flag) {
  if (value.empty()) Fail(ErrorKind::kConfig, flag + " is required");
}

void RequireFile(const std::string &path, const std::string &flag) {
  Require(path, flag);
  if (!fs::is_regular_file(path))
    Fail(ErrorKind::kIo, "cannot open " + flag + " file: " + path);
}

void RequireDir(const std::string &path, const std::string &flag) {
  Require(path, flag);
  if (!fs::is_directory(path))
    Fail(ErrorKind::kIo, "cannot open " + flag + " directory: " + path);
}

std::string Digest(std::span<const unsigned char> bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

std::string FileDigest(const std::string &path) {
  return Digest(ReadFileBytes(path));
}

std::string TextDigest(std::string_view text) {
  return Digest({reinterpret_cast<const unsigned char *>(text.data()),
                 text.size()});
}

// Keys are sorted (json objects are ordered maps) and nothing depends on the
// clock or the worker count.
void WriteManifest(const std::string &path, const std::string &command,
                   const CommonOptions &common, json params, json inputs,
                   json outputs) {
  json m;
  m["command"] = command;
  m["tool"] = kToolVersion;
  m["seed"] = common.seed;
  m["parameters"] = std::move(params);
  m["inputs"] = std::move(inputs);
  m["outputs"] = std::move(outputs);
  AtomicWriteFile(path, m.dump(2) + "\n");
}

std::string FileManifestPath(const std::string &out) {
  return out + ".manifest.json";
}

std::string DirManifestPath(const std::string &dir) {
  return (fs::path(dir) / "manifest.json").string();
}

json SadJson(const SadParams &p) {
  return {{"frame_s", p.frame_s},         {"step_s", p.step_s},
          {"on_db", p.on_db},             {"off_db", p.off_db},
          {"hangover_s", p.hangover_s},   {"min_pause_s", p.min_pause_s},
          {"min_speech_s", p.min_speech_s}, {"abs_floor_db", p.abs_floor_db}};
}

bool EndsWith(const std::string &s, const std::string &suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

struct RecordingSource {
  std::string path;
  std::optional<int> channel;
};

// recording path [channel]
std::map<std::string, RecordingSource> ReadRecordings(const std::string &path) {
  std::map<std::string, RecordingSource> out;
  for (const auto &line : ReadDataLines(path)) {
    auto f = SplitFields(line);
    if (f.size() != 2 && f.size() != 3)
      Fail(ErrorKind::kFormat, path + ": expected `recording path [channel]`: " +
                                   line);
    RecordingSource src{f[1], std::nullopt};
    if (f.size() == 3) src.channel = static_cast<int>(ParseInt(f[2], "channel"));
    if (!out.emplace(f[0], src).second)
      Fail(ErrorKind::kFormat, path + ": duplicate recording " + f[0]);
  }
  return out;
}

struct ChannelPair {
  std::string recording, speaker, target, other;
};

// recording speaker target_path other_path
std::vector<ChannelPair> ReadChannelPairs(const std::string &path) {
  std::vector<ChannelPair> out;
  for (const auto &line : ReadDataLines(path)) {
    auto f = SplitFields(line);
    if (f.size() != 4)
      Fail(ErrorKind::kFormat,
           path + ": expected `recording speaker target other`: " + line);
    out.push_back({f[0], f[1], f[2], f[3]});
  }
  return out;
}

Waveform LoadRecording(const RecordingSource &src) {
  if (!fs::is_regular_file(src.path))
    Fail(ErrorKind::kIo, "cannot open recording: " + src.path);
  return ReadWav(src.path, src.channel);
}

std::vector<CandidateSegment> ApplySad(
    const std::string &mode, const SadParams &params,
    const std::map<std::string, std::vector<bool>> &labels,
    const std::string &recording, const Waveform *wave,
    const std::vector<CandidateSegment> &regions) {
  if (mode == "none") return regions;
  if (mode == "labels" || (mode == "auto" && !labels.empty())) {
    auto it = labels.find(recording);
    if (it == labels.end())
      Fail(ErrorKind::kMissingAudio, "no SAD labels for recording " + recording);
    return SadRefineWithLabels({params.step_s, it->second}, regions, params);
  }
  if (mode == "energy" || mode == "auto") {
    if (!wave) {
      if (mode == "energy")
        Fail(ErrorKind::kConfig, "energy SAD needs --recordings for " + recording);
      return regions;
    }
    return SadRefine(*wave, regions, params);
  }
  Fail(ErrorKind::kConfig, "unknown SAD mode '" + mode + "'");
}

void SortSegments(std::vector<CandidateSegment> &segs) {
  std::sort(segs.begin(), segs.end(),
            [](const CandidateSegment &a, const CandidateSegment &b) {
              return UtteranceId(a) < UtteranceId(b);
            });
}

std::string UttPath(const std::string &dir, const std::string &utt) {
  return (fs::path(dir) / (utt + ".wav")).string();
}

std::vector<std::string> WavNames(const std::string &dir) {
  std::vector<std::string> names;
  for (const auto &entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".wav")
      names.push_back(entry.path().stem().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

Waveform LoadNamed(const fs::path &dir, const std::string &name) {
  const auto path = (dir / (name + ".wav")).string();
  if (!fs::is_regular_file(path))
    Fail(ErrorKind::kMissingAudio, "missing audio: " + path);
  return ReadWav(path);
}

std::string Sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9e", v);
  return buf;
}

std::string PermString(std::span<const std::size_t> perm) {
  std::string out;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (i) out += '-';
    out += std::to_string(perm[i] + 1);
  }
  return out;
}

}  // namespace

void RunSegment(const CommonOptions &common, const SegmentOptions &opts,
                std::ostream &out) {
  Require(opts.out, "--out");
  if (opts.sample_rate <= 0)
    Fail(ErrorKind::kConfig, "--sample-rate must be positive");
  if (!opts.audio_dir.empty() && opts.sample_rate <= 0)
    Fail(ErrorKind::kConfig, "--sample-rate must be positive");

  std::map<std::string, RecordingSource> recordings;
  if (!opts.recordings.empty()) {
    RequireFile(opts.recordings, "--recordings");
    recordings = ReadRecordings(opts.recordings);
  }
  std::map<std::string, std::vector<bool>> labels;
  if (!opts.sad_labels.empty()) {
    RequireFile(opts.sad_labels, "--sad-labels");
    labels = ReadFrameLabelFile(opts.sad_labels);
  } else if (opts.sad == "labels") {
    Fail(ErrorKind::kConfig, "--sad labels needs --sad-labels");
  }

  json inputs = json::object();
  std::vector<CandidateSegment> segments;
  // Audio source per recording, used for extraction.
  std::map<std::string, RecordingSource> audio_of = recordings;

  if (!opts.segments_in.empty()) {
    RequireFile(opts.segments_in, "--segments-in");
    inputs["segments"] = FileDigest(opts.segments_in);
    for (auto &row : ReadSegmentsTsv(opts.segments_in))
      segments.push_back(row.segment);
  } else if (opts.mode == "transcript") {
    RequireFile(opts.annotations, "--annotations");
    inputs["annotations"] = FileDigest(opts.annotations);
    const auto ann = EndsWith(opts.annotations, ".json")
                         ? ReadAnnotationsJson(opts.annotations)
                         : ReadAnnotationsTsv(opts.annotations);
    std::set<std::string> recs;
    for (const auto &a : ann) recs.insert(a.recording);
    const std::vector<std::string> rec_list(recs.begin(), recs.end());
    std::vector<std::vector<CandidateSegment>> per(rec_list.size());
    ParallelFor(rec_list.size(), common.jobs, [&](std::size_t i) {
      const auto &rec = rec_list[i];
      std::vector<AnnotationSegment> mine;
      for (const auto &a : ann)
        if (a.recording == rec) mine.push_back(a);
      auto regions = SingleSpeakerRegions(mine, rec);
      std::optional<Waveform> wave;
      auto it = recordings.find(rec);
      const bool want_wave =
          opts.sad == "energy" || (opts.sad == "auto" && labels.empty());
      if (want_wave && it != recordings.end()) wave = LoadRecording(it->second);
      per[i] = ApplySad(opts.sad, opts.sad_params, labels, rec,
                        wave ? &*wave : nullptr, regions);
    });
    for (auto &p : per) segments.insert(segments.end(), p.begin(), p.end());
  } else if (opts.mode == "energy") {
    RequireFile(opts.channels, "--channels");
    inputs["channels"] = FileDigest(opts.channels);
    const auto pairs = ReadChannelPairs(opts.channels);
    std::vector<std::vector<CandidateSegment>> per(pairs.size());
    ParallelFor(pairs.size(), common.jobs, [&](std::size_t i) {
      const auto &p = pairs[i];
      const Waveform target = LoadRecording({p.target, std::nullopt});
      const Waveform other = LoadRecording({p.other, std::nullopt});
      EnergyRegionOptions eo;
      eo.recording = p.recording;
      eo.speaker = p.speaker;
      eo.energy_floor_db = opts.energy_floor_db;
      eo.ratio_min_db = opts.ratio_min_db;
      eo.frame_s = opts.energy_frame_s;
      auto regions = EnergyRegions(target, other, eo);
      per[i] = ApplySad(opts.sad, opts.sad_params, labels, p.recording,
                        &target, regions);
    });
    for (const auto &p : pairs) {
      // Utterances of a speaker are cut from that speaker's own channel.
      audio_of[p.recording + "\t" + p.speaker] = {p.target, std::nullopt};
    }
    for (auto &p : per) segments.insert(segments.end(), p.begin(), p.end());
  } else {
    Fail(ErrorKind::kConfig, "unknown --mode '" + opts.mode + "'");
  }

  const std::size_t before = segments.size();
  segments = LengthFilter(segments, opts.min_length_s);
  SortSegments(segments);
  {
    std::set<std::string> ids;
    for (const auto &s : segments)
      if (!ids.insert(UtteranceId(s)).second)
        Fail(ErrorKind::kFormat, "duplicate utterance id " + UtteranceId(s));
  }

  std::size_t written = 0;
  if (!opts.audio_dir.empty()) {
    std::map<std::string, std::vector<std::size_t>> by_source;
    for (std::size_t i = 0; i < segments.size(); ++i) {
      const auto &s = segments[i];
      std::string key = s.recording + "\t" + s.speaker;
      if (!audio_of.count(key)) key = s.recording;
      if (!audio_of.count(key))
        Fail(ErrorKind::kMissingAudio,
             "no audio for recording " + s.recording + " (see --recordings)");
      by_source[key].push_back(i);
    }
    std::vector<std::pair<std::string, std::vector<std::size_t>>> jobs(
        by_source.begin(), by_source.end());
    ParallelFor(jobs.size(), common.jobs, [&](std::size_t j) {
      Waveform wave = LoadRecording(audio_of.at(jobs[j].first));
      if (wave.sample_rate() != opts.sample_rate)
        wave = ResampleTo(wave, opts.sample_rate);
      for (std::size_t i : jobs[j].second) {
        const auto &s = segments[i];
        WriteWav(UttPath(opts.audio_dir, UtteranceId(s)),
                 wave.SliceSeconds(s.start_s, s.end_s));
      }
    });
    written = segments.size();
  }

  const std::string tsv = FormatSegmentsTsv(segments);
  AtomicWriteFile(opts.out, tsv);
  json params = {{"mode", opts.segments_in.empty() ? opts.mode : "extract"},
                 {"sad", opts.sad},
                 {"sad_params", SadJson(opts.sad_params)},
                 {"energy_floor_db", opts.energy_floor_db},
                 {"ratio_min_db", opts.ratio_min_db},
                 {"energy_frame_s", opts.energy_frame_s},
                 {"min_length_s", opts.min_length_s},
                 {"sample_rate", opts.sample_rate}};
  if (!opts.recordings.empty())
    inputs["recordings"] = FileDigest(opts.recordings);
  if (!opts.sad_labels.empty())
    inputs["sad_labels"] = FileDigest(opts.sad_labels);
  WriteManifest(FileManifestPath(opts.out), "segment", common, params, inputs,
                {{"segments", TextDigest(tsv)},
                 {"num_segments", segments.size()},
                 {"num_dropped_short", before - segments.size()},
                 {"num_audio_files", written}});
  out << "segments\t" << segments.size() << "\n"
      << "dropped_short\t" << before - segments.size() << "\n";
}

void RunVerify(const CommonOptions &common, const VerifyOptions &opts,
               std::ostream &out) {
  RequireFile(opts.segments, "--segments");
  Require(opts.out, "--out");
  if (!opts.threshold)
    Fail(ErrorKind::kConfig, "--threshold is required");
  const double threshold = *opts.threshold;
  const auto rows = ReadSegmentsTsv(opts.segments);
  json inputs = {{"segments", FileDigest(opts.segments)}};

  VerificationResult result;
  if (!opts.scores.empty()) {
    RequireFile(opts.scores, "--scores");
    inputs["scores"] = FileDigest(opts.scores);
    const auto scores = ReadExternalScores(opts.scores);
    std::vector<ScoredSegment> scored;
    for (const auto &r : rows) {
      auto it = scores.find(r.utt_id);
      if (it == scores.end())
        Fail(ErrorKind::kFormat, opts.scores + ": no score for " + r.utt_id);
      scored.push_back({r.utt_id, r.segment, it->second});
    }
    result = VerifyScores(scored, threshold);
  } else {
    RequireDir(opts.audio_dir, "--audio-dir");
    std::vector<SegmentAudio> audio(rows.size());
    ParallelFor(rows.size(), common.jobs, [&](std::size_t i) {
      audio[i] = {rows[i].utt_id, rows[i].segment,
                  LoadNamed(opts.audio_dir, rows[i].utt_id)};
    });
    std::map<std::string, std::vector<SegmentAudio>> by_speaker;
    for (const auto &a : audio) by_speaker[a.segment.speaker].push_back(a);
    std::map<std::string, SpeakerProfile> profiles;
    for (const auto &[spk, segs] : by_speaker)
      profiles.emplace(spk, Enroll(spk, segs, {opts.min_enroll_s}));
    result = Verify(profiles, audio, threshold, common.jobs);
  }

  std::map<std::string, const ScoredSegment *> by_id;
  for (const auto *group : {&result.kept, &result.rejected})
    for (const auto &s : *group) by_id[s.utt_id] = &s;
  std::vector<ScoredSegment> in_order;
  for (const auto &r : rows) in_order.push_back(*by_id.at(r.utt_id));

  std::vector<CandidateSegment> kept;
  for (const auto &s : result.kept) kept.push_back(s.segment);
  SortSegments(kept);
  const std::string tsv = FormatSegmentsTsv(kept);
  AtomicWriteFile(opts.out, tsv);
  const std::string report = FormatVerificationReport(in_order, threshold);
  json outputs = {{"segments", TextDigest(tsv)},
                  {"num_kept", result.kept.size()},
                  {"num_rejected", result.rejected.size()}};
  if (!opts.report.empty()) {
    AtomicWriteFile(opts.report, report);
    outputs["report"] = TextDigest(report);
  }
  WriteManifest(FileManifestPath(opts.out), "verify", common,
                {{"threshold", threshold},
                 {"min_enroll_s", opts.min_enroll_s},
                 {"scorer", opts.scores.empty() ? "builtin" : "external"}},
                inputs, outputs);
  out << "kept\t" << result.kept.size() << "\n"
      << "rejected\t" << result.rejected.size() << "\n";
}

namespace {

std::vector<UtteranceRecord> LoadUtterances(const PairOptions &opts) {
  std::vector<UtteranceRecord> utts;
  for (auto &row : ReadSegmentsTsv(opts.segments)) {
    UtteranceRecord u;
    u.utt_id = row.utt_id;
    u.speaker = row.segment.speaker;
    u.length_s = row.segment.duration();
    if (!opts.audio_dir.empty()) u.path = UttPath(opts.audio_dir, row.utt_id);
    utts.push_back(std::move(u));
  }
  return utts;
}

std::string JoinLines(const std::vector<std::string> &items) {
  std::string out;
  for (const auto &s : items) out += s + '\n';
  return out;
}

}  // namespace

void RunPair(const CommonOptions &common, const PairOptions &opts,
             std::ostream &out) {
  RequireFile(opts.segments, "--segments");
  if (!(opts.snr_high_db >= opts.snr_low_db))
    Fail(ErrorKind::kConfig, "--snr-high must not be below --snr-low");
  const SnrRange range{opts.snr_low_db, opts.snr_high_db};
  const auto utts = LoadUtterances(opts);
  json inputs = {{"segments", FileDigest(opts.segments)}};
  json params = {{"snr_low_db", opts.snr_low_db},
                 {"snr_high_db", opts.snr_high_db},
                 {"paths", opts.audio_dir.empty() ? "utt_id" : "audio_dir"}};

  if (opts.out_dir.empty()) {
    Require(opts.out, "--out (or --out-dir for split mode)");
    auto result = GenerateMixtureList(utts, opts.target, opts.trace);
    const auto mixes =
        AssignSnrs(result.mixes, StreamSeed(common.seed, "pair.snr"), range);
    const std::string text = FormatMixtureList(mixes);
    AtomicWriteFile(opts.out, text);
    json outputs = {{"list", TextDigest(text)}, {"num_mixtures", mixes.size()}};
    if (opts.trace) {
      const std::string trace = FormatPairTrace(result.trace);
      AtomicWriteFile(opts.out + ".trace.tsv", trace);
      outputs["trace"] = TextDigest(trace);
    }
    params["target"] = opts.target;
    WriteManifest(FileManifestPath(opts.out), "pair", common, params, inputs,
                  outputs);
    out << "mixtures\t" << mixes.size() << "\n";
    return;
  }

  if (!opts.test_speakers || !opts.cv_speakers)
    Fail(ErrorKind::kConfig,
         "split mode needs --test-speakers and --cv-speakers");
  std::set<std::string> spk_set;
  for (const auto &u : utts) spk_set.insert(u.speaker);
  const std::vector<std::string> speakers(spk_set.begin(), spk_set.end());
  SplitPlan plan = SplitSpeakers(
      speakers, {*opts.test_speakers, *opts.cv_speakers, opts.train_speakers},
      StreamSeed(common.seed, "pair.split"));
  plan.train_mixes = opts.train_mixes;
  plan.cv_mixes = opts.cv_mixes;
  plan.test_mixes = opts.test_mixes;

  struct Subset {
    const char *tag;
    const std::vector<std::string> *speakers;
    std::size_t target;
  };
  const Subset subsets[] = {{"tr", &plan.train, plan.train_mixes},
                            {"cv", &plan.cv, plan.cv_mixes},
                            {"tt", &plan.test, plan.test_mixes}};
  json outputs = json::object();
  const fs::path dir(opts.out_dir);
  for (const auto &sub : subsets) {
    const std::string tag = sub.tag;
    auto selected = SelectSpeakers(utts, *sub.speakers);
    auto result = GenerateMixtureList(std::move(selected), sub.target, opts.trace);
    const auto mixes = AssignSnrs(
        result.mixes, StreamSeed(common.seed, "pair.snr." + tag), range);
    const std::string text = FormatMixtureList(mixes);
    const std::string spk = JoinLines(*sub.speakers);
    AtomicWriteFile((dir / ("mix_2_spk_" + tag + ".txt")).string(), text);
    AtomicWriteFile((dir / ("speakers_" + tag + ".txt")).string(), spk);
    outputs["mix_2_spk_" + tag] = TextDigest(text);
    outputs["speakers_" + tag] = TextDigest(spk);
    outputs["num_mixtures_" + tag] = mixes.size();
    outputs["num_speakers_" + tag] = sub.speakers->size();
    if (opts.trace) {
      const std::string trace = FormatPairTrace(result.trace);
      AtomicWriteFile((dir / ("trace_" + tag + ".tsv")).string(), trace);
      outputs["trace_" + tag] = TextDigest(trace);
    }
    out << "mixtures_" << tag << "\t" << mixes.size() << "\n";
  }
  params["split"] = {{"test_speakers", *opts.test_speakers},
                     {"cv_speakers", *opts.cv_speakers},
                     {"train_speakers", opts.train_speakers
                                            ? json(*opts.train_speakers)
                                            : json("rest")},
                     {"train_mixes", plan.train_mixes},
                     {"cv_mixes", plan.cv_mixes},
                     {"test_mixes", plan.test_mixes}};
  WriteManifest(DirManifestPath(opts.out_dir), "pair", common, params, inputs,
                outputs);
}

void RunMix(const CommonOptions &common, const MixOptions &opts,
            std::ostream &out) {
  RequireFile(opts.list, "--list");
  Require(opts.out_dir, "--out-dir");
  if (opts.sample_rate < 0)
    Fail(ErrorKind::kConfig, "--sample-rate must not be negative");
  std::vector<LengthMode> modes;
  if (opts.mode == "both") {
    modes = {LengthMode::kMin, LengthMode::kMax};
  } else {
    modes = {ParseLengthMode(opts.mode)};
  }
  const auto mixes = ReadMixtureList(opts.list);
  std::vector<std::string> names;
  {
    std::set<std::string> seen;
    for (const auto &m : mixes) {
      names.push_back(MixtureName(m));
      if (!seen.insert(names.back()).second)
        Fail(ErrorKind::kFormat,
             opts.list + ": duplicate mixture name " + names.back());
    }
  }

  json inputs = {{"list", FileDigest(opts.list)}};
  std::map<std::string, std::vector<bool>> labels;
  ActivityProvider activity;
  if (!opts.sad_labels.empty()) {
    RequireFile(opts.sad_labels, "--sad-labels");
    if (opts.sample_rate <= 0)
      Fail(ErrorKind::kConfig, "--sad-labels needs a fixed --sample-rate");
    inputs["sad_labels"] = FileDigest(opts.sad_labels);
    labels = ReadFrameLabelFile(opts.sad_labels);
    activity = [&labels, &opts](const std::string &ref, std::size_t n)
        -> std::optional<std::vector<bool>> {
      auto it = labels.find(PathStem(ref));
      if (it == labels.end()) return std::nullopt;
      return FrameLabelsToSamples(it->second, opts.label_step_s,
                                  opts.sample_rate, n);
    };
  }
  const auto resolve = WavFileResolver(
      opts.sample_rate > 0 ? std::optional<int>(opts.sample_rate) : std::nullopt);
  const auto encoding =
      opts.float32 ? SampleEncoding::kFloat32 : SampleEncoding::kPcm16;

  json outputs = json::object();
  for (LengthMode mode : modes) {
    const std::string mode_name(LengthModeName(mode));
    const std::string dir =
        modes.size() > 1 ? (fs::path(opts.out_dir) / mode_name).string()
                         : opts.out_dir;
    std::vector<std::string> rows(mixes.size());
    ParallelFor(mixes.size(), common.jobs, [&](std::size_t i) {
      const auto rendered = Render(mixes[i], resolve, mode, activity);
      WriteRenderedMixture(dir, names[i], rendered, encoding);
      rows[i] = MixMetadataRow(names[i], mixes[i], rendered);
    });
    std::string meta = MixMetadataHeader();
    for (const auto &r : rows) meta += r;
    AtomicWriteFile((fs::path(dir) / "metadata.tsv").string(), meta);
    outputs["metadata_" + mode_name] = TextDigest(meta);
    out << "rendered_" << mode_name << "\t" << mixes.size() << "\n";
  }
  outputs["num_mixtures"] = mixes.size();
  WriteManifest(DirManifestPath(opts.out_dir), "mix", common,
                {{"mode", opts.mode},
                 {"encoding", opts.float32 ? "float32" : "pcm16"},
                 {"sample_rate", opts.sample_rate},
                 {"label_step_s", opts.label_step_s}},
                inputs, outputs);
}

void RunSeparate(const CommonOptions &common, const SeparateOptions &opts,
                 std::ostream &out) {
  RequireDir(opts.mix_dir, "--mix-dir");
  const fs::path mix_dir(opts.mix_dir);
  RequireDir((mix_dir / "mix").string(), "--mix-dir mix/");
  const fs::path out_dir(opts.out_dir.empty() ? opts.mix_dir : opts.out_dir);
  const bool external = opts.mask == "external";
  std::optional<MaskKind> kind;
  if (external) {
    RequireDir(opts.masks_dir, "--masks-dir");
  } else {
    kind = ParseMaskKind(opts.mask);
  }
  const auto encoding =
      opts.float32 ? SampleEncoding::kFloat32 : SampleEncoding::kPcm16;

  const auto names = WavNames((mix_dir / "mix").string());
  std::vector<std::string> rows(names.size());
  ParallelFor(names.size(), common.jobs, [&](std::size_t i) {
    const auto &name = names[i];
    const Waveform mix = LoadNamed(mix_dir / "mix", name);
    const Spectrogram mix_spec = Stft(mix);
    std::vector<Spectrogram> src_specs;
    for (const char *sub : {"s1", "s2"}) {
      Waveform s = LoadNamed(mix_dir / sub, name);
      if (s.size() != mix.size())
        Fail(ErrorKind::kGeometry, name + ": source and mixture lengths differ");
      src_specs.push_back(Stft(s));
    }
    const auto refs = MagnitudesOf(mix_spec, src_specs);
    MaskSet masks;
    if (external) {
      const auto path = (fs::path(opts.masks_dir) / (name + ".bin")).string();
      if (!fs::is_regular_file(path))
        Fail(ErrorKind::kIo, "cannot open mask file: " + path);
      masks = ReadMaskTensor(path);
    } else {
      masks = IdealMasks(refs, *kind);
    }
    const auto best = BestPermutation(masks, refs);
    const auto ests = ApplyMasks(mix_spec, masks, mix.size());
    for (std::size_t s = 0; s < ests.size(); ++s) {
      WriteWav((out_dir / ("est" + std::to_string(s + 1)) / (name + ".wav"))
                   .string(),
               ests[s], encoding);
    }
    rows[i] = name + '\t' + PermString(best.perm) + '\t' + Sci(best.loss) + '\n';
  });
  std::string table = "mixname\tperm\tloss\n";
  for (const auto &r : rows) table += r;
  const std::string table_path = (out_dir / "separation.tsv").string();
  AtomicWriteFile(table_path, table);
  WriteManifest(FileManifestPath(table_path), "separate", common,
                {{"mask", opts.mask},
                 {"encoding", opts.float32 ? "float32" : "pcm16"},
                 {"window", kDefaultWindowLength},
                 {"hop", kDefaultHop}},
                json::object(),
                {{"separation", TextDigest(table)},
                 {"num_mixtures", names.size()}});
  out << "separated\t" << names.size() << "\n";
}

void RunEval(const CommonOptions &common, const EvalOptions &opts,
             std::ostream &out) {
  RequireDir(opts.mix_dir, "--mix-dir");
  const fs::path mix_dir(opts.mix_dir);
  const fs::path est_dir(opts.est_dir.empty() ? opts.mix_dir : opts.est_dir);
  RequireDir((mix_dir / "mix").string(), "--mix-dir mix/");
  const auto names = WavNames((mix_dir / "mix").string());
  if (names.empty())
    Fail(ErrorKind::kMissingAudio, "no mixtures under " + (mix_dir / "mix").string());

  EvalReport report;
  report.rows.resize(names.size());
  ParallelFor(names.size(), common.jobs, [&](std::size_t i) {
    const auto &name = names[i];
    const Waveform mix = LoadNamed(mix_dir / "mix", name);
    std::vector<Waveform> refs, ests;
    for (const char *sub : {"s1", "s2"}) refs.push_back(LoadNamed(mix_dir / sub, name));
    for (const char *sub : {"est1", "est2"})
      ests.push_back(LoadNamed(est_dir / sub, name));
    report.rows[i] = EvalSeparation(name, refs, ests, mix);
  });
  report.summary = Summarize(report.rows);
  const std::string text = FormatEvalReport(report, opts.csv);
  if (!opts.out.empty()) {
    AtomicWriteFile(opts.out, text);
    WriteManifest(FileManifestPath(opts.out), "eval", common,
                  {{"format", opts.csv ? "csv" : "tsv"},
                   {"metric", "si-sdr"},
                   {"cap_db", kSdrCapDb}},
                  json::object(),
                  {{"report", TextDigest(text)}, {"num_mixtures", names.size()}});
  } else {
    out << text;
    return;
  }
  const auto &s = report.summary;
  out << "count\t" << s.count << "\n"
      << "sdri_mean\t" << FormatFixed(s.mean, 6) << "\n"
      << "sdri_median\t" << FormatFixed(s.median, 6) << "\n"
      << "sdri_std\t" << FormatFixed(s.stddev, 6) << "\n";
}

void RunStats(const CommonOptions &common, const StatsOptions &opts,
              std::ostream &out) {
  if (opts.segments.empty() && opts.lists.empty())
    Fail(ErrorKind::kConfig, "stats needs --segments and/or --list");
  const bool tsv = opts.format == "tsv";
  if (!tsv && opts.format != "table")
    Fail(ErrorKind::kConfig, "unknown --format '" + opts.format + "'");

  std::string text;
  json inputs = json::object();
  std::map<std::string, std::string> speaker_of_utt;
  if (!opts.segments.empty()) {
    RequireFile(opts.segments, "--segments");
    inputs["segments"] = FileDigest(opts.segments);
    std::vector<CandidateSegment> segs;
    for (auto &row : ReadSegmentsTsv(opts.segments)) {
      speaker_of_utt[row.utt_id] = row.segment.speaker;
      segs.push_back(row.segment);
    }
    const auto stats = ComputeCorpusStats(segs);
    text += tsv ? FormatCorpusStatsTsv(stats, opts.name)
                : FormatCorpusStatsTable(stats, opts.name);
  }
  for (const auto &list : opts.lists) {
    RequireFile(list, "--list");
    inputs["list:" + list] = FileDigest(list);
    const auto mixes = ReadMixtureList(list);
    std::map<std::string, std::string> speaker_of;
    for (const auto &m : mixes)
      for (const auto *ref : {&m.utt1, &m.utt2}) {
        auto it = speaker_of_utt.find(PathStem(*ref));
        if (it != speaker_of_utt.end()) speaker_of[*ref] = it->second;
      }
    const auto usage = ComputeUsageStats(mixes, speaker_of);
    if (!text.empty()) text += '\n';
    text += "# list " + list + '\n';
    text += tsv ? FormatUsageStatsTsv(usage) : FormatUsageStatsTable(usage);
  }
  if (opts.out.empty()) {
    out << text;
    return;
  }
  AtomicWriteFile(opts.out, text);
  WriteManifest(FileManifestPath(opts.out), "stats", common,
                {{"format", opts.format}, {"name", opts.name}}, inputs,
                {{"report", TextDigest(text)}});
}

void RunRetarget(const CommonOptions &common, const RetargetOptions &opts,
                 std::ostream &out) {
  RequireFile(opts.list, "--list");
  Require(opts.out, "--out");
  if (opts.map.empty() == opts.map_file.empty())
    Fail(ErrorKind::kConfig, "give exactly one of --map or --map-file");
  json inputs = {{"list", FileDigest(opts.list)}};
  json params = json::object();
  ChannelMap map;
  if (!opts.map.empty()) {
    const auto eq = opts.map.find('=');
    if (eq == std::string::npos)
      Fail(ErrorKind::kConfig, "--map expects from=to, got '" + opts.map + "'");
    map = ChannelMap::Substitute(opts.map.substr(0, eq), opts.map.substr(eq + 1));
    params["map"] = opts.map;
  } else {
    RequireFile(opts.map_file, "--map-file");
    inputs["map_file"] = FileDigest(opts.map_file);
    map = ChannelMap::TableFile(opts.map_file);
    params["map"] = "table";
  }
  const auto mixes = ReadMixtureList(opts.list);
  const auto retargeted = RetargetChannel(mixes, map);
  const std::string text = FormatMixtureList(retargeted);
  AtomicWriteFile(opts.out, text);
  WriteManifest(FileManifestPath(opts.out), "retarget", common, params, inputs,
                {{"list", TextDigest(text)}, {"num_mixtures", retargeted.size()}});
  out << "retargeted\t" << retargeted.size() << "\n";
}

}  // namespace spkmix::cli
