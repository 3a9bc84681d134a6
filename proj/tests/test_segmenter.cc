// tests/test_segmenter.cc

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

#include <cmath>
#include <set>

#include "doctest.h"
#include "spkmix/error.h"
#include "spkmix/io_util.h"
#include "spkmix/segmenter.h"
#include "synth.h"

using namespace spkmix;
using namespace spkmix::testing;

namespace {

constexpr int kSr = 8000;

std::size_t Samples(double s) { return static_cast<std::size_t>(std::lround(s * kSr)); }

// Per 10 ms cell: the single active speaker, "" for silence, "*" for overlap.
std::vector<std::string> GridLabels(std::span<const AnnotationSegment> ann,
                                    std::size_t cells) {
  std::vector<std::string> out(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    const double t = (c + 0.5) / 100.0;
    std::set<std::string> on;
    for (const auto &a : ann)
      if (a.start_s <= t && t < a.end_s) on.insert(a.speaker);
    out[c] = on.empty() ? "" : on.size() == 1 ? *on.begin() : "*";
  }
  return out;
}

std::vector<std::string> GridOf(std::span<const CandidateSegment> segs,
                                std::size_t cells) {
  std::vector<std::string> out(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    const double t = (c + 0.5) / 100.0;
    for (const auto &s : segs)
      if (s.start_s <= t && t < s.end_s) {
        REQUIRE(out[c].empty());
        out[c] = s.speaker;
      }
  }
  return out;
}

}  // namespace

TEST_CASE("single speaker regions: examples") {
  std::vector<AnnotationSegment> one{{"A", "r", 0, 10}};
  auto r = SingleSpeakerRegions(one, "r");
  REQUIRE(r.size() == 1);
  CHECK(r[0] == CandidateSegment{"r", "A", 0, 10, SegmentSource::kTranscript});

  std::vector<AnnotationSegment> nested{{"A", "r", 0, 10}, {"B", "r", 4, 6}};
  r = SingleSpeakerRegions(nested, "r");
  REQUIRE(r.size() == 2);
  CHECK(r[0].start_s == 0);
  CHECK(r[0].end_s == 4);
  CHECK(r[1].start_s == 6);
  CHECK(r[1].end_s == 10);
  CHECK(r[1].speaker == "A");

  std::vector<AnnotationSegment> full{{"A", "r", 0, 5}, {"B", "r", 0, 5}};
  CHECK(SingleSpeakerRegions(full, "r").empty());
  CHECK(SingleSpeakerRegions({}, "r").empty());
}

TEST_CASE("single speaker regions: self overlap counts once") {
  std::vector<AnnotationSegment> a{{"A", "r", 0, 3}, {"A", "r", 2, 5}};
  auto r = SingleSpeakerRegions(a, "r");
  REQUIRE(r.size() == 1);
  CHECK(r[0].end_s == 5);
}

TEST_CASE("single speaker regions: bad input") {
  std::vector<AnnotationSegment> wrong{{"A", "other", 0, 1}};
  CHECK_THROWS_AS(SingleSpeakerRegions(wrong, "r"), Error);
  std::vector<AnnotationSegment> empty{{"A", "r", 2, 2}};
  CHECK_THROWS_AS(SingleSpeakerRegions(empty, "r"), Error);
}

TEST_CASE("single speaker regions agree with a 10 ms grid") {
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const int speakers = 1 + static_cast<int>(rng.Below(4));
    const int count = static_cast<int>(rng.Below(10));
    std::vector<AnnotationSegment> ann;
    for (int i = 0; i < count; ++i) {
      const int a = static_cast<int>(rng.Below(1000));
      const int len = 1 + static_cast<int>(rng.Below(300));
      ann.push_back({std::string(1, 'A' + rng.Below(speakers)), "rec",
                     a / 100.0, (a + len) / 100.0});
    }
    auto segs = SingleSpeakerRegions(ann, "rec");
    auto expect = GridLabels(ann, 1400);
    auto got = GridOf(segs, 1400);
    for (std::size_t c = 0; c < expect.size(); ++c)
      REQUIRE((expect[c] == "*" ? std::string() : expect[c]) == got[c]);
    for (std::size_t i = 1; i < segs.size(); ++i)
      REQUIRE(segs[i - 1].end_s <= segs[i].start_s);
  }
}

TEST_CASE("energy regions: silent and equal channels") {
  Waveform zero(std::vector<double>(Samples(3), 0.0), kSr);
  CHECK(EnergyRegions(zero, zero, {}).empty());
  Rng rng(1);
  auto x = Speech(rng, {}, Samples(3), kSr);
  Waveform w(x, kSr);
  CHECK(EnergyRegions(w, w, {}).empty());
  Waveform other(x, 16000);
  CHECK_THROWS_AS(EnergyRegions(w, other, {}), Error);
}

TEST_CASE("energy regions: loud target between 2 and 4 s") {
  Rng rng(2);
  auto target = Concat({Silence(Samples(2)), Speech(rng, {}, Samples(2), kSr),
                        Silence(Samples(2))});
  auto other = Noise(rng, target.size(), 0.001);
  EnergyRegionOptions opts;
  opts.recording = "rec";
  opts.speaker = "A";
  auto r = EnergyRegions(Waveform(target, kSr), Waveform(other, kSr), opts);
  REQUIRE(r.size() == 1);
  CHECK(std::abs(r[0].start_s - 2.0) <= opts.frame_s + 1e-9);
  CHECK(std::abs(r[0].end_s - 4.0) <= opts.frame_s + 1e-9);
  CHECK(r[0].source == SegmentSource::kEnergy);
  CHECK(r[0].speaker == "A");
}

TEST_CASE("energy regions: crosstalk is excluded by the ratio") {
  Rng rng(3);
  auto a = Speech(rng, {.f0_hz = 110}, Samples(2), kSr);
  auto b = Speech(rng, {.f0_hz = 210}, Samples(2), kSr);
  std::vector<double> near = Concat({a, Silence(Samples(2))});
  std::vector<double> far = Concat({Silence(Samples(2)), b});
  // Each microphone hears the other talker 10 dB down.
  for (std::size_t i = 0; i < Samples(2); ++i) {
    near[Samples(2) + i] += 0.316 * b[i];
    far[i] += 0.316 * a[i];
  }
  auto r = EnergyRegions(Waveform(near, kSr), Waveform(far, kSr), {});
  REQUIRE(r.size() == 1);
  CHECK(r[0].start_s <= 0.01);
  CHECK(std::abs(r[0].end_s - 2.0) <= 0.01 + 1e-9);
}

TEST_CASE("sad splits at a long pause") {
  Rng rng(4);
  auto x = Concat({Speech(rng, {}, Samples(2), kSr), Silence(Samples(0.5)),
                   Speech(rng, {}, Samples(1.5), kSr)});
  Waveform w(x, kSr);
  std::vector<CandidateSegment> region{{"rec", "A", 0, 4}};
  auto r = SadRefine(w, region);
  REQUIRE(r.size() == 2);
  CHECK(std::abs(r[0].start_s - 0.0) <= 0.025);
  CHECK(std::abs(r[0].end_s - 2.0) <= 0.025);
  CHECK(std::abs(r[1].start_s - 2.5) <= 0.025);
  CHECK(std::abs(r[1].end_s - 4.0) <= 0.025);
}

TEST_CASE("sad keeps continuous speech and bridges short pauses") {
  Rng rng(5);
  Waveform cont(Speech(rng, {}, Samples(3), kSr), kSr);
  std::vector<CandidateSegment> region{{"rec", "A", 0, 3}};
  auto r = SadRefine(cont, region);
  REQUIRE(r.size() == 1);
  CHECK(r[0].start_s <= 0.025);
  CHECK(r[0].end_s >= 3.0 - 0.025);

  Waveform gap(Concat({Speech(rng, {}, Samples(1), kSr), Silence(Samples(0.2)),
                       Speech(rng, {}, Samples(1), kSr)}),
               kSr);
  std::vector<CandidateSegment> region2{{"rec", "A", 0, 2.2}};
  CHECK(SadRefine(gap, region2).size() == 1);
}

TEST_CASE("sad removes silent regions and stays inside the region") {
  Rng rng(6);
  auto x = Concat({Silence(Samples(1)), Speech(rng, {}, Samples(2), kSr),
                   Silence(Samples(1))});
  Waveform w(x, kSr);
  std::vector<CandidateSegment> silent{{"rec", "A", 0.0, 0.9}};
  CHECK(SadRefine(w, silent).empty());
  std::vector<CandidateSegment> inner{{"rec", "A", 1.5, 2.5}};
  auto r = SadRefine(w, inner);
  REQUIRE(r.size() == 1);
  CHECK(r[0].start_s >= 1.5);
  CHECK(r[0].end_s <= 2.5);
  Waveform zero(Silence(Samples(2)), kSr);
  std::vector<CandidateSegment> all{{"rec", "A", 0, 2}};
  CHECK(SadRefine(zero, all).empty());
}

TEST_CASE("sad from external frame labels") {
  FrameLabels labels;
  labels.speech.assign(400, false);
  for (int i = 10; i < 150; ++i) labels.speech[i] = true;
  for (int i = 170; i < 200; ++i) labels.speech[i] = true;  // 0.2 s gap: bridged
  for (int i = 300; i < 302; ++i) labels.speech[i] = true;  // 20 ms: dropped
  std::vector<CandidateSegment> region{{"rec", "A", 0, 4}};
  auto r = SadRefineWithLabels(labels, region);
  REQUIRE(r.size() == 1);
  CHECK(r[0].start_s == doctest::Approx(0.1));
  CHECK(r[0].end_s == doctest::Approx(2.0));
}

TEST_CASE("length filter boundary") {
  std::vector<CandidateSegment> s{{"r", "A", 0, 1.2}, {"r", "A", 2, 3.3},
                                  {"r", "A", 4.1, 5.4}, {"r", "A", 6, 9}};
  auto kept = LengthFilter(s);
  REQUIRE(kept.size() == 3);
  CHECK(kept[0].start_s == 2);
  CHECK(LengthFilter({}).empty());
}

TEST_CASE("utterance ids and segment files") {
  CandidateSegment s{"rec1", "spk7", 1.5, 12.25, SegmentSource::kTranscript};
  CHECK(UtteranceId(s) == "spk7_rec1_0001500_0012250");
  TempDir dir("seg");
  std::vector<CandidateSegment> segs{s, {"rec1", "spk8", 13.0, 15.5}};
  WriteSegmentsTsv(dir / "segments.tsv", segs);
  auto rows = ReadSegmentsTsv(dir / "segments.tsv");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].utt_id == UtteranceId(s));
  CHECK(rows[1].segment.speaker == "spk8");
  CHECK(rows[1].segment.end_s == 15.5);
}

TEST_CASE("segment files reproduce ids for arbitrary times") {
  Rng rng(41);
  std::vector<CandidateSegment> segs;
  for (int i = 0; i < 500; ++i) {
    // Half-millisecond ties included.
    const double start = i % 2 ? rng.Uniform(0, 3600) : (i * 7 + 0.5) / 1000.0;
    segs.push_back({"r", "s" + std::to_string(i), start, start + 1.5});
  }
  TempDir dir("seg-ids");
  WriteSegmentsTsv(dir / "segments.tsv", segs);
  auto rows = ReadSegmentsTsv(dir / "segments.tsv");
  REQUIRE(rows.size() == segs.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].utt_id == UtteranceId(segs[i]));
    CHECK(UtteranceId(rows[i].segment) == rows[i].utt_id);
  }
}

TEST_CASE("annotation readers") {
  TempDir dir("ann");
  AtomicWriteFile(dir / "a.json", std::string_view(
      R"({"rec1": [{"speaker": "A", "start_s": 0.0, "end_s": 2.5}],
          "rec2": [{"speaker": "B", "start_s": 1, "end_s": 3}]})"));
  auto a = ReadAnnotationsJson(dir / "a.json");
  REQUIRE(a.size() == 2);
  CHECK(a[1].recording == "rec2");
  AtomicWriteFile(dir / "bad.json",
                  std::string_view(R"({"r": [{"speaker": "A", "start_s": 0}]})"));
  try {
    ReadAnnotationsJson(dir / "bad.json");
    FAIL("no throw");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::kFormat);
  }
  AtomicWriteFile(dir / "a.tsv", std::string_view("rec1\tA\t0.5\t1.5\n"));
  auto t = ReadAnnotationsTsv(dir / "a.tsv");
  REQUIRE(t.size() == 1);
  CHECK(t[0].speaker == "A");
  CHECK(t[0].start_s == 0.5);
  AtomicWriteFile(dir / "l.txt", std::string_view("rec1 0 1 1 0\n"));
  auto labels = ReadFrameLabelFile(dir / "l.txt");
  CHECK(labels.at("rec1") == std::vector<bool>{false, true, true, false});
}
