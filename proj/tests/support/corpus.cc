// tests/support/corpus.cc

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

#include "corpus.h"

#include <cstdio>
#include <filesystem>

#include "spkmix/audio.h"
#include "spkmix/io_util.h"
#include "spkmix/rng.h"
#include "synth.h"

namespace spkmix::testing {

MicroCorpus MakeMicroCorpus(const std::string &dir, std::uint64_t seed,
                            const MicroCorpusOptions &opts) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(dir) / "wav");
  Rng rng(seed);
  const int sr = opts.sample_rate;
  MicroCorpus corpus;
  corpus.num_speakers = 2 * opts.num_recordings;

  std::vector<Voice> voices;
  for (int s = 0; s < corpus.num_speakers; ++s) {
    Voice v;
    v.f0_hz = 95.0 + 150.0 * s / std::max(1, corpus.num_speakers - 1);
    v.tilt_db_per_harmonic = s % 2 ? -1.5 : -4.0;
    voices.push_back(v);
  }
  Voice intruder{300.0, -0.5, 3800.0};

  std::string ann, recs;
  char buf[128];
  for (int r = 0; r < opts.num_recordings; ++r) {
    std::snprintf(buf, sizeof(buf), "rec%02d", r);
    const std::string rec = buf;
    const int spk[2] = {2 * r, 2 * r + 1};
    std::vector<double> audio = Noise(rng, sr / 2, 1e-4);
    const int turns = 2 * opts.turns_per_speaker + (opts.short_turn ? 1 : 0);
    const int bad_turn = opts.mislabeled_turn ? 2 : -1;
    for (int t = 0; t < turns; ++t) {
      const int who = spk[t % 2];
      const bool is_short = opts.short_turn && t == turns - 1;
      const double len = is_short ? 1.0 : rng.Uniform(opts.min_turn_s, opts.max_turn_s);
      const auto n = static_cast<std::size_t>(len * sr);
      const double start = static_cast<double>(audio.size()) / sr;
      const Voice &voice = t == bad_turn ? intruder : voices[who];
      auto speech = Speech(rng, voice, n, sr, 0.08);
      audio.insert(audio.end(), speech.begin(), speech.end());
      const double end = static_cast<double>(audio.size()) / sr;
      std::snprintf(buf, sizeof(buf), "spk%02d", who);
      corpus.turns.push_back({buf, rec, start, end});
      if (t == bad_turn) corpus.mislabeled.push_back(corpus.turns.back());
      ann += rec + '\t' + buf + '\t' + FormatFixed(start, 6) + '\t' +
             FormatFixed(end, 6) + '\n';
      auto gap = Noise(rng, static_cast<std::size_t>(opts.gap_s * sr), 1e-4);
      audio.insert(audio.end(), gap.begin(), gap.end());
    }
    const std::string wav = (fs::path(dir) / "wav" / (rec + ".wav")).string();
    WriteWav(wav, Waveform(std::move(audio), sr));
    recs += rec + '\t' + wav + '\n';
  }
  corpus.annotations = (fs::path(dir) / "annotations.tsv").string();
  corpus.recordings = (fs::path(dir) / "recordings.tsv").string();
  AtomicWriteFile(corpus.annotations, ann);
  AtomicWriteFile(corpus.recordings, recs);
  return corpus;
}

}  // namespace spkmix::testing
