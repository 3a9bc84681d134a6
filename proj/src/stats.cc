// src/stats.cc

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

#include "spkmix/stats.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "spkmix/io_util.h"

namespace spkmix {

CorpusStats ComputeCorpusStats(std::span<const CandidateSegment> segments) {
  CorpusStats out;
  if (segments.empty()) return out;
  std::set<std::string> speakers;
  double total = 0.0;
  for (const auto &s : segments) {
    speakers.insert(s.speaker);
    total += s.duration();
  }
  const double n = static_cast<double>(segments.size());
  out.num_utterances = segments.size();
  out.num_speakers = speakers.size();
  out.total_hours = total / 3600.0;
  out.mean_length_s = total / n;
  double var = 0.0;
  for (const auto &s : segments) {
    const double d = s.duration() - out.mean_length_s;
    var += d * d;
  }
  out.std_length_s = std::sqrt(var / n);
  out.utterances_per_speaker = n / static_cast<double>(speakers.size());
  out.minutes_per_speaker = total / 60.0 / static_cast<double>(speakers.size());
  return out;
}

std::string FormatCorpusStatsTable(const CorpusStats &s,
                                   const std::string &name) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "%-16s %8s %10s %12s %10s %10s %12s\n"
                "%-16s %8.1f %10zu %12.2f %10.2f %10.2f %12.2f\n",
                "dataset", "hours", "speakers", "utts/spk", "mean_len",
                "std_len", "min/spk", name.c_str(), s.total_hours,
                s.num_speakers, s.utterances_per_speaker, s.mean_length_s,
                s.std_length_s, s.minutes_per_speaker);
  return buf;
}

std::string FormatCorpusStatsTsv(const CorpusStats &s, const std::string &name) {
  return "dataset\thours\tspeakers\tutterances\tutts_per_speaker\tmean_len_s\t"
         "std_len_s\tminutes_per_speaker\n" +
         name + '\t' + FormatFixed(s.total_hours, 1) + '\t' +
         std::to_string(s.num_speakers) + '\t' +
         std::to_string(s.num_utterances) + '\t' +
         FormatFixed(s.utterances_per_speaker, 2) + '\t' +
         FormatFixed(s.mean_length_s, 2) + '\t' +
         FormatFixed(s.std_length_s, 2) + '\t' +
         FormatFixed(s.minutes_per_speaker, 2) + '\n';
}

std::string SpeakerOfReference(const std::string &ref) {
  const std::string stem = PathStem(ref);
  return stem.substr(0, stem.find('_'));
}

UsageStats ComputeUsageStats(
    std::span<const MixtureSpec> mixes,
    const std::map<std::string, std::string> &speaker_of,
    const std::optional<std::vector<std::string>> &universe) {
  auto speaker = [&speaker_of](const std::string &ref) {
    auto it = speaker_of.find(ref);
    return it != speaker_of.end() ? it->second : SpeakerOfReference(ref);
  };
  UsageStats out;
  out.num_mixtures = mixes.size();
  if (universe)
    for (const auto &u : *universe) {
      out.utterance_usage.emplace(u, 0);
      out.speaker_usage.emplace(speaker(u), 0);
    }
  for (const auto &m : mixes) {
    const std::string a = speaker(m.utt1), b = speaker(m.utt2);
    ++out.utterance_usage[m.utt1];
    ++out.utterance_usage[m.utt2];
    ++out.speaker_usage[a];
    ++out.speaker_usage[b];
    std::size_t &c = ++out.pair_counts[std::minmax(a, b)];
    out.max_pair_repeats = std::max(out.max_pair_repeats, c);
  }
  for (const auto &[utt, n] : out.utterance_usage) ++out.utterance_histogram[n];
  for (const auto &[spk, n] : out.speaker_usage) ++out.speaker_histogram[n];
  if (!out.utterance_usage.empty()) {
    out.min_usage = out.utterance_histogram.begin()->first;
    out.max_usage = out.utterance_histogram.rbegin()->first;
    std::size_t total = 0;
    for (const auto &[utt, n] : out.utterance_usage) total += n;
    out.mean_usage = static_cast<double>(total) /
                     static_cast<double>(out.utterance_usage.size());
  }
  return out;
}

std::string FormatUsageStatsTable(const UsageStats &s) {
  std::string out;
  out += "mixtures          " + std::to_string(s.num_mixtures) + '\n';
  out += "utterances        " + std::to_string(s.utterance_usage.size()) + '\n';
  out += "speakers          " + std::to_string(s.speaker_usage.size()) + '\n';
  out += "usage min/max     " + std::to_string(s.min_usage) + " / " +
         std::to_string(s.max_usage) + '\n';
  out += "usage mean        " + FormatFixed(s.mean_usage, 2) + '\n';
  out += "max pair repeats  " + std::to_string(s.max_pair_repeats) + '\n';
  out += "utterance usage histogram\n";
  for (const auto &[k, n] : s.utterance_histogram)
    out += "  " + std::to_string(k) + "\t" + std::to_string(n) + '\n';
  out += "speaker usage histogram\n";
  for (const auto &[k, n] : s.speaker_histogram)
    out += "  " + std::to_string(k) + "\t" + std::to_string(n) + '\n';
  return out;
}

std::string FormatUsageStatsTsv(const UsageStats &s) {
  std::string out = "section\tkey\tvalue\n";
  out += "summary\tmixtures\t" + std::to_string(s.num_mixtures) + '\n';
  out += "summary\tutterances\t" + std::to_string(s.utterance_usage.size()) + '\n';
  out += "summary\tspeakers\t" + std::to_string(s.speaker_usage.size()) + '\n';
  out += "summary\tmin_usage\t" + std::to_string(s.min_usage) + '\n';
  out += "summary\tmax_usage\t" + std::to_string(s.max_usage) + '\n';
  out += "summary\tmean_usage\t" + FormatFixed(s.mean_usage, 6) + '\n';
  out += "summary\tmax_pair_repeats\t" + std::to_string(s.max_pair_repeats) + '\n';
  for (const auto &[k, n] : s.utterance_histogram)
    out += "utterance_histogram\t" + std::to_string(k) + '\t' +
           std::to_string(n) + '\n';
  for (const auto &[k, n] : s.speaker_histogram)
    out += "speaker_histogram\t" + std::to_string(k) + '\t' + std::to_string(n) +
           '\n';
  for (const auto &[p, n] : s.pair_counts)
    out += "speaker_pair\t" + p.first + '+' + p.second + '\t' +
           std::to_string(n) + '\n';
  return out;
}

}  // namespace spkmix
