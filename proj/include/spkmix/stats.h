// include/spkmix/stats.h

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

#ifndef SPKMIX_STATS_H_
#define SPKMIX_STATS_H_

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spkmix/mixture_list.h"
#include "spkmix/segmenter.h"

namespace spkmix {

struct CorpusStats {
  std::size_t num_utterances = 0;
  std::size_t num_speakers = 0;
  double total_hours = 0.0;
  double utterances_per_speaker = 0.0;
  double mean_length_s = 0.0;
  double std_length_s = 0.0;  // population
  double minutes_per_speaker = 0.0;
};

// Empty input gives an all-zero report.
CorpusStats ComputeCorpusStats(std::span<const CandidateSegment> segments);

// Hours to 0.1, seconds to 0.01, minutes and counts to 0.01.
std::string FormatCorpusStatsTable(const CorpusStats &stats,
                                   const std::string &name = "corpus");
std::string FormatCorpusStatsTsv(const CorpusStats &stats,
                                 const std::string &name = "corpus");

struct UsageStats {
  std::size_t num_mixtures = 0;
  std::map<std::string, std::size_t> utterance_usage;
  std::map<std::string, std::size_t> speaker_usage;
  // usage count -> number of utterances (speakers) with that count.
  std::map<std::size_t, std::size_t> utterance_histogram;
  std::map<std::size_t, std::size_t> speaker_histogram;
  // Unordered speaker pair (first < second) -> mixtures containing it.
  std::map<std::pair<std::string, std::string>, std::size_t> pair_counts;
  std::size_t max_pair_repeats = 0;
  std::size_t min_usage = 0;
  std::size_t max_usage = 0;
  double mean_usage = 0.0;
};

// Speaker of an utterance reference: the text before the first '_' of the
// file stem (utterance ids start with the speaker).
std::string SpeakerOfReference(const std::string &ref);

// When a universe is given, utterances that never appear count as usage 0.
// speaker_of overrides SpeakerOfReference for the references it lists.
UsageStats ComputeUsageStats(
    std::span<const MixtureSpec> mixes,
    const std::map<std::string, std::string> &speaker_of = {},
    const std::optional<std::vector<std::string>> &universe = std::nullopt);

std::string FormatUsageStatsTable(const UsageStats &stats);
std::string FormatUsageStatsTsv(const UsageStats &stats);

}  // namespace spkmix

#endif  // SPKMIX_STATS_H_
