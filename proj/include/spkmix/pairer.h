// include/spkmix/pairer.h

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

#ifndef SPKMIX_PAIRER_H_
#define SPKMIX_PAIRER_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "spkmix/mixture_list.h"

namespace spkmix {

// Default mixture counts per subset, matching the wsj0-2mix sizes.
inline constexpr std::size_t kDefaultTrainMixes = 20000;
inline constexpr std::size_t kDefaultCvMixes = 5000;
inline constexpr std::size_t kDefaultTestMixes = 4000;

struct UtteranceRecord {
  std::string utt_id;
  std::string speaker;
  double length_s = 0.0;
  int usage_count = 0;
  // Speakers this utterance has been mixed with. History only: it may be
  // cleared when the pairing constraints are relaxed.
  std::set<std::string> paired_speakers;
  // Audio reference written to the mixture list; utt_id when empty.
  std::string path;
};

// One row per generated mixture, for auditing the greedy choices.
struct PairTraceRecord {
  std::size_t mix_index = 0;
  std::string u1, u2;
  int min_usage = 0;        // global minimum usage before this pair
  int u2_usage = 0;         // usage of u2 before this pair
  std::size_t s1_size = 0;  // utterances at the minimum usage
  std::size_t s2_size = 0;  // utterances at the usage level u2 came from
  std::size_t s3_size = 0;  // utterances not excluded by speaker history
  std::size_t eligible_size = 0;  // |S2 ∩ S3| at the matching level
  int level_offset = 0;     // i when matched
  int resets = 0;           // times u1's speaker history was cleared
  double length_diff = 0.0;
};

struct PairingResult {
  std::vector<MixtureSpec> mixes;  // SNRs are zero; see AssignSnrs
  std::vector<PairTraceRecord> trace;  // empty unless requested
  std::vector<UtteranceRecord> final_state;
};

// Greedy mixture-list generation. Repeatedly takes the longest utterance
// among those with the lowest usage count (u1), then searches usage levels
// min, min+1, ... for a partner whose speaker differs from u1's and is not in
// u1's pairing history, preferring the closest length. When every level is
// exhausted, u1's history is cleared and the search restarts at the minimum.
// Two utterances of the same speaker are never paired. Ties go to the lowest
// utt_id.
//
// Errors: kConfig for duplicate ids, lengths under 1.3 s or target 0;
// kUnsatisfiable with fewer than two speakers.
PairingResult GenerateMixtureList(std::vector<UtteranceRecord> utts,
                                  std::size_t target_mixes,
                                  bool record_trace = false);

struct SnrRange {
  double low_db = 0.0;
  double high_db = 5.0;
};

// Draws x ~ Uniform(low, high) per mixture and sets snr1 = x/2, snr2 = -x/2.
std::vector<MixtureSpec> AssignSnrs(std::span<const MixtureSpec> mixes,
                                    std::uint64_t seed, SnrRange range = {});

struct SplitSizes {
  std::size_t test = 0;
  std::size_t cv = 0;
  std::optional<std::size_t> train;  // remainder when unset
};

struct SplitPlan {
  std::vector<std::string> train, cv, test;  // each sorted
  std::size_t train_mixes = kDefaultTrainMixes;
  std::size_t cv_mixes = kDefaultCvMixes;
  std::size_t test_mixes = kDefaultTestMixes;
};

// Seeded shuffle of the distinct speakers, then test, cv and train are taken
// in that order. kConfig if the sizes exceed the speaker count.
SplitPlan SplitSpeakers(std::span<const std::string> speakers,
                        const SplitSizes &sizes, std::uint64_t seed);

std::vector<UtteranceRecord> SelectSpeakers(
    std::span<const UtteranceRecord> utts,
    std::span<const std::string> speakers);

// Trace TSV with a header row.
std::string FormatPairTrace(std::span<const PairTraceRecord> trace);

}  // namespace spkmix

#endif  // SPKMIX_PAIRER_H_
