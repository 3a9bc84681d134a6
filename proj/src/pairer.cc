// src/pairer.cc

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

#include "spkmix/pairer.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "spkmix/error.h"
#include "spkmix/io_util.h"
#include "spkmix/rng.h"
#include "spkmix/segmenter.h"

namespace spkmix {

namespace {

// Pairing state with utterances bucketed by usage count. Within a bucket,
// utterances are ordered by (length, utt_id).
class GreedyPairer {
 public:
  GreedyPairer(const GreedyPairer &) = delete;
  GreedyPairer &operator=(const GreedyPairer &) = delete;

  explicit GreedyPairer(std::vector<UtteranceRecord> utts)
      : utts_(std::move(utts)) {
    std::map<std::string, int> speaker_index;
    for (const auto &u : utts_)
      speaker_index.emplace(u.speaker, static_cast<int>(speaker_index.size()));
    speaker_.reserve(utts_.size());
    history_.resize(utts_.size());
    for (std::size_t i = 0; i < utts_.size(); ++i) {
      speaker_.push_back(speaker_index.at(utts_[i].speaker));
      for (const auto &s : utts_[i].paired_speakers) {
        auto it = speaker_index.find(s);
        if (it != speaker_index.end()) history_[i].insert(it->second);
      }
      BucketAt(utts_[i].usage_count).insert(Key(i));
    }
    num_speakers_ = speaker_index.size();
  }

  std::size_t num_speakers() const { return num_speakers_; }

  void PairOnce(std::size_t mix_index, std::vector<MixtureSpec> *mixes,
                std::vector<PairTraceRecord> *trace) {
    const int min_usage = buckets_.begin()->first;
    const auto &s1 = buckets_.begin()->second;
    const std::size_t u1 = LongestLowestId(s1);

    int offset = 0, resets = 0;
    for (;;) {
      const int level = min_usage + offset;
      auto bucket = buckets_.find(level);
      if (bucket != buckets_.end()) {
        auto u2 = ClosestEligible(u1, bucket->second);
        if (u2) {
          if (trace) {
            trace->push_back(MakeTrace(mix_index, u1, *u2, min_usage, offset,
                                       resets, bucket->second));
          }
          Pair(u1, *u2, mixes);
          return;
        }
      }
      if (buckets_.rbegin()->first > level) {
        ++offset;  // relax usage
        continue;
      }
      // Every level searched: forget u1's speaker history and start again.
      if (history_[u1].empty())
        Fail(ErrorKind::kUnsatisfiable,
             "no utterance of another speaker can be paired with " +
                 utts_[u1].utt_id);
      history_[u1].clear();
      offset = 0;
      ++resets;
    }
  }

  std::vector<UtteranceRecord> FinalState() const {
    std::vector<std::string> names(num_speakers_);
    for (std::size_t i = 0; i < utts_.size(); ++i)
      names[speaker_[i]] = utts_[i].speaker;
    std::vector<UtteranceRecord> out = utts_;
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i].paired_speakers.clear();
      for (int s : history_[i]) out[i].paired_speakers.insert(names[s]);
    }
    return out;
  }

 private:
  struct Key {
    explicit Key(std::size_t i) : index(i) {}
    std::size_t index;
  };
  struct KeyLess {
    using is_transparent = void;
    const GreedyPairer *self;
    bool operator()(const Key &a, const Key &b) const {
      const auto &ua = self->utts_[a.index], &ub = self->utts_[b.index];
      if (ua.length_s != ub.length_s) return ua.length_s < ub.length_s;
      return ua.utt_id < ub.utt_id;
    }
    // Length-only probes for lower_bound.
    bool operator()(const Key &a, double len) const {
      return self->utts_[a.index].length_s < len;
    }
    bool operator()(double len, const Key &b) const {
      return len < self->utts_[b.index].length_s;
    }
  };
  using Bucket = std::set<Key, KeyLess>;

  Bucket &BucketAt(int usage) {
    auto it = buckets_.find(usage);
    if (it == buckets_.end())
      it = buckets_.emplace(usage, Bucket(KeyLess{this})).first;
    return it->second;
  }

  // Longest utterance in the set; among equal lengths the lowest id, which is
  // the first of the trailing equal-length run.
  std::size_t LongestLowestId(const Bucket &bucket) const {
    auto it = std::prev(bucket.end());
    const double longest = utts_[it->index].length_s;
    while (it != bucket.begin() &&
           utts_[std::prev(it)->index].length_s == longest)
      --it;
    return it->index;
  }

  bool Eligible(std::size_t u1, std::size_t v) const {
    return v != u1 && speaker_[v] != speaker_[u1] &&
           !history_[u1].count(speaker_[v]);
  }

  // argmin |len(u1) - len(v)| over eligible v in the bucket, ties to the
  // lowest id. Scans outward from len(u1); the difference grows monotonically
  // in both directions so the scan stops once it exceeds the best so far.
  std::optional<std::size_t> ClosestEligible(std::size_t u1,
                                             const Bucket &bucket) const {
    const double len1 = utts_[u1].length_s;
    std::optional<std::size_t> best;
    double best_diff = 0.0;
    auto consider = [&](std::size_t v) {
      if (!Eligible(u1, v)) return;
      const double d = std::abs(len1 - utts_[v].length_s);
      if (!best || d < best_diff ||
          (d == best_diff && utts_[v].utt_id < utts_[*best].utt_id)) {
        best = v;
        best_diff = d;
      }
    };
    auto pivot = bucket.lower_bound(len1);
    for (auto it = pivot; it != bucket.end(); ++it) {
      if (best && std::abs(len1 - utts_[it->index].length_s) > best_diff) break;
      consider(it->index);
    }
    for (auto it = pivot; it != bucket.begin();) {
      --it;
      if (best && std::abs(len1 - utts_[it->index].length_s) > best_diff) break;
      consider(it->index);
    }
    return best;
  }

  PairTraceRecord MakeTrace(std::size_t mix_index, std::size_t u1,
                            std::size_t u2, int min_usage, int offset,
                            int resets, const Bucket &level_bucket) const {
    PairTraceRecord r;
    r.mix_index = mix_index;
    r.u1 = utts_[u1].utt_id;
    r.u2 = utts_[u2].utt_id;
    r.min_usage = min_usage;
    r.u2_usage = utts_[u2].usage_count;
    r.s1_size = buckets_.begin()->second.size();
    r.s2_size = level_bucket.size();
    for (std::size_t v = 0; v < utts_.size(); ++v)
      if (Eligible(u1, v)) ++r.s3_size;
    for (const auto &k : level_bucket)
      if (Eligible(u1, k.index)) ++r.eligible_size;
    r.level_offset = offset;
    r.resets = resets;
    r.length_diff = std::abs(utts_[u1].length_s - utts_[u2].length_s);
    return r;
  }

  void Bump(std::size_t u) {
    auto it = buckets_.find(utts_[u].usage_count);
    it->second.erase(Key(u));
    if (it->second.empty()) buckets_.erase(it);
    ++utts_[u].usage_count;
    BucketAt(utts_[u].usage_count).insert(Key(u));
  }

  void Pair(std::size_t u1, std::size_t u2, std::vector<MixtureSpec> *mixes) {
    auto ref = [&](std::size_t u) {
      return utts_[u].path.empty() ? utts_[u].utt_id : utts_[u].path;
    };
    mixes->push_back({ref(u1), ref(u2), 0.0, 0.0});
    Bump(u1);
    Bump(u2);
    history_[u1].insert(speaker_[u2]);
    history_[u2].insert(speaker_[u1]);
  }

  std::vector<UtteranceRecord> utts_;
  std::vector<int> speaker_;
  std::vector<std::unordered_set<int>> history_;
  std::map<int, Bucket> buckets_;
  std::size_t num_speakers_ = 0;
};

}  // namespace

PairingResult GenerateMixtureList(std::vector<UtteranceRecord> utts,
                                  std::size_t target_mixes,
                                  bool record_trace) {
  if (target_mixes == 0) Fail(ErrorKind::kConfig, "target_mixes must be >= 1");
  std::unordered_set<std::string> ids;
  for (const auto &u : utts) {
    if (!ids.insert(u.utt_id).second)
      Fail(ErrorKind::kConfig, "duplicate utterance id " + u.utt_id);
    if (!(u.length_s + 1e-9 >= kMinUtteranceSeconds))
      Fail(ErrorKind::kConfig, "utterance " + u.utt_id + " is shorter than " +
                                   FormatFixed(kMinUtteranceSeconds, 1) + " s");
    if (u.usage_count < 0)
      Fail(ErrorKind::kConfig, "negative usage count for " + u.utt_id);
  }
  GreedyPairer pairer(std::move(utts));
  if (pairer.num_speakers() < 2)
    Fail(ErrorKind::kUnsatisfiable,
         "pairing needs at least two distinct speakers");

  PairingResult result;
  result.mixes.reserve(target_mixes);
  if (record_trace) result.trace.reserve(target_mixes);
  for (std::size_t n = 0; n < target_mixes; ++n)
    pairer.PairOnce(n, &result.mixes, record_trace ? &result.trace : nullptr);
  result.final_state = pairer.FinalState();
  return result;
}

std::vector<MixtureSpec> AssignSnrs(std::span<const MixtureSpec> mixes,
                                    std::uint64_t seed, SnrRange range) {
  if (!(range.low_db <= range.high_db))
    Fail(ErrorKind::kConfig, "SNR range low must not exceed high");
  Rng rng(seed);
  std::vector<MixtureSpec> out(mixes.begin(), mixes.end());
  for (auto &m : out) {
    const double x = rng.Uniform(range.low_db, range.high_db);
    m.snr1_db = x / 2.0;
    m.snr2_db = -x / 2.0 + 0.0;  // no negative zero
  }
  return out;
}

SplitPlan SplitSpeakers(std::span<const std::string> speakers,
                        const SplitSizes &sizes, std::uint64_t seed) {
  std::vector<std::string> pool(speakers.begin(), speakers.end());
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());

  const std::size_t fixed = sizes.test + sizes.cv;
  const std::size_t train =
      sizes.train ? *sizes.train : (pool.size() >= fixed ? pool.size() - fixed : 0);
  if (fixed + train > pool.size())
    Fail(ErrorKind::kConfig,
         "split sizes " + std::to_string(sizes.test) + "/" +
             std::to_string(sizes.cv) + "/" + std::to_string(train) +
             " exceed the " + std::to_string(pool.size()) + " speakers");

  Rng rng(seed);
  for (std::size_t i = pool.size(); i > 1; --i)
    std::swap(pool[i - 1], pool[rng.Below(i)]);

  SplitPlan plan;
  auto take = [&](std::size_t begin, std::size_t count) {
    std::vector<std::string> part(pool.begin() + begin,
                                  pool.begin() + begin + count);
    std::sort(part.begin(), part.end());
    return part;
  };
  plan.test = take(0, sizes.test);
  plan.cv = take(sizes.test, sizes.cv);
  plan.train = take(fixed, train);
  return plan;
}

std::vector<UtteranceRecord> SelectSpeakers(
    std::span<const UtteranceRecord> utts,
    std::span<const std::string> speakers) {
  std::unordered_set<std::string> keep(speakers.begin(), speakers.end());
  std::vector<UtteranceRecord> out;
  for (const auto &u : utts)
    if (keep.count(u.speaker)) out.push_back(u);
  return out;
}

std::string FormatPairTrace(std::span<const PairTraceRecord> trace) {
  std::string out =
      "mix_index\tu1\tu2\tmin_usage\tu2_usage\ts1_size\ts2_size\ts3_size\t"
      "eligible_size\tlevel_offset\tresets\tlength_diff\n";
  for (const auto &r : trace) {
    out += std::to_string(r.mix_index) + '\t' + r.u1 + '\t' + r.u2 + '\t' +
           std::to_string(r.min_usage) + '\t' + std::to_string(r.u2_usage) +
           '\t' + std::to_string(r.s1_size) + '\t' +
           std::to_string(r.s2_size) + '\t' + std::to_string(r.s3_size) +
           '\t' + std::to_string(r.eligible_size) + '\t' +
           std::to_string(r.level_offset) + '\t' + std::to_string(r.resets) +
           '\t' + FormatFixed(r.length_diff, 6) + '\n';
  }
  return out;
}

}  // namespace spkmix
