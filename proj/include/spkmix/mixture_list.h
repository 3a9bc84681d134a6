// include/spkmix/mixture_list.h

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

#ifndef SPKMIX_MIXTURE_LIST_H_
#define SPKMIX_MIXTURE_LIST_H_

#include <map>
#include <span>
#include <string>
#include <vector>

namespace spkmix {

// One line of a wsj0-2mix style list. utt1/utt2 are audio references (file
// paths when written to disk).
struct MixtureSpec {
  std::string utt1;
  std::string utt2;
  double snr1_db = 0.0;
  double snr2_db = 0.0;

  bool operator==(const MixtureSpec &) const = default;
};

// `<utt1> <snr1> <utt2> <snr2>` with six decimals, one mixture per line.
std::string FormatMixtureList(std::span<const MixtureSpec> mixes);
void WriteMixtureList(const std::string &path,
                      std::span<const MixtureSpec> mixes);
std::vector<MixtureSpec> ParseMixtureList(const std::string &text,
                                          const std::string &origin = "<text>");
std::vector<MixtureSpec> ReadMixtureList(const std::string &path);

// `<utt1_stem>_<snr1>_<utt2_stem>_<snr2>`, SNRs printed as in the list.
std::string MixtureName(const MixtureSpec &spec);

// Rewrites audio paths for a parallel recording channel. Pairs and SNRs are
// carried over untouched.
class ChannelMap {
 public:
  static ChannelMap Identity();
  // Replaces the first occurrence of `from` with `to`; a path without `from`
  // is a kMapping error.
  static ChannelMap Substitute(std::string from, std::string to);
  // Exact lookup; unknown paths are a kMapping error.
  static ChannelMap Table(std::map<std::string, std::string> table);
  // Table from a two-column file `old_path new_path`.
  static ChannelMap TableFile(const std::string &path);

  std::string Apply(const std::string &path) const;

 private:
  enum class Kind { kIdentity, kSubstitute, kTable };
  Kind kind_ = Kind::kIdentity;
  std::string from_, to_;
  std::map<std::string, std::string> table_;
};

std::vector<MixtureSpec> RetargetChannel(std::span<const MixtureSpec> mixes,
                                         const ChannelMap &map);

}  // namespace spkmix

#endif  // SPKMIX_MIXTURE_LIST_H_
