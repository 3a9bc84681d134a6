// src/mixture_list.cc

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

#include "spkmix/mixture_list.h"

#include <sstream>

#include "spkmix/error.h"
#include "spkmix/io_util.h"

namespace spkmix {

std::string FormatMixtureList(std::span<const MixtureSpec> mixes) {
  std::string out;
  for (const auto &m : mixes) {
    out += m.utt1 + ' ' + FormatFixed(m.snr1_db, 6) + ' ' + m.utt2 + ' ' +
           FormatFixed(m.snr2_db, 6) + '\n';
  }
  return out;
}

void WriteMixtureList(const std::string &path,
                      std::span<const MixtureSpec> mixes) {
  AtomicWriteFile(path, FormatMixtureList(mixes));
}

std::vector<MixtureSpec> ParseMixtureList(const std::string &text,
                                          const std::string &origin) {
  std::vector<MixtureSpec> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto f = SplitFields(line);
    if (f.empty()) continue;
    if (f.size() != 4)
      Fail(ErrorKind::kFormat, origin + ":" + std::to_string(lineno) +
                                   ": expected `utt1 snr1 utt2 snr2`");
    out.push_back({f[0], f[2], ParseDouble(f[1], "snr1"),
                   ParseDouble(f[3], "snr2")});
  }
  return out;
}

std::vector<MixtureSpec> ReadMixtureList(const std::string &path) {
  return ParseMixtureList(ReadFileText(path), path);
}

std::string MixtureName(const MixtureSpec &spec) {
  return PathStem(spec.utt1) + '_' + FormatFixed(spec.snr1_db, 6) + '_' +
         PathStem(spec.utt2) + '_' + FormatFixed(spec.snr2_db, 6);
}

ChannelMap ChannelMap::Identity() { return ChannelMap(); }

ChannelMap ChannelMap::Substitute(std::string from, std::string to) {
  ChannelMap m;
  if (from.empty()) Fail(ErrorKind::kConfig, "channel map source is empty");
  m.kind_ = Kind::kSubstitute;
  m.from_ = std::move(from);
  m.to_ = std::move(to);
  return m;
}

ChannelMap ChannelMap::Table(std::map<std::string, std::string> table) {
  ChannelMap m;
  m.kind_ = Kind::kTable;
  m.table_ = std::move(table);
  return m;
}

ChannelMap ChannelMap::TableFile(const std::string &path) {
  std::map<std::string, std::string> table;
  for (const auto &line : ReadDataLines(path)) {
    auto f = SplitFields(line);
    if (f.size() != 2)
      Fail(ErrorKind::kFormat, path + ": expected `old_path new_path`: " + line);
    if (!table.emplace(f[0], f[1]).second)
      Fail(ErrorKind::kFormat, path + ": duplicate source path " + f[0]);
  }
  return Table(std::move(table));
}

std::string ChannelMap::Apply(const std::string &path) const {
  switch (kind_) {
    case Kind::kIdentity:
      return path;
    case Kind::kSubstitute: {
      auto pos = path.find(from_);
      if (pos == std::string::npos)
        Fail(ErrorKind::kMapping,
             "path '" + path + "' does not contain '" + from_ + "'");
      std::string out = path;
      out.replace(pos, from_.size(), to_);
      return out;
    }
    case Kind::kTable: {
      auto it = table_.find(path);
      if (it == table_.end())
        Fail(ErrorKind::kMapping, "no channel mapping for '" + path + "'");
      return it->second;
    }
  }
  return path;
}

std::vector<MixtureSpec> RetargetChannel(std::span<const MixtureSpec> mixes,
                                         const ChannelMap &map) {
  std::vector<MixtureSpec> out;
  out.reserve(mixes.size());
  for (const auto &m : mixes)
    out.push_back({map.Apply(m.utt1), map.Apply(m.utt2), m.snr1_db, m.snr2_db});
  return out;
}

}  // namespace spkmix
