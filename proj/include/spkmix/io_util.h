// include/spkmix/io_util.h

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

#ifndef SPKMIX_IO_UTIL_H_
#define SPKMIX_IO_UTIL_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace spkmix {

std::vector<unsigned char> ReadFileBytes(const std::string &path);
std::string ReadFileText(const std::string &path);

// Writes to "<path>.tmp.<pid>" and renames over the destination. Parent
// directories are created as needed.
void AtomicWriteFile(const std::string &path,
                     std::span<const unsigned char> bytes);
void AtomicWriteFile(const std::string &path, std::string_view text);

// Non-empty lines with trailing '\r' removed; lines starting with '#' are
// skipped.
std::vector<std::string> ReadDataLines(const std::string &path);

// Splits on any of the delimiter characters, dropping empty fields.
std::vector<std::string> SplitFields(std::string_view line,
                                     std::string_view delims = " \t");

// Strict parsers: the whole token must be consumed. kFormat on failure, with
// `what` naming the field for the message.
double ParseDouble(std::string_view token, std::string_view what);
long long ParseInt(std::string_view token, std::string_view what);

// Fixed-point formatting that never prints a negative zero.
std::string FormatFixed(double value, int decimals);

// File name without directory and without the last extension.
std::string PathStem(const std::string &path);

}  // namespace spkmix

#endif  // SPKMIX_IO_UTIL_H_
