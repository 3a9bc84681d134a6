// src/error.cc

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

#include "spkmix/error.h"

namespace spkmix {

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kFormat: return "format";
    case ErrorKind::kUnsupportedFormat: return "unsupported-format";
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kTooShort: return "too-short";
    case ErrorKind::kGeometry: return "geometry";
    case ErrorKind::kEnrollment: return "enrollment";
    case ErrorKind::kDegenerateInput: return "degenerate-input";
    case ErrorKind::kUnsatisfiable: return "unsatisfiable";
    case ErrorKind::kMapping: return "mapping";
    case ErrorKind::kMissingAudio: return "missing-audio";
    case ErrorKind::kSizeLimit: return "size-limit";
  }
  return "unknown";
}

}  // namespace spkmix
