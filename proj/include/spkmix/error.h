// include/spkmix/error.h

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

#ifndef SPKMIX_ERROR_H_
#define SPKMIX_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace spkmix {

enum class ErrorKind {
  kFormat,             // malformed file contents
  kUnsupportedFormat,  // well-formed but unsupported encoding
  kConfig,             // bad parameters or violated preconditions
  kIo,                 // file missing / unwritable
  kTooShort,           // signal shorter than one analysis window
  kGeometry,           // spectrogram / mask shape mismatch
  kEnrollment,         // not enough audio to enroll a speaker
  kDegenerateInput,    // zero-energy signal where energy is required
  kUnsatisfiable,      // pairing constraints cannot be met
  kMapping,            // channel path rewrite failed
  kMissingAudio,       // utterance reference cannot be resolved
  kSizeLimit,          // permutation search too large
};

std::string_view ErrorKindName(ErrorKind kind);

// All library failures are reported with this exception type; callers switch
// on kind() rather than on the message text.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void Fail(ErrorKind kind, const std::string &what) {
  throw Error(kind, what);
}

}  // namespace spkmix

#endif  // SPKMIX_ERROR_H_
