// Copyright 2026 The cote Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef COTE_ERROR_H_
#define COTE_ERROR_H_

#include <stdexcept>
#include <string>

namespace cote {

// Base of every error raised by the library. The CLI maps anything derived
// from this to exit code 1 unless a more specific mapping exists.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed input. The message carries the location (file, record path or
// line number) of the offending item.
class FormatError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class UnknownSlotError : public Error {
 public:
  using Error::Error;
};

class UnknownDialogueError : public Error {
 public:
  using Error::Error;
};

class TurnOutOfRangeError : public Error {
 public:
  using Error::Error;
};

class EmptyChainError : public Error {
 public:
  using Error::Error;
};

class EmptyGenerationError : public Error {
 public:
  using Error::Error;
};

class DuplicatePredictionError : public Error {
 public:
  using Error::Error;
};

class InvalidFractionError : public Error {
 public:
  using Error::Error;
};

// Refiner transport failures.
class NetworkError : public Error {
 public:
  using Error::Error;
};

class AuthError : public Error {
 public:
  using Error::Error;
};

class EmptyCompletionError : public Error {
 public:
  using Error::Error;
};

}  // namespace cote

#endif  // COTE_ERROR_H_
