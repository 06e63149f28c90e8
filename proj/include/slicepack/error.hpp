// Copyright 2026 The slicepack Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace slicepack {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A file could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed input document.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Well-formed document that violates a graph or weight invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A segment whose interior breaks the producer-reduction assumptions: some
// producer channel i is mixed with a different channel j of the same producer,
// or a tensor carries the same channel class twice.
class UnsupportedTopology : public Error {
 public:
  UnsupportedTopology(int segment, const std::string& what)
      : Error("segment " + std::to_string(segment) + ": " + what),
        segment_(segment) {}
  int segment() const { return segment_; }

 private:
  int segment_;
};

// Output pruning requested through a layer that does not map zero to zero
// (a per-channel offset), or on a segment whose layout is pinned.
class OutputPruningHazard : public Error {
 public:
  OutputPruningHazard(int segment, const std::string& what)
      : Error("segment " + std::to_string(segment) + ": " + what),
        segment_(segment) {}
  int segment() const { return segment_; }

 private:
  int segment_;
};

// An export plan that cannot be applied to the graph it was given.
class PlanError : public Error {
 public:
  using Error::Error;
};

}  // namespace slicepack
