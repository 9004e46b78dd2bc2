// Copyright 2026 The mwdce Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mwdce {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// A parameter lies outside its physical domain (V not in [0,1], eta not in (0,1], ...).
class DomainError : public Error {
   public:
    using Error::Error;
};

/// A table is too small for the requested witness, or two shapes disagree.
class ShapeError : public Error {
   public:
    using Error::Error;
};

/// Heralding produced a branch of (numerically) zero probability.
class ZeroProbabilityBranch : public Error {
   public:
    using Error::Error;
};

/// Strategy enumeration would exceed the configured cap.
class EnumerationCapExceeded : public Error {
   public:
    EnumerationCapExceeded(std::uint64_t count, std::uint64_t cap)
        : Error("strategy enumeration needs " + std::to_string(count) + " strategies, cap is " +
                std::to_string(cap)),
          count_(count),
          cap_(cap) {
    }
    std::uint64_t count() const noexcept {
        return count_;
    }
    std::uint64_t cap() const noexcept {
        return cap_;
    }

   private:
    std::uint64_t count_;
    std::uint64_t cap_;
};

/// A postselected cell has no detections, so its frequencies are undefined.
class InsufficientStatistics : public Error {
   public:
    InsufficientStatistics(std::size_t prep, std::size_t meas)
        : Error("cell (" + std::to_string(prep) + ", " + std::to_string(meas) +
                ") has no detected events to postselect on"),
          prep_(prep),
          meas_(meas) {
    }
    std::size_t prep() const noexcept {
        return prep_;
    }
    std::size_t meas() const noexcept {
        return meas_;
    }

   private:
    std::size_t prep_;
    std::size_t meas_;
};

/// Malformed config, schedule or CSV input.
class ParseError : public Error {
   public:
    using Error::Error;
};

}  // namespace mwdce
