// Copyright 2026 The hiertext Authors.
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

#pragma once

#include <stdexcept>
#include <string>

namespace hiertext {

/// Base class of every error raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define HIERTEXT_DEFINE_ERROR(Name)               \
  class Name : public Error {                     \
   public:                                        \
    using Error::Error;                           \
  }

// Taxonomy construction and queries.
HIERTEXT_DEFINE_ERROR(EmptyInput);
HIERTEXT_DEFINE_ERROR(ChildHasTwoParents);
HIERTEXT_DEFINE_ERROR(CycleDetected);
HIERTEXT_DEFINE_ERROR(MultipleRoots);
HIERTEXT_DEFINE_ERROR(TooFewLeaves);
HIERTEXT_DEFINE_ERROR(NotALeaf);
HIERTEXT_DEFINE_ERROR(NotAParent);

// Numeric layers.
HIERTEXT_DEFINE_ERROR(DimensionMismatch);
HIERTEXT_DEFINE_ERROR(InvalidStep);
HIERTEXT_DEFINE_ERROR(EmptySequence);
HIERTEXT_DEFINE_ERROR(InvalidDropoutRate);
HIERTEXT_DEFINE_ERROR(StaleCache);

// Training.
HIERTEXT_DEFINE_ERROR(ShapeMismatch);
HIERTEXT_DEFINE_ERROR(UnknownLabel);
HIERTEXT_DEFINE_ERROR(EmptyDataset);
HIERTEXT_DEFINE_ERROR(TooFewExamples);

// Metrics.
HIERTEXT_DEFINE_ERROR(LengthMismatch);
HIERTEXT_DEFINE_ERROR(UnknownLeaf);

// IO.
HIERTEXT_DEFINE_ERROR(MissingFile);
HIERTEXT_DEFINE_ERROR(MalformedLine);
HIERTEXT_DEFINE_ERROR(InvalidRate);
HIERTEXT_DEFINE_ERROR(BadCheckpoint);

// CLI.
HIERTEXT_DEFINE_ERROR(ConfigError);

#undef HIERTEXT_DEFINE_ERROR

}  // namespace hiertext
