// Copyright 2026 The loglab Authors
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

namespace loglab {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : Error { using Error::Error; };

// One undecodable input line; callers count and skip, they do not abort.
struct MalformedLine : Error { using Error::Error; };

struct EmptyDataset : Error { using Error::Error; };
struct InvalidSpec : Error { using Error::Error; };

// Raised when P or U is empty and a quantity that needs both is requested.
struct DegeneratePartition : Error { using Error::Error; };

struct InvalidLength : Error { using Error::Error; };
struct InvalidConfig : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };
struct EmptyBatch : Error { using Error::Error; };
struct NonFiniteInput : Error { using Error::Error; };
struct InvalidQ : Error { using Error::Error; };
struct NonFiniteLoss : Error { using Error::Error; };
struct VersionMismatch : Error { using Error::Error; };
struct LengthMismatch : Error { using Error::Error; };

// Bad or missing key in a run configuration; the message names the key.
struct ConfigError : Error { using Error::Error; };

}  // namespace loglab
