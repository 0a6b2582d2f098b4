// Copyright 2026 The QTL Authors
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

#include <stdexcept>
#include <string>

namespace qtl {

// Coarse error classes; the CLI maps each to a distinct exit code.
enum class ErrorClass { kConfig, kRuntime, kCapacity };

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, const std::string& what) : std::runtime_error(what), class_(cls) {}
  ErrorClass error_class() const noexcept { return class_; }

 private:
  ErrorClass class_;
};

#define QTL_DEFINE_ERROR(Name, cls)                                        \
  class Name : public Error {                                              \
   public:                                                                 \
    explicit Name(const std::string& what) : Error(ErrorClass::cls, what) {} \
  };

QTL_DEFINE_ERROR(ArgumentError, kConfig)
QTL_DEFINE_ERROR(IndexError, kConfig)
QTL_DEFINE_ERROR(ConfigError, kConfig)
QTL_DEFINE_ERROR(ValidationError, kConfig)
QTL_DEFINE_ERROR(CapacityError, kCapacity)
QTL_DEFINE_ERROR(LookupError, kRuntime)
QTL_DEFINE_ERROR(CorruptionError, kRuntime)
QTL_DEFINE_ERROR(PreprocessError, kRuntime)
QTL_DEFINE_ERROR(UndefinedMetricError, kRuntime)
QTL_DEFINE_ERROR(DegenerateTestError, kRuntime)
QTL_DEFINE_ERROR(DivergenceError, kRuntime)
QTL_DEFINE_ERROR(CheckpointMismatchError, kRuntime)
QTL_DEFINE_ERROR(IoError, kRuntime)

#undef QTL_DEFINE_ERROR

}  // namespace qtl
